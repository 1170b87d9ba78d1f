"""Pipeline configuration.

A single flat dataclass covers every stage.  Values load from an INI
file whose sections group related keys; any command-line flag
overrides the file.  The configuration echoes into every report along
with a content hash so outputs are traceable to their settings.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import asdict, dataclass, fields

from .errors import ConfigError

# field name -> INI section
_SECTIONS = {
    "pool_mode": "keymap",
    "space_finger": "keymap",
    "wordlist": "lexicon",
    "freq_corpus": "lexicon",
    "fallback_k": "lexicon",
    "fallback_penalty": "lexicon",
    "max_word_len": "lexicon",
    "accuracy": "channel",
    "space_error_rate": "channel",
    "variation_p": "channel",
    "lm_corpus": "lm",
    "order": "lm",
    "smoothing": "lm",
    "alpha": "lm",
    "add_k": "lm",
    "beam_width": "decode",
    "n_best": "decode",
    "prior_weight": "decode",
    "empty_pool": "decode",
    "scorer_cmd": "decode",
    "workers": "decode",
    "seed": "run",
}


@dataclass
class PipelineConfig:
    # keymap
    pool_mode: str = "canonical"
    space_finger: int = 4
    # lexicon (None paths mean the bundled data files)
    wordlist: str | None = None
    freq_corpus: str | None = None
    fallback_k: int = 0
    fallback_penalty: float = 5.0
    max_word_len: int = 24
    # channel
    accuracy: float = 1.0
    space_error_rate: float = 0.0
    variation_p: float = 0.0
    # language model
    lm_corpus: str | None = None
    order: int = 3
    smoothing: str = "stupid_backoff"
    alpha: float = 0.4
    add_k: float = 0.1
    # decoding
    beam_width: int = 8
    n_best: int = 1
    prior_weight: float = 0.5
    empty_pool: str = "placeholder"
    scorer_cmd: str | None = None
    workers: int = 1
    # run
    seed: int = 0

    def __post_init__(self):
        if self.pool_mode not in ("canonical", "augmented"):
            raise ConfigError(f"pool_mode must be canonical or augmented, got {self.pool_mode!r}")
        if self.smoothing not in ("stupid_backoff", "add_k"):
            raise ConfigError(f"smoothing must be stupid_backoff or add_k, got {self.smoothing!r}")
        if self.empty_pool not in ("placeholder", "fallback", "error"):
            raise ConfigError(f"empty_pool must be placeholder, fallback, or error")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ConfigError("accuracy must be in [0, 1]")
        if not 0.0 <= self.space_error_rate <= 1.0:
            raise ConfigError("space_error_rate must be in [0, 1]")
        if not 0.0 <= self.variation_p <= 1.0:
            raise ConfigError("variation_p must be in [0, 1]")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def to_dict(self) -> dict:
        # workers is a runtime parallelism knob with no effect on output,
        # so it is excluded from the echoed config and the content hash.
        out = asdict(self)
        del out["workers"]
        return out

    def content_hash(self) -> str:
        lines = [
            f"{_SECTIONS[f.name]}.{f.name}={getattr(self, f.name)!r}"
            for f in fields(self)
            if f.name != "workers"
        ]
        digest = hashlib.sha256("\n".join(sorted(lines)).encode("utf-8"))
        return digest.hexdigest()[:16]


def _convert(name: str, kind: type, raw: str):
    raw = raw.strip()
    if kind is str:
        return raw
    if raw.lower() in ("none", ""):
        return None
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw


_FIELD_TYPES = {
    "pool_mode": str, "space_finger": int,
    "wordlist": str, "freq_corpus": str, "fallback_k": int,
    "fallback_penalty": float, "max_word_len": int,
    "accuracy": float, "space_error_rate": float, "variation_p": float,
    "lm_corpus": str, "order": int, "smoothing": str, "alpha": float,
    "add_k": float,
    "beam_width": int, "n_best": int, "prior_weight": float,
    "empty_pool": str, "scorer_cmd": str, "workers": int,
    "seed": int,
}

_OPTIONAL_PATHS = {"wordlist", "freq_corpus", "lm_corpus", "scorer_cmd"}


def load_config(path: str) -> PipelineConfig:
    """Read an INI configuration file.

    Unknown sections or keys are configuration errors, which catches
    typos early.  Missing keys keep their defaults.
    """
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    values: dict = {}
    known = {(sec, name) for name, sec in _SECTIONS.items()}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if (section, key) not in known:
                raise ConfigError(f"unknown config key [{section}] {key}")
            kind = _FIELD_TYPES[key]
            value = _convert(key, kind, raw)
            if key in _OPTIONAL_PATHS and value is not None and value.lower() == "bundled":
                value = None
            if key in _OPTIONAL_PATHS and value == "":
                value = None
            values[key] = value
    return PipelineConfig(**values)


def apply_overrides(cfg: PipelineConfig, overrides: dict) -> PipelineConfig:
    """A new config with non-None override values applied on top."""
    values = asdict(cfg)
    for key, value in overrides.items():
        if key not in values:
            raise ConfigError(f"unknown config field {key!r}")
        if value is not None:
            values[key] = value
    return PipelineConfig(**values)
