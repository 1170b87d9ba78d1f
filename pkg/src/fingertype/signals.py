"""Surface-signal synthesis and keystroke-aligned analysis.

A recording is a multichannel float32 sample block (one row per
electrode, 16 per forearm for the default 32) plus a keystroke log.
Analysis slices a window around each keystroke (1 s before and after
by default), pools root-mean-square amplitude across channels, and
summarizes per finger: median and mean RMS, the coefficient of
variation CV = sigma/mu, and the signal-to-noise ratio SNR = mu/sigma.
CV and SNR are exact reciprocals by definition.

The synthesizer writes a Gaussian noise floor everywhere, then for
each keystroke adds, on the typing hand's half of the channels, a
broadband burst shaped by a Hann envelope (per-finger duration and
peak amplitude) and a sustained tone component across the analysis
window.  Each keystroke draws one gain from a Gamma distribution with
unit mean, so segment RMS varies keystroke to keystroke with a
configurable coefficient of variation; :func:`calibrated_config`
solves the tone level so segment RMS lands on a target mean.  All
synthesis is deterministic in (schedule, config, seed).
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, ValidationError
from .keymap import KeyMap, canonical_keymap

LEFT_FINGERS = frozenset((0, 1, 2, 3, 4))
DEFAULT_PRE_S = 1.0
DEFAULT_POST_S = 1.0

# Mean square of a Hann envelope relative to its peak (continuous limit).
HANN_MEAN_SQUARE = 3.0 / 8.0


@dataclass(frozen=True)
class Keystroke:
    time: float
    key: str
    finger: int

    def __post_init__(self):
        if not 0 <= self.finger <= 9:
            raise ValidationError(f"finger must be 0..9, got {self.finger}")
        if len(self.key) != 1:
            raise ValidationError(f"key must be a single character, got {self.key!r}")


@dataclass
class Recording:
    """Multichannel samples with an aligned keystroke log."""

    samples: np.ndarray  # (channels, n_samples) float32
    sample_rate: float
    keystrokes: list[Keystroke] = field(default_factory=list)

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if arr.ndim != 2:
            raise ValidationError(f"samples must be 2-D, got shape {arr.shape}")
        if self.sample_rate <= 0:
            raise ValidationError("sample rate must be positive")
        self.samples = arr.astype(np.float32, copy=False)
        times = [k.time for k in self.keystrokes]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError("keystroke timestamps must be strictly increasing")
        duration = arr.shape[1] / self.sample_rate
        for k in self.keystrokes:
            if not 0.0 <= k.time <= duration:
                raise ValidationError(
                    f"keystroke at {k.time}s is outside the {duration:.3f}s recording"
                )

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return self.samples.shape[1] / self.sample_rate


@dataclass(frozen=True)
class Segment:
    """One keystroke-aligned analysis window."""

    key: str
    finger: int
    samples: np.ndarray  # (channels, window) float32
    start_time: float
    padded: bool


def extract_segments(recording: Recording, pre: float = DEFAULT_PRE_S,
                     post: float = DEFAULT_POST_S) -> list[Segment]:
    """Slice one window around each keystroke.

    Windows reaching past either end of the recording are zero-padded
    and marked.  Returns an empty list (with a warning) when the
    recording has no keystrokes.
    """
    if pre < 0 or post < 0 or pre + post <= 0:
        raise ValidationError("window must extend around the keystroke")
    if not recording.keystrokes:
        warnings.warn("recording has no keystrokes; no segments extracted",
                      stacklevel=2)
        return []
    rate = recording.sample_rate
    n_pre = int(round(pre * rate))
    n_post = int(round(post * rate))
    width = n_pre + n_post
    n = recording.samples.shape[1]
    segments: list[Segment] = []
    for k in recording.keystrokes:
        center = int(round(k.time * rate))
        lo = center - n_pre
        hi = center + n_post
        padded = lo < 0 or hi > n
        window = np.zeros((recording.channels, width), dtype=np.float32)
        src_lo = max(lo, 0)
        src_hi = min(hi, n)
        if src_hi > src_lo:
            window[:, src_lo - lo:src_hi - lo] = recording.samples[:, src_lo:src_hi]
        segments.append(Segment(key=k.key, finger=k.finger, samples=window,
                                start_time=lo / rate, padded=padded))
    return segments


def rms(samples: np.ndarray) -> float:
    """Root mean square over all values, computed in float64."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size == 0:
        raise ValidationError("cannot take the RMS of an empty array")
    return float(np.sqrt(np.mean(np.square(arr))))


def segment_energy(segment: Segment, sample_rate: float) -> float:
    """Integral of squared amplitude over the window, per channel."""
    arr = np.asarray(segment.samples, dtype=np.float64)
    return float(np.sum(np.square(arr)) / (sample_rate * arr.shape[0]))


@dataclass(frozen=True)
class FingerStat:
    finger: int
    count: int
    median_rms: float
    mean_rms: float
    std_rms: float
    cv: float | None  # std/mean
    snr: float | None  # mean/std
    degenerate: bool  # zero spread or zero mean


def finger_stats(segments: Iterable[Segment]) -> dict[int, FingerStat]:
    """Per-finger RMS statistics over keystroke-aligned segments.

    Fingers with fewer than two segments are omitted (one sample has
    no spread).  A finger whose RMS values have zero spread or zero
    mean is reported with ``cv``/``snr`` of None and flagged
    degenerate instead of dividing by zero.
    """
    values: dict[int, list[float]] = {}
    for seg in segments:
        values.setdefault(seg.finger, []).append(rms(seg.samples))
    stats: dict[int, FingerStat] = {}
    for finger in sorted(values):
        vals = np.asarray(values[finger], dtype=np.float64)
        if vals.size < 2:
            continue
        mean = float(np.mean(vals))
        std = float(np.std(vals))
        degenerate = std == 0.0 or mean == 0.0
        stats[finger] = FingerStat(
            finger=finger,
            count=int(vals.size),
            median_rms=float(np.median(vals)),
            mean_rms=mean,
            std_rms=std,
            cv=None if degenerate else std / mean,
            snr=None if degenerate else mean / std,
            degenerate=degenerate,
        )
    return stats


def format_stats(stats: dict[int, FingerStat]) -> str:
    lines = ["finger  count  median    mean     std      cv      snr"]
    for finger in sorted(stats):
        s = stats[finger]
        cv = f"{s.cv:.4f}" if s.cv is not None else "  n/a "
        snr = f"{s.snr:.4f}" if s.snr is not None else "  n/a "
        lines.append(
            f"{finger:>6}  {s.count:>5}  {s.median_rms:>7.3f} {s.mean_rms:>7.3f} "
            f"{s.std_rms:>7.3f}  {cv}  {snr}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BurstSpec:
    """Per-finger burst morphology and sustained tone level."""

    duration_ms: float
    peak_uv: float
    tonic_uv: float = 0.0

    def __post_init__(self):
        if self.duration_ms <= 0:
            raise ValidationError("burst duration must be positive")
        if self.peak_uv < 0 or self.tonic_uv < 0:
            raise ValidationError("amplitudes must be non-negative")


def default_burst_specs() -> dict[int, BurstSpec]:
    """Burst shapes per finger, spanning the measured morphology range
    (15-110 ms, 20-50 microvolt peaks; short/small for the right ring
    finger, long for the left middle, largest for the right pinky)."""
    return {
        0: BurstSpec(duration_ms=70.0, peak_uv=30.0),
        1: BurstSpec(duration_ms=80.0, peak_uv=30.0),
        2: BurstSpec(duration_ms=110.0, peak_uv=35.0),
        3: BurstSpec(duration_ms=50.0, peak_uv=30.0),
        6: BurstSpec(duration_ms=40.0, peak_uv=25.0),
        7: BurstSpec(duration_ms=60.0, peak_uv=30.0),
        8: BurstSpec(duration_ms=15.0, peak_uv=20.0),
        9: BurstSpec(duration_ms=90.0, peak_uv=50.0),
    }


@dataclass(frozen=True)
class SynthConfig:
    sample_rate: float = 2000.0
    channels: int = 32
    noise_floor_uv: float = 1.0
    gain_cv: float = 0.44
    bursts: dict[int, BurstSpec] = field(default_factory=default_burst_specs)
    window_pre_s: float = DEFAULT_PRE_S
    window_post_s: float = DEFAULT_POST_S

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValidationError("sample rate must be positive")
        if self.channels < 2 or self.channels % 2 != 0:
            raise ValidationError("channels must be an even count (one half per forearm)")
        if self.noise_floor_uv < 0:
            raise ValidationError("noise floor must be non-negative")
        if self.gain_cv < 0:
            raise ValidationError("gain_cv must be non-negative")


def calibrated_config(target_mean_rms_uv: float = 10.8,
                      target_cv: float = 0.44,
                      base: SynthConfig | None = None) -> SynthConfig:
    """Solve per-finger tone levels for a target segment RMS.

    Segment mean square decomposes into the noise floor everywhere,
    plus (on half the channels) the tone and the Hann-weighted burst.
    Setting the tone to the remainder puts the expected segment RMS at
    the target for a unit gain; the Gamma gain then spreads RMS with
    roughly ``target_cv`` relative variation, so SNR of segment RMS
    lands near ``1 / target_cv``.
    """
    cfg = base or SynthConfig()
    if target_mean_rms_uv <= cfg.noise_floor_uv:
        raise ValidationError("target RMS must exceed the noise floor")
    window_s = cfg.window_pre_s + cfg.window_post_s
    bursts: dict[int, BurstSpec] = {}
    for finger, spec in cfg.bursts.items():
        burst_ms = (
            0.5 * spec.peak_uv ** 2 * HANN_MEAN_SQUARE
            * (spec.duration_ms / 1000.0) / window_s
        )
        need = target_mean_rms_uv ** 2 - cfg.noise_floor_uv ** 2 - burst_ms
        if need <= 0:
            raise ValidationError(
                f"burst for finger {finger} already exceeds the target RMS"
            )
        bursts[finger] = replace(spec, tonic_uv=math.sqrt(2.0 * need))
    return replace(cfg, gain_cv=target_cv, bursts=bursts)


def uniform_schedule(keys: str, spacing_s: float,
                     start_s: float | None = None) -> list[tuple[float, str]]:
    """Evenly spaced keystrokes, starting one window width in."""
    if spacing_s <= 0:
        raise ValidationError("spacing must be positive")
    start = DEFAULT_PRE_S if start_s is None else start_s
    return [(start + i * spacing_s, k) for i, k in enumerate(keys)]


def synthesize(schedule: Sequence[tuple[float, str]], config: SynthConfig,
               seed: int, keymap: KeyMap | None = None) -> Recording:
    """Generate a recording for a keystroke schedule.

    Each schedule entry is (time, key); the finger comes from the
    keymap (space keys use the thumb).  Identical inputs produce an
    identical recording, bit for bit.
    """
    km = keymap or canonical_keymap()
    if not schedule:
        raise ValidationError("schedule must contain at least one keystroke")
    times = [t for t, _ in schedule]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValidationError("schedule times must be strictly increasing")
    if times[0] < 0:
        raise ValidationError("schedule times must be non-negative")
    rate = config.sample_rate
    half = config.channels // 2
    n = int(math.ceil((times[-1] + config.window_post_s) * rate)) + 1
    rng = np.random.default_rng(seed)
    samples = rng.normal(0.0, 1.0, size=(config.channels, n))
    if config.noise_floor_uv > 0:
        samples *= config.noise_floor_uv
    else:
        samples[:] = 0.0
    keystrokes: list[Keystroke] = []
    for t, key in schedule:
        if key == " ":
            finger = km.space_finger
        else:
            finger = km.finger_for(key)
        keystrokes.append(Keystroke(time=t, key=key, finger=finger))
        spec = config.bursts.get(finger)
        if spec is None:
            continue
        if config.gain_cv > 0:
            shape = 1.0 / config.gain_cv ** 2
            gain = rng.gamma(shape, 1.0 / shape)
        else:
            gain = 1.0
        rows = slice(0, half) if finger in LEFT_FINGERS else slice(half, None)
        n_rows = half
        center = int(round(t * rate))
        if spec.tonic_uv > 0:
            lo = max(center - int(round(config.window_pre_s * rate)), 0)
            hi = min(center + int(round(config.window_post_s * rate)), n)
            if hi > lo:
                samples[rows, lo:hi] += gain * spec.tonic_uv * rng.normal(
                    0.0, 1.0, size=(n_rows, hi - lo)
                )
        if spec.peak_uv > 0:
            w = max(int(round(spec.duration_ms / 1000.0 * rate)), 3)
            envelope = np.hanning(w)
            start = center - w // 2
            lo = max(start, 0)
            hi = min(start + w, n)
            span = hi - lo
            if span > 0:
                burst = gain * spec.peak_uv * envelope[lo - start:lo - start + span]
                burst = burst * rng.normal(0.0, 1.0, size=(n_rows, span))
                samples[rows, lo:hi] += burst
    return Recording(samples=samples.astype(np.float32), sample_rate=rate,
                     keystrokes=keystrokes)


# --- serialization ---------------------------------------------------------

_MANIFEST = "manifest.json"
_SAMPLES = "samples.raw"
_KEYSTROKES = "keystrokes.csv"


def save_recording(recording: Recording, directory) -> None:
    """Write a recording container: JSON manifest, raw little-endian
    float32 samples (channel-major), and a keystroke CSV."""
    from pathlib import Path

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    manifest = {
        "channels": recording.channels,
        "n_samples": int(recording.samples.shape[1]),
        "sample_rate": recording.sample_rate,
        "dtype": "<f4",
    }
    (d / _MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                               encoding="utf-8")
    recording.samples.astype("<f4").tofile(d / _SAMPLES)
    with open(d / _KEYSTROKES, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "key", "finger"])
        for k in recording.keystrokes:
            writer.writerow([repr(k.time), k.key, k.finger])


def load_keystrokes_csv(path) -> list[Keystroke]:
    """Read a keystroke log CSV with a time,key,finger header."""
    out: list[Keystroke] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["time", "key", "finger"]:
            raise ParseError(f"expected header time,key,finger in {path}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line=lineno)
            try:
                out.append(Keystroke(time=float(row[0]), key=row[1],
                                     finger=int(row[2])))
            except (ValueError, ValidationError) as exc:
                raise ParseError(str(exc), line=lineno) from None
    return out


def load_recording(directory) -> Recording:
    from pathlib import Path

    d = Path(directory)
    try:
        manifest = json.loads((d / _MANIFEST).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad manifest: {exc}") from None
    channels = int(manifest["channels"])
    n_samples = int(manifest["n_samples"])
    raw = np.fromfile(d / _SAMPLES, dtype=manifest.get("dtype", "<f4"))
    if raw.size != channels * n_samples:
        raise ValidationError(
            f"sample file holds {raw.size} values, manifest says "
            f"{channels}x{n_samples}"
        )
    samples = raw.reshape(channels, n_samples)
    keystrokes = load_keystrokes_csv(d / _KEYSTROKES)
    return Recording(samples=samples, sample_rate=float(manifest["sample_rate"]),
                     keystrokes=keystrokes)


def save_segments(segments: Sequence[Segment], directory,
                  sample_rate: float) -> None:
    """Write segments as raw float32 blocks plus a JSON index."""
    from pathlib import Path

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    index = {"sample_rate": sample_rate, "segments": []}
    for i, seg in enumerate(segments):
        name = f"segment_{i:05d}.raw"
        seg.samples.astype("<f4").tofile(d / name)
        index["segments"].append({
            "file": name,
            "key": seg.key,
            "finger": seg.finger,
            "channels": int(seg.samples.shape[0]),
            "window": int(seg.samples.shape[1]),
            "start_time": seg.start_time,
            "padded": seg.padded,
        })
    (d / "index.json").write_text(json.dumps(index, indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")


def load_segments(directory) -> tuple[list[Segment], float]:
    from pathlib import Path

    d = Path(directory)
    index = json.loads((d / "index.json").read_text(encoding="utf-8"))
    segments: list[Segment] = []
    for entry in index["segments"]:
        raw = np.fromfile(d / entry["file"], dtype="<f4")
        segments.append(Segment(
            key=entry["key"],
            finger=int(entry["finger"]),
            samples=raw.reshape(entry["channels"], entry["window"]),
            start_time=float(entry["start_time"]),
            padded=bool(entry["padded"]),
        ))
    return segments, float(index["sample_rate"])
