from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "fingertype._kernels._ckernels",
        ["src/fingertype/_kernels/_ckernels.pyx"],
        extra_compile_args=["-O3"],
    )
]

if cythonize is not None:
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
else:
    # Pure-Python install still works; the package falls back to
    # fingertype._kernels._pykernels at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
