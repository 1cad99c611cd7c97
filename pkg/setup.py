"""Build script: compiles the optional evaluation kernels.

The package works without the extension (a pure-Python fallback is selected
at import time), so any failure here downgrades to a source-only install
instead of aborting.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/ctsched/_kernels.pyx"],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    # -ffp-contract=off keeps the C arithmetic bit-identical to the
    # pure-Python fallback (no FMA contraction).
    for ext in ext_modules:
        ext.extra_compile_args = ["-O2", "-ffp-contract=off"]
except Exception as exc:  # pragma: no cover - environment dependent
    print(f"ctsched: skipping compiled kernels ({exc})", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
