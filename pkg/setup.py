"""Build script: compiles the optional fast kernels when a toolchain exists.

The package is fully functional without the extension; privmap._backend
falls back to the pure-Python reference implementation at import time.
"""

import os

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "privmap._kernels",
                ["src/privmap/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

if os.environ.get("PRIVMAP_PURE"):
    extensions = []


class BuildFailed(Exception):
    pass


def run_setup(with_ext):
    setup(ext_modules=extensions if with_ext else [])


try:
    run_setup(bool(extensions))
except (SystemExit, Exception):  # compiler missing or broken: install pure
    if not extensions:
        raise
    run_setup(False)
