"""Build script for the optional compiled summation kernel.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time); the extension only accelerates the
Stern-Brocot trace summation.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the kernel if possible, fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print("twobridge: skipping compiled kernel (%s)" % exc, file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print("twobridge: skipping %s (%s)" % (ext.name, exc), file=sys.stderr)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("twobridge: Cython not available, pure-Python kernel only", file=sys.stderr)
        return []
    return cythonize(
        [
            Extension(
                "twobridge._series_kernel",
                ["src/twobridge/_series_kernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "cdivision": True,
            "boundscheck": False,
            "wraparound": False,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
