"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a pure NumPy
backend is selected at import time); building it just makes the hot
kernels fast. Set VITALNODES_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, broken toolchain, ...
            print(f"warning: compiled kernels skipped ({exc}); "
                  "using the pure-Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "using the pure-Python backend")


ext_modules = []
if not os.environ.get("VITALNODES_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "vitalnodes._kernels._ckernels",
                    ["src/vitalnodes/_kernels/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        print("warning: Cython not available; using the pure-Python backend")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
