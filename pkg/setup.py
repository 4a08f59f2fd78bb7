"""Build script: compiles the optional similarity kernel extension.

The package is fully functional without the extension (a pure-Python
backend is selected at import time), so a failing compile only costs
speed, never correctness.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension

# -ffp-contract=off: the pure-Python backend must produce bitwise-identical
# matrices, so fused multiply-add contraction has to stay disabled.
EXT_COMPILE_ARGS = ["-O3", "-ffp-contract=off"]

extensions = [
    Extension(
        "splmetrics._kernels._simkernel",
        ["src/splmetrics/_kernels/_simkernel.pyx"],
        extra_compile_args=EXT_COMPILE_ARGS,
    )
]


class optional_build_ext(build_ext):
    """Build the extension if possible; fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain, ...
            print(f"warning: similarity kernel not compiled ({exc}); "
                  "using pure-Python backend", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: {ext.name} failed to compile ({exc}); "
                  "using pure-Python backend", file=sys.stderr)


def ext_modules():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(extensions, compiler_directives={"language_level": "3"})


setup(
    ext_modules=ext_modules(),
    cmdclass={"build_ext": optional_build_ext},
)
