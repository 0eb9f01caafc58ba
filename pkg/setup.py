"""Build script for the optional compiled kernels.

The package is fully functional without the extension: swde.numerics.backend
falls back to the numpy kernels when `swde.numerics._fastops` cannot be
imported, so a failed extension build degrades performance, not correctness.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that downgrades compiler failures to warnings."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, no cython, ...
            warnings.warn(f"compiled kernels not built ({exc}); pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"failed to build {ext.name} ({exc}); pure-Python fallback will be used")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "swde.numerics._fastops",
        sources=["src/swde/numerics/_fastops.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
