"""Build script for the optional compiled kernels.

The extension is marked optional: if Cython or a compiler is missing the
package still installs and the numpy fallback in ``zibayes._kernels_py`` is
used at import time.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build without Cython
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "zibayes._kernels",
                ["src/zibayes/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
