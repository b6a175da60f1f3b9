"""Build script: compiles the scheduling-loop extension when Cython is available.

The package works without the extension (a pure-Python loop is selected at
import time), so the build degrades gracefully instead of failing.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ltesched._loop_cy",
                ["src/ltesched/_loop_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
