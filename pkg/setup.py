"""Optional build of the compiled partition-scan kernel.

The package is fully functional without the extension (a pure-Python twin is
selected at import time). Building the fast lane needs Cython and a C
compiler:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("ska._kernel_fast", ["src/ska/_kernel_fast.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
