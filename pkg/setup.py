"""Build script for the compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed extension build only costs speed, not features.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "podoquant.kernels._core",
        ["src/podoquant/kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
