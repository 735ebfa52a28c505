"""Build the optional Cython kernels; the package falls back to numpy when they are absent."""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PIPEDREAMS_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "pipedreams._kernels",
                    ["src/pipedreams/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
