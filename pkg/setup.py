import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install, kernels fall back to numpy
    cythonize = None


ext_modules = []
if cythonize is not None and not os.environ.get("PTCOPULA_NO_EXTENSION"):
    ext_modules = cythonize(
        [
            Extension(
                "ptcopula.kernels._ckernels",
                ["src/ptcopula/kernels/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
