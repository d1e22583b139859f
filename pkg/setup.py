import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernel is optional: without it the package falls back to the
# pure-Python implementation in sflock._kernels_py at import time.
extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "sflock._kernels",
                ["src/sflock/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3, "embedsignature": True},
    )

setup(ext_modules=extensions)
