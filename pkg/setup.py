"""Optional compiled kernels; the package falls back to NumPy when they are absent."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("RIS_SECRECY_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("ris_secrecy._kernels._ckernels",
                       ["src/ris_secrecy/_kernels/_ckernels.pyx"],
                       include_dirs=[np.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
