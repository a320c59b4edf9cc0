"""Build script: compiles the optional fast kernel extension.

The package works without the extension (a pure NumPy/Python backend is
selected at import time), so a failed or skipped Cython build only costs
speed, never functionality.
"""

import os

from setuptools import setup, Extension

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    if not os.path.exists("src/kpanet/_backend/_ckernels.pyx"):
        raise ImportError("kernel source missing; building pure-Python only")
    ext_modules = cythonize(
        [
            Extension(
                "kpanet._backend._ckernels",
                ["src/kpanet/_backend/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
