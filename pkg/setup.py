import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # build without the compiled kernels
    cythonize = None

extensions = []
if cythonize is not None and not os.environ.get("ZCURV_NO_EXT"):
    extensions = cythonize(
        [
            Extension(
                "zcurv.numeric._kernels",
                ["src/zcurv/numeric/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # no FMA contraction, so results match the pure-Python kernels bit for bit
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
