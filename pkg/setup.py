from setuptools import Extension, setup

import numpy as np

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "scenariomine.geom._kernels",
                ["src/scenariomine/geom/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython: the package falls back to the pure-numpy kernels at import.
    ext_modules = []

setup(ext_modules=ext_modules)
