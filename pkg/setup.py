import os

import numpy as np
from setuptools import Extension, setup

# IRVSIM_NO_EXT=1 installs the pure-Python backend only.
ext_modules = []
if not os.environ.get("IRVSIM_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "irvsim._kernels._ao",
                ["src/irvsim/_kernels/_ao.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-fcx-limited-range"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
