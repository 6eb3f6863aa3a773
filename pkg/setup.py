import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; speclab falls back at import
    cythonize = None

ext_modules = []
PYX = "src/speclab/_ckernels.pyx"
if cythonize is not None and os.path.exists(PYX) and not os.environ.get("SPECLAB_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "speclab._ckernels",
                [PYX],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
