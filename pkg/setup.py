# Builds the compiled force kernels. The package also works without them
# (pure-Python fallback selected at import), just much slower.
#
# Normal path: pip install -e . --no-build-isolation
import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "phlayout._kernels_c",
        ["src/phlayout/_kernels_c.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
