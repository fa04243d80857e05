import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are optional: the package falls back to the pure
# numpy implementations in conetrace._kernels_py when the extension is
# missing (see conetrace._backend).
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "conetrace._kernels",
                ["src/conetrace/_kernels.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
