import os

from setuptools import setup

ext_modules = []
if not os.environ.get("QDL_NO_EXTENSION"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        print("Cython/numpy unavailable: installing the pure-Python fallback only")
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "qdl._kernels",
                    ["src/qdl/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3", "-fcx-limited-range"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
