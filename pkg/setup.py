import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("QCHAR_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("qchar._kernels", ["src/qchar/_kernels.pyx"], extra_compile_args=["-O3"])],
            language_level=3,
        )

setup(ext_modules=ext_modules)
