"""Build the optional compiled SSA kernels.

The package works without them: ``parafock.ssa`` falls back to a pure-Python
implementation of the same kernels when the extension cannot be imported.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("PARAFOCK_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "parafock.ssa._kernels",
                    ["src/parafock/ssa/_kernels.pyx"],
                    # no -ffast-math: compiled and pure kernels must agree bit for bit
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
