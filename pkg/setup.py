"""Build the optional Cython GF(2) kernel.

The package works without it; ``conleyls.gf2`` falls back to a pure
Python implementation when the extension cannot be imported.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CONLEYLS_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "conleyls._gf2_ext",
                    ["src/conleyls/_gf2_ext.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
