"""Build script for the optional compiled Aberth kernel.

The package works without it; import falls back to the gmpy2 kernel.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("PLANAROP_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "planarop._aberth",
                    ["src/planarop/_aberth.pyx"],
                    libraries=["mpfr", "gmp"],
                    extra_compile_args=["-O2"],
                    optional=True,
                )
            ],
            language_level=3,
            quiet=True,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
