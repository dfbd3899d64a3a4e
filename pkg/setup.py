import os

from setuptools import Extension, setup

# The compiled sieve kernel is optional: sigmalab.kernels falls back to the
# pure-Python implementation when the extension is absent or when
# SIGMA_LAB_PURE=1 is set at build time.
ext_modules = []
if os.environ.get("SIGMA_LAB_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "sigmalab.kernels._sieve_ext",
                    ["src/sigmalab/kernels/_sieve_ext.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
