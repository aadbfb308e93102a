import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("OBDD_PHASE_LAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "obdd_phase_lab._kernels._cimpl",
                    ["src/obdd_phase_lab/_kernels/_cimpl.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # No Cython: the package still works through the pure-Python kernels.
        ext_modules = []

setup(ext_modules=ext_modules)
