"""Build script for the optional compiled MCMC kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), so any build failure here should not block installation:
run ``pip install -e . --no-build-isolation`` and check
``bdca.mcmc_backend()`` to see which kernel you got.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bdca._mcmc",
                ["src/bdca/_mcmc.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
