"""Build the optional compiled kernels.

If Cython or a C compiler is missing the package still installs; the
pure-Python kernels are used at import time instead.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("BIHOMLC_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("bihomlc._ckernels", ["src/bihomlc/_ckernels.pyx"], extra_compile_args=["-O2"])],
            compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False},
            quiet=True,
        )

setup(ext_modules=ext_modules)
