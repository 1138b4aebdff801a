"""Builds the optional compiled contact kernel.

The package works without the extension (a pure-Python kernel with identical
arithmetic is selected at import time), so a missing or failing Cython
toolchain only costs speed, never correctness.
"""

import os

from setuptools import setup

PYX = "src/tendbench/simenv/_simcore.pyx"

ext_modules = []
if os.path.exists(PYX):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(PYX, compiler_directives={"language_level": "3"})
        for ext in ext_modules:
            # keep IEEE semantics identical to the pure-Python twin: no FMA
            # contraction, no fast-math reassociation
            ext.extra_compile_args = ["-ffp-contract=off"]
    except ImportError:
        pass

setup(ext_modules=ext_modules)
