import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "trustlab.abm._kernel",
        ["src/trustlab/abm/_kernel.pyx"],
        include_dirs=[np.get_include()],
        # no fused multiply-add: results must match the Python loop exactly
        extra_compile_args=["-O2", "-ffp-contract=off"],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
