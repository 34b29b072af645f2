import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off keeps a*b+c unfused so the compiled and pure-Python
# backends agree bit-for-bit.
flags = ["-O3", "-ffp-contract=off", "-fno-fast-math"]
if os.environ.get("CHAOSPSO_PORTABLE", "") in ("", "0"):
    flags.append("-march=native")

ext = Extension(
    "chaospso._kernels",
    ["src/chaospso/_kernels.pyx"],
    include_dirs=[np.get_include(), "src/chaospso"],
    extra_compile_args=flags,
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], compiler_directives={"language_level": "3"}))
