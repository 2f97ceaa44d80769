import numpy as np
from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the pure
# NumPy implementations in labpulse._kernels_py when the extension is
# missing.  -ffp-contract=off keeps the C arithmetic bit-compatible with
# the fallback (no FMA contraction).
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "labpulse._kernels",
                ["src/labpulse/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
