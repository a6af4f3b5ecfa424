"""Build script for the optional compiled solver kernels.

The package works without the extension (a pure numpy/Python fallback is
selected at import time), but the compiled kernels make the annealing and
exhaustive-search inner loops orders of magnitude faster. See
benchmarks/kernel_bench.py for a comparison.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - source-only install
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "qubofs._native",
                ["src/qubofs/_native.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
