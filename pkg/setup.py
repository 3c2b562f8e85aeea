"""Build script: compiles the optional Cython BFS/adjacency kernels.

The package works without the compiled extension (a numpy fallback is
selected at import time), so compilation failures are non-fatal.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "lqgtiles.kernels._ckernels",
                ["src/lqgtiles/kernels/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    import sys

    print(f"lqgtiles: skipping Cython extension ({exc}); "
          "pure-python kernels will be used", file=sys.stderr)

setup(ext_modules=ext_modules)
