"""Build script for the optional compiled kernel.

The package is fully functional without the extension (a pure-Python
backend is selected at import time), so a missing compiler or Cython only
costs speed, never functionality.

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup


def extension_modules():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "cascadegate._kernel._fastbuf",
        ["src/cascadegate/_kernel/_fastbuf.pyx"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extension_modules())
