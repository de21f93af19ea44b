"""Build hook for the optional compiled core.

The package is fully functional without the extension; `anisofield._backend`
falls back to the NumPy implementation when the compiled module is absent.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/anisofield/_core_cy.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
