"""Build script for the optional compiled counting kernel.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time).  To compile in place:

    python setup.py build_ext --inplace

Verify with:

    python -c "from promises._countcore import count_markers; print('OK')"
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("promises._countcore", ["src/promises/_countcore.pyx"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
