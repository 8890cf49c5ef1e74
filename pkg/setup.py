"""Build script: compiles the simulation hot-loop kernel as a C extension.

The package works without the extension (a pure-Python kernel with identical
semantics is selected at import time), so a failed compile downgrades the
install instead of breaking it.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("miniwater._kernel", ["src/miniwater/_kernel.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
