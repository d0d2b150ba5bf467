"""Build hook for the optional compiled kernels.

The package works without them: ``dsets.kernels`` falls back to pure Python
when ``dsets._ckernels`` cannot be imported.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("dsets._ckernels", ["src/dsets/_ckernels.pyx"], include_dirs=[np.get_include()],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
