from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    # optional=True: if no C compiler is available the install still succeeds
    # and the package falls back to the pure-numpy backend at import time.
    ext_modules = cythonize(
        [
            Extension(
                "qksvm._core",
                ["src/qksvm/_core.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
