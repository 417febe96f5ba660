from setuptools import setup

# The compiled tape evaluator is optional: the package falls back to the
# NumPy executor when the extension is absent (see kmseries.backend).
ext_modules = []
try:
    from setuptools import Extension
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "kmseries._evalcore",
                ["src/kmseries/_evalcore.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
