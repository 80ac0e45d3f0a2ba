from setuptools import Extension, setup

# The compiled kernel is optional: the package falls back to the pure-Python
# twin in pottsforge._kernels_py when the extension is absent.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pottsforge._kernels",
                ["src/pottsforge/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
