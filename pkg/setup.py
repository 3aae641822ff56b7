import os

from setuptools import Extension, setup

# DREMNORM_PURE=1 skips the compiled extension; the package then runs on the
# pure-Python kernel fallback selected at import time.
if os.environ.get("DREMNORM_PURE"):
    ext_modules = []
else:
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "dremnorm._kernels._core",
            ["src/dremnorm/_kernels/_core.pyx"],
            # -ffp-contract=off keeps IEEE semantics (no fused multiply-add),
            # so compiled and pure-Python kernels agree to the last few ulps.
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )
    ]
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
