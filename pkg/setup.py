"""Build script for the optional compiled kernel extension.

The package works without the extension (a numpy/scipy fallback is selected
at import time), so a failed native build degrades to the slow path instead
of breaking the install.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "swarmcover.kernels._native",
                ["src/swarmcover/kernels/_native.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # -ffp-contract=off keeps float results reproducible against
                # the pure-python kernels (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"swarmcover: skipping native kernel build ({exc}); "
          "pure-python kernels will be used")

setup(ext_modules=ext_modules)
