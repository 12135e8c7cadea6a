import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "headsplat.rasterizer._kernels",
        ["src/headsplat/rasterizer/_kernels.pyx"],
        extra_compile_args=["-O3", "-fopenmp", "-march=native", "-fno-trapping-math", "-Wno-cpp"],
        extra_link_args=["-fopenmp"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        include_dirs=[np.get_include(), "src/headsplat/rasterizer"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": 3, "embedsignature": True},
    )
)
