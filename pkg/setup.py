"""Build hook: optionally compile the propagation kernel with Cython.

The kernel source ``src/cycfix/_kernels.py`` is valid plain Python; when
Cython is available at build time, a copy is compiled as the sibling module
``cycfix._kernels_c`` and preferred at import.  Without Cython the package
works identically on the interpreted kernel.
"""

import pathlib
import shutil

from setuptools import setup

HERE = pathlib.Path(__file__).parent
KERNEL = HERE / "src" / "cycfix" / "_kernels.py"
COPY = HERE / "src" / "cycfix" / "_kernels_c.py"

ext_modules = []
try:
    from Cython.Build import cythonize

    shutil.copyfile(KERNEL, COPY)
    ext_modules = cythonize(
        ["src/cycfix/_kernels_c.py"],
        language_level=3,
        compiler_directives={"binding": True},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
