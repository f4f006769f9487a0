"""Build script: compiles the optional fast orbit kernel.

The extension is a pure speedup; if Cython or a C compiler is missing the
package installs anyway and falls back to the pure-Python kernel at import
(see splitdyn.orbitcore).
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "splitdyn._fastorbit",
                ["src/splitdyn/_fastorbit.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    import sys

    print(f"warning: building without the fast orbit kernel ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
