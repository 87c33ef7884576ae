"""Build the optional compiled kernels.

The extension links against the MPFR/MPC/GMP shared objects that ship inside
the installed gmpy2 wheel, so the compiled code and gmpy2 share one allocator
and one set of number objects. If anything about that fails the package is
still installed and falls back to the pure-Python kernels.
"""
import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """A compiler or linker failure leaves the pure-Python kernels in charge."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"compiled kernels not built: {exc}", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"compiled kernels not built: {exc}", file=sys.stderr)


def _gmpy2_extension():
    try:
        import gmpy2
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        print(f"skipping compiled kernels: {exc}", file=sys.stderr)
        return []

    pkg_dir = os.path.dirname(gmpy2.__file__)
    include_dirs = [pkg_dir]
    link_args = []
    libraries = []
    bundled = os.path.join(os.path.dirname(pkg_dir), "gmpy2.libs")
    if os.path.isdir(bundled):
        # manylinux wheels vendor the libraries under mangled names
        wanted = ("libmpc", "libmpfr", "libgmp")
        found = sorted(
            os.path.join(bundled, f)
            for f in os.listdir(bundled)
            if f.startswith(wanted) and ".so" in f
        )
        link_args = found + ["-Wl,-rpath," + bundled]
    else:
        libraries = ["mpc", "mpfr", "gmp"]

    ext = Extension(
        "jacobi_jost._ckernels",
        ["src/jacobi_jost/_ckernels.pyx"],
        include_dirs=include_dirs,
        libraries=libraries,
        extra_link_args=link_args,
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=_gmpy2_extension(), cmdclass={"build_ext": OptionalBuildExt})
