"""Compile the `arctic-py` crate with cargo and ship the resulting cdylib
as the top-level `arctic` extension module.

Used because the Rust-aware build backends are not assumed to be present;
plain setuptools plus a cargo toolchain is enough.
"""

import shutil
import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).resolve().parent


class CargoBuildExt(build_ext):
    def build_extension(self, ext):
        subprocess.run(
            ["cargo", "build", "--release", "-p", "arctic-py"],
            cwd=ROOT,
            check=True,
        )
        out_dir = ROOT / "target" / "release"
        built = next(
            p
            for p in ("libarctic.so", "libarctic.dylib", "arctic.dll")
            if (out_dir / p).exists()
        )
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(out_dir / built, dest)


setup(
    ext_modules=[Extension("arctic", sources=[])],
    cmdclass={"build_ext": CargoBuildExt},
)
