"""Builds the ltpg_py extension by delegating to cargo.

Plain setuptools stand-in for setuptools-rust: compiles the cdylib in
release mode and copies it to the location setuptools expects.
"""

import shutil
import subprocess
from pathlib import Path

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension

HERE = Path(__file__).resolve().parent


class CargoExtension(Extension):
    def __init__(self, name: str, manifest: Path):
        super().__init__(name, sources=[])
        self.manifest = manifest


class CargoBuildExt(build_ext):
    def build_extension(self, ext: CargoExtension) -> None:
        subprocess.run(
            ["cargo", "build", "--release", "--manifest-path", str(ext.manifest)],
            check=True,
        )
        # the workspace target directory sits two levels up from the crate
        built = ext.manifest.parent / ".." / ".." / "target" / "release" / "libltpg_py.so"
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built.resolve(), dest)


setup(
    ext_modules=[CargoExtension("ltpg_py", HERE / "Cargo.toml")],
    cmdclass={"build_ext": CargoBuildExt},
)
