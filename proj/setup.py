"""Builds the pybind11 extension by driving the project's CMake build.

The CMake project stays the single source of truth for sources and flags;
this file only points CMake at the directory where setuptools expects the
finished extension module.
"""

import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        out_dir.mkdir(parents=True, exist_ok=True)
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DSTEREOPIPE_TOOLS=OFF",
                "-DSTEREOPIPE_TESTS=OFF",
                "-DSTEREOPIPE_PYTHON=ON",
                f"-DSTEREOPIPE_PYMOD_OUTPUT_DIR={out_dir}",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "stereopipe_pymod",
             "--parallel"],
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("stereopipe._core")],
    cmdclass={"build_ext": CMakeBuild},
)
