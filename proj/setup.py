"""setuptools bridge that builds the pybind11 extension through CMake.

The CMake project is the single source of truth for compilation flags and
sources; this file only teaches setuptools to invoke it and to place the
resulting module inside the ``ionlight`` package.
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str) -> None:
        super().__init__(name, sources=[])
        self.source_dir = str(Path(__file__).resolve().parent)


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        ext_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        import pybind11

        configure = [
            "cmake",
            ext.source_dir,
            "-DCMAKE_BUILD_TYPE=Release",
            "-DIONLIGHT_BUILD_PYTHON=ON",
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={ext_dir}",
            f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        subprocess.run(configure, cwd=build_dir, check=True)
        subprocess.run(
            [
                "cmake",
                "--build",
                ".",
                "--target",
                "_ionlight",
                "-j",
                str(os.cpu_count() or 2),
            ],
            cwd=build_dir,
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("ionlight._ionlight")],
    cmdclass={"build_ext": CMakeBuild},
)
