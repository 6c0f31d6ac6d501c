from glob import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

core_sources = sorted(
    s
    for s in glob("src/**/*.cpp", recursive=True)
    if "oracles" not in s  # test-only reference implementations
)

ext = Pybind11Extension(
    "qrl._qrl",
    ["bindings/qrl_bindings.cpp", *core_sources],
    include_dirs=["include", "vendor", "/usr/include/eigen3"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
