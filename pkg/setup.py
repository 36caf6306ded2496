"""
Setup configuration for robustik.
"""
from setuptools import setup, find_packages

with open("requirements.txt") as f:
    requirements = [line.strip() for line in f if line.strip() and not line.startswith("#")]

dev_tools = ("pytest", "pytest-cov", "black", "flake8", "mypy")
runtime = [r for r in requirements if r.split("==")[0] not in dev_tools]

setup(
    name="robustik",
    version="0.1.0",
    description="Robust inverse-kinematics pair selection for dual-arm peg-in-hole assembly",
    packages=find_packages(exclude=("tests", "tests.*")),
    include_package_data=True,
    install_requires=runtime,
    extras_require={"dev": [r for r in requirements if r not in runtime]},
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering",
    ],
    entry_points={
        "console_scripts": [
            "robustik=robustik.cli:main",
        ],
    },
)
