from setuptools import find_packages, setup

setup(
    name="magblock",
    version="0.1.0",
    description="Magnon and photon blockade simulator for a squeezed cavity magnomechanical system",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    python_requires=">=3.8",
    install_requires=[
        "typer[all]",
        "numpy",
        "scipy",
    ],
    extras_require={"test": ["pytest"]},
    entry_points={
        "console_scripts": [
            "magblock = magblock.cli:app",
        ],
    },
)
