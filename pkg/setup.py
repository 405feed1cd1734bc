from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="plurihull",
    version="1.0.0",
    description=(
        "Numerical workbench for extremal functions, projective hulls and boundary extension tests."
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="MIT",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    keywords=[
        "plurihull",
        "pluripotential",
        "extremal function",
        "projective hull",
        "polynomial hull",
        "linear programming",
        "cli",
    ],
    packages=find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.12",
    install_requires=[
        "click>=8.4.1,<9.0",
        "pyyaml>=6.0.3,<7.0",
        "python-dotenv>=1.2.2,<2.0",
        "numpy>=2.1,<3.0",
    ],
    entry_points={
        "console_scripts": [
            "plurihull=plurihull.cli:main",
        ],
    },
)
