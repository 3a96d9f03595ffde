from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [line.strip() for line in fh if line.strip() and not line.startswith("#")]

setup(
    name="lsrbf-toolkit",
    version="1.0.0",
    author="",
    author_email="",
    description="Least-squares RBF approximation with truncated factorizations, scaling predictors and Poisson collocation",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Operating System :: OS Independent",
    ],
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    python_requires=">=3.9",
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "lsrbf=scripts.runners.run_lsrbf:main",
        ],
    },
    keywords="rbf radial-basis-functions least-squares tsvd approximation collocation poisson",
    include_package_data=True,
    package_data={
        "": ["*.yaml", "*.cfg", "*.md"],
    },
)
