from setuptools import find_packages, setup

with open("requirements.txt") as handle:
    requirements = [line.strip() for line in handle if line.strip()]

setup(
    name="treealg",
    version="0.1.0",
    description="Correlation-function co-operad, flat connections and tree functor checks",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.7",
    install_requires=requirements,
    entry_points={"console_scripts": ["treealg=treealg.cli:main"]},
)
