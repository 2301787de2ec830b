#!/usr/bin/env python

from setuptools import setup

setup(
    name="prooflist",
    version="0.1.0",
    description="Certifiably optimal rule lists by branch-and-bound",
    packages=["prooflist"],
    package_data={"prooflist": ["default_config.json"]},
    include_package_data=True,
    python_requires=">=3.10",
    install_requires=["numpy", "pandas"],
    extras_require={"dev": ["flake8"], "test": ["pytest", "pytest-cov"]},
    entry_points={"console_scripts": ["prooflist = prooflist.cli:main"]},
)
