from setuptools import setup, find_packages

from orbicli import __version__

description = "Numerical lab for orbifold algebras: sectors, spectra, RG flow and partition functions."

install_requirements = [
    "click >= 4.1",
    "configobj >= 5.0.6",
    "humanize >= 0.5.1",
    "cli_helpers >= 2.0.0",
    "numpy >= 1.17",
    "scipy >= 1.3",
]


setup(
    name="orbicli",
    author="Orbicli Core Team",
    version=__version__,
    license="BSD",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"orbicli": ["orbiclirc", "packages/scenarios/*.json"]},
    description=description,
    long_description=open("README.rst").read(),
    install_requires=install_requirements,
    python_requires=">=3.6",
    entry_points="""
        [console_scripts]
        orbicli=orbicli.main:cli
    """,
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: Unix",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.6",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)
