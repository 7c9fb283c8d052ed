#
# setup.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
""" hdgstokes package information.
"""
from setuptools import setup, find_packages


def _load_requires_from_file(filepath):
    """ Read a package list from a given file path.

    Comments and blank lines are skipped.

    Args:
      filepath: file path of the package list.

    Returns:
      a list of package names.
    """
    with open(filepath) as fp:
        lines = [line.split('#', 1)[0].strip() for line in fp.readlines()]
    return [line for line in lines if line]


setup(
    name='hdgstokes',
    version='0.1.0',
    description=(
        'Relaxed H(div)-conforming hybrid discontinuous Galerkin '
        'discretizations of the Stokes problem.'
    ),
    long_description="""The hdgstokes package discretizes the Stokes problem with hybrid discontinuous Galerkin methods built on a hierarchical H(div)-conforming basis of triangles (and of tetrahedra for the reference basis checks).

It provides:

- fully and relaxed H(div)-conforming velocity spaces with tangential facet unknowns,

- static condensation of the element local unknowns,

- the pressure robust variant based on an averaging reconstruction of the test functions,

- convergence studies, viscosity sweeps and cost counts from the command line.""",
    author="The hdgstokes developers",
    packages=find_packages(exclude=["tests"]),
    install_requires=_load_requires_from_file("requirements.txt"),
    entry_points={
        'console_scripts': ['hdgstokes=hdgstokes.cli:main'],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Natural Language :: English",
        "Programming Language :: Python :: 3",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics"
    ],
    test_suite='tests.suite',
    license="MIT"
)
