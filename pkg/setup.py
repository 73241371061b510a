#!/usr/bin/env python
#
# Copyright 2026 the Cruzamento developers
#
# This file is part of Cruzamento.
#
# Cruzamento is free software: you can redistribute it and/or modify it under
# the terms of the GNU Lesser General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option) any
# later version.
#
# Cruzamento is distributed in the hope that it will be useful, but WITHOUT ANY
# WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR
# A PARTICULAR PURPOSE. See the GNU Lesser General Public License for more
# details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with Cruzamento.  If not, see <http://www.gnu.org/licenses/>.
from setuptools import setup, find_packages

setup(
    name="cruzamento",
    version="0.1.a1",
    author='The Cruzamento developers',
    description='Traffic scenario generation with corner cases',
    license='LGPLv3',

    packages=find_packages(),
    package_data={
        'cruzamento': ['prompts/*.txt', 'data/*.csv']
    },
    python_requires='>=3.10',
    install_requires=[
        'numpy',
        'torch',
        'shapely>=2',
        'networkx',
        'opencv-python-headless',
        'requests',
        'tomli; python_version < "3.11"',
    ],
    entry_points={
        'console_scripts': ['cruzamento = cruzamento.cli:main']
    },

    test_suite='cruzamento_tests',
    test_loader='unittest:TestLoader',
    tests_require=['inelegant']
)
