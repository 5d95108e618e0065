#!/usr/bin/env python

# Copyright (c) 2024 The panel-qte developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

try:  # for pip >= 10
    from pip._internal.req import parse_requirements as parse_reqs
except ImportError:  # for pip <= 9.0.3
    from pip.req import parse_requirements as parse_reqs
from setuptools import setup
from setuptools import find_packages

import panel_qte

install_requires = [getattr(x, 'requirement', None) or str(x.req)
                    for x in parse_reqs('./setup_requirements.txt',
                                        session='setup')]

setup(
    name='panel-qte',
    description='Quantile treatment effects for panel data',
    license='Apache License, Version 2.0',
    version=panel_qte.__version__,
    author='The panel-qte developers',
    keywords=['econometrics', 'quantile regression', 'panel data',
              'treatment effects'],
    install_requires=install_requires,
    python_requires='>=3.8',
    packages=find_packages(exclude=['*.test', '*.test.*', 'test*', 'test']),
    data_files=[],
    package_data={
        'panel_qte': ['schemas/*.yaml', 'schemas/*.json', 'schemas/*.yml'],
    },
    classifiers=[
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    entry_points={
        'console_scripts': ['panel-qte=panel_qte.cli:main'],
    }
)
