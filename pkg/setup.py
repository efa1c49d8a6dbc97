## -*- encoding: utf-8 -*-
import os
import sys
from setuptools import setup, Command
from codecs import open # To open the README file with proper encoding


# Get information from separate files (README, VERSION)
def readfile(filename):
    with open(filename,  encoding='utf-8') as f:
        return f.read()

# For the tests
class DoctestCommand(Command):
    description = "run the doctests of the package"
    user_options = []

    def initialize_options(self):
        pass

    def finalize_options(self):
        pass

    def run(self):
        errno = os.system(sys.executable + " -m pytest mcpzones")
        if errno != 0:
            sys.exit(1)

setup(
    name = "mcpzones",
    version = readfile("VERSION").strip(), # the VERSION file is shared with the documentation
    description='Risk zones of multi-circuit poles in electric distribution networks',
    long_description = readfile("README.rst"), # get the long description from the README
    license='GPLv3', # This should be consistent with the LICENCE file
    classifiers=[
      # How mature is this project? Common values are
      #   3 - Alpha
      #   4 - Beta
      #   5 - Production/Stable
      'Development Status :: 3 - Alpha',
      'Intended Audience :: Science/Research',
      'Topic :: Scientific/Engineering :: GIS',
      'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
      'Programming Language :: Python :: 3',
    ], # classifiers list: https://pypi.python.org/pypi?%3Aaction=list_classifiers
    keywords = "gis power-distribution kd-tree clustering risk",
    packages = ['mcpzones'],
    python_requires = '>=3.8',
    install_requires = ['numpy>=1.20', 'scipy>=1.6', 'shapely>=2.0', 'pandas>=1.2'],
    extras_require = {'test': ['pytest'], 'docs': ['sphinx']},
    entry_points = {'console_scripts': ['mcpzones=mcpzones.cli:main']},
    cmdclass = {'test': DoctestCommand} # adding a special setup command for tests
)
