from setuptools import setup, find_namespace_packages
from boundary_dimension.version import Version


setup(name='django-boundary-dimension',
      version=Version('0.1.0').number,
      description='Pressure, critical exponents and box dimensions of countable-branch interval maps '
                  'and parabolic groups',
      long_description=open('README.md').read().strip(),
      long_description_content_type="text/markdown",
      packages=find_namespace_packages(
          include=[
              'boundary_dimension',
              'boundary_dimension.cache',
              'boundary_dimension.management',
              'boundary_dimension.management.commands',
          ]
      ),
      include_package_data=True,
      install_requires=[
          'django~=4.2.7',
          'django-rq~=2.8.1',
          'numpy>=1.24',
          'scipy>=1.10',
          'PyYAML>=6.0',
      ],
      entry_points={
          'console_scripts': [
              'boundary-dimension = boundary_dimension.cli:main',
          ],
      },
      license='MIT License',
      zip_safe=False,
      keywords='Django thermodynamic-formalism box-dimension hyperbolic-geometry',
      classifiers=['Development Status :: 3 - Alpha'])
