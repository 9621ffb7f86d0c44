from setuptools import find_packages, setup

from lorentz_zeta import __version__

with open('requirements.in') as requirements:
    install_requires = [line.strip() for line in requirements if line.strip() and line.strip() != 'pytest']

setup(
    name='lorentz-zeta',
    version=__version__,
    license='GPL-3.0-or-later',
    packages=find_packages(include=['lorentz_zeta', 'lorentz_zeta.*']),
    python_requires='>=3.10',
    install_requires=install_requires,
    entry_points={'console_scripts': ['lorentz-zeta = lorentz_zeta.main:cli']}
)
