__version__ = '0.1.0'  # Remember to also change in pyproject.toml
__author__ = 'Barycentric Treecode Developers'
