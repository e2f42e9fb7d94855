# Sphinx configuration for the barycentric-treecode documentation.
import os
import sys

sys.path.insert(0, os.path.abspath('..'))

from barycentric_treecode import __version__  # noqa: E402

project = 'barycentric-treecode'
copyright = '2026, The barycentric-treecode developers'
author = 'The barycentric-treecode developers'
release = __version__

extensions = ['sphinx.ext.autodoc', 'sphinx_rtd_theme']
autodoc_member_order = 'bysource'
templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

html_theme = 'sphinx_rtd_theme'
master_doc = 'index'
