# Sphinx configuration for the mpst_model documentation.
#
# Build with: sphinx-build -b html docs docs/_build

import os
import sys

dirname = os.path.dirname(__file__)
projdir = os.path.dirname(dirname)
sys.path.insert(0, os.path.join(projdir, 'src'))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',  # Supports google-style docstrings.
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'mpst_model'
author = 'mpst-model contributors'
copyright = '2024, %s' % author

release = open(os.path.join(projdir, 'VERSION')).read().strip()
version = '.'.join(release.split('.')[:2])

exclude_patterns = ['_build']
pygments_style = 'sphinx'
autodoc_member_order = 'bysource'

html_theme = 'alabaster'
html_static_path = ['_static']
htmlhelp_basename = '%sdoc' % project

man_pages = [
    (master_doc, 'mpst', 'Multiparty session protocol checker', [author], 1)
]
