# Sphinx configuration of the DynRank documentation.
# Options: https://www.sphinx-doc.org/en/master/usage/configuration.html

import datetime
import os
import sys

sys.path.insert(0, os.path.abspath('../..'))

from dynrank import __version__  # noqa: E402

project = 'DynRank'
copyright = '2024-{}, DynRank developers'.format(datetime.datetime.now().year)
author = 'DynRank developers'
release = __version__

extensions = [
    'sphinx_rtd_theme',
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.viewcode',
    'sphinx.ext.mathjax',
    'autodocsumm',
    'sphinx.ext.autosummary',
]

templates_path = ['_templates']
exclude_patterns = []

html_theme = 'sphinx_rtd_theme'

# docstrings mix Google style sections and reST field lists
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_include_init_with_doc = False
napoleon_use_ivar = True
napoleon_use_param = True
napoleon_use_rtype = True

autodoc_default_options = {
    'members': True,
    'undoc-members': False,
    'show-inheritance': True,
    'member-order': 'bysource',
}
autoclass_content = 'class'
autodoc_typehints = 'signature'
