#
# Configuration file for the Sphinx documentation builder.
#
# This file does only contain a selection of the most common options. For a
# full list see the documentation:
# http://www.sphinx-doc.org/en/master/config

# -- Path setup --------------------------------------------------------------

from os.path import join, abspath, dirname
import sys

sys.path.insert(
    0,
    abspath(
        join(
            dirname(__file__),
            '..',
            '..',
            'src',
        )
    )
)

import ts_pricing  # noqa:E402

# -- Project information -----------------------------------------------------

project = 'ts-pricing'
copyright = 'ts-pricing Authors'
author = 'the ts-pricing developers'

_version_bits = ts_pricing.__version__.split('.')
# The short X.Y version
version = _version_bits[0] + '.' + _version_bits[1]
# The full version, including alpha/beta/rc tags
release = ts_pricing.__version__


# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.todo',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
    'sphinx.ext.intersphinx',
    'sphinx.ext.doctest',
    'IPython.sphinxext.ipython_console_highlighting',
    'sphinx_issues',
    'sphinx_rtd_theme',
]

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

language = "en"

exclude_patterns = ['autogenerated/*.rst']

pygments_style = 'sphinx'


# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'

html_theme_options = {
}

htmlhelp_basename = 'ts_pricingdoc'


# -- Options for manual page output ------------------------------------------

man_pages = [
    (master_doc, 'ts-pricing', 'ts-pricing Documentation',
     [author], 1)
]


# -- Options for doctest -----------------------------------------------------
# Docstrings in the API reference are tested with pytest --doctest-modules;
# only run explicit doctest directives here.
doctest_test_doctest_blocks = ''

doctest_global_setup = '''
import numpy as np
'''

# -- Options for todo extension ----------------------------------------------

todo_include_todos = True

intersphinx_mapping = {
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'python': ('https://docs.python.org/3.10', None),
}

linkcheck_ignore = [
    r'^http://localhost.*',
]
