# -*- coding: utf-8 -*-
#
# hdgstokes documentation build configuration file.
#
import os
import sys
sys.path.append(os.path.abspath('../../'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'hdgstokes'
copyright = u'2017, The hdgstokes developers'
author = u'The hdgstokes developers'

version = u'0.1.0'
release = u'0.1.0'

exclude_patterns = []
pygments_style = 'sphinx'
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = ['_static']
htmlhelp_basename = 'hdgstokesdoc'

# -- Options for other outputs --------------------------------------------

latex_documents = [
    (master_doc, 'hdgstokes.tex', u'hdgstokes Documentation',
     author, 'manual'),
]

man_pages = [
    (master_doc, 'hdgstokes', u'hdgstokes Documentation', [author], 1)
]
