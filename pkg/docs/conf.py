# -*- coding: utf-8 -*-
#
# Django Copula Surv documentation build configuration file.

import os
import sys

import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath('..'))

# -- General configuration ------------------------------------------------

extensions = []

source_suffix = '.rst'

master_doc = 'index'

project = u'Django Copula Surv'
copyright = u'2026, copulasurv developers'
author = u'copulasurv developers'

version = __import__('copulasurv').VERSION
release = version

language = None

exclude_patterns = ['_build']

pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

htmlhelp_basename = 'CopulaSurvdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    (master_doc, 'CopulaSurv.tex', u'Django Copula Surv Documentation',
     author, 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'copulasurv', u'Django Copula Surv Documentation',
     [author], 1)
]
