# -*- coding: utf-8 -*-
#
# mcpzones documentation build configuration file.

import os
import sys

project = u"Risk zones of multi-circuit poles"
copyright = u'2025, The mcpzones developers'
package_name = 'mcpzones'
authors = u"The mcpzones developers"

sys.path.insert(0, os.path.abspath("../.."))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
]

source_suffix = '.rst'
master_doc = 'index'

version = open("../../VERSION").read().strip()
release = version

# `text` is math
default_role = 'math'
pygments_style = 'sphinx'
autodoc_member_order = 'bysource'

html_theme = 'default'
htmlhelp_basename = package_name + "doc"

latex_documents = [
    ('index', package_name + '.tex', u'Documentation of ' + package_name, authors, 'manual'),
]

man_pages = [
    ('index', package_name, package_name + u" documentation", [authors], 1),
]

texinfo_documents = [
    ('index', package_name, package_name + u" documentation", authors, package_name, project,
     'Miscellaneous'),
]
