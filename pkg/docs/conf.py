# Sphinx configuration for the zero-coref documentation.

import os
import sys

sys.path.insert(0, os.path.abspath("../src"))

project = "zero-coref"
copyright = "2026, Bryan Kemp"
author = "Bryan Kemp"
release = "0.1.0"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.intersphinx",
]

exclude_patterns = ["_build"]

html_theme = "sphinx_rtd_theme"

# Docstrings are Google style.
napoleon_numpy_docstring = False

autodoc_default_options = {
    "members": True,
    "member-order": "bysource",
}
autodoc_typehints = "description"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "pydantic": ("https://docs.pydantic.dev/latest/", None),
}
