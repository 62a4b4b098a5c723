"""Zero-coref package."""

__version__ = "0.1.0"
__author__ = "Bryan Kemp"
__email__ = "bryan@kempville.com"
