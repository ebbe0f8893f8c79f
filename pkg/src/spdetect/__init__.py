"""Plagiarism pair ranking from content, social and web-search evidence."""

__version__ = "0.1.0"
