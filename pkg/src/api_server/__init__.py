"""
API Server package for the FWF toolkit.

Serves a fitted model file over HTTP.
"""

from .main import app

__all__ = ["app"]
