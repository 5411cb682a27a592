"""HTTP service wrapping the toolkit."""

from .app import create_app, serve
from .store import ModelStore

__all__ = ["ModelStore", "create_app", "serve"]
