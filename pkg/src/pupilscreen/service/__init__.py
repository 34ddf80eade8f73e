"""HTTP scoring service: FastAPI endpoints over the core package."""

from .app import app

__all__ = ["app"]
