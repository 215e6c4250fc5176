"""
API Routers

Exports the versioned routers mounted by main.py.
"""

from .v1 import v1_router

__all__ = ["v1_router"]
