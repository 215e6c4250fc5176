"""
Store package exports

    from app.dependencies.external.store import settings

The JSON store itself depends on the engine and is imported from
``app.dependencies.external.store.store`` by the job runner.
"""

from .settings import EngineSettings, settings

__all__ = [
    "EngineSettings",
    "settings",
]
