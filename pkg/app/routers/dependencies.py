# Dependencies shared by the routers.
# The store is injected so tests can point it at a temporary directory
# through app.dependency_overrides.

from typing import Annotated

from fastapi import Depends

from app.dependencies.external.store.store import ResolutionStore


def get_store() -> ResolutionStore:
    return ResolutionStore()


StoreDependency = Annotated[ResolutionStore, Depends(get_store)]
