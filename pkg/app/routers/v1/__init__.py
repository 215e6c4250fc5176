"""
API Version 1 Router

Aggregates the v1 endpoints into a single router; main.py mounts it
under /api/v1.
"""

from fastapi import APIRouter

from .jobs import router as jobs_router

v1_router = APIRouter()

v1_router.include_router(jobs_router)

__all__ = ["v1_router"]
