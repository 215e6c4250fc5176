"""
localres API - Main Application

HTTP front end of the engine. The same job text and commands as the CLI,
posted to /api/v1/jobs.

Educational Note: Application Lifecycle
----------------------------------------
1. Application starts → lifespan events run
2. Engine settings are loaded and the store directory is created
3. Application is ready to receive requests
4. Each request parses its own job; nothing is shared between requests
   except the on-disk resolution store
"""

from contextlib import asynccontextmanager
import logging
from pathlib import Path

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.dependencies.external.store import settings
from app.routers import v1_router

logger = logging.getLogger(__name__)


# ============================================================================
# Lifespan Event Handler
# ============================================================================

@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Application lifespan handler.

    Startup:
    - Configure logging from the engine settings
    - Make sure the resolution store directory exists

    Shutdown:
    - Nothing to release; the store is plain files
    """
    print("🚀 Starting up...")
    logging.basicConfig(level=settings.log_level.upper())
    print("📁 Preparing resolution store...")
    Path(settings.store_dir).mkdir(parents=True, exist_ok=True)
    print(f"✅ Store ready at {settings.store_dir}")

    yield

    print("👋 Shutting down...")


# ============================================================================
# Create FastAPI Application
# ============================================================================

app = FastAPI(
    title="localres API",
    description="Local standard bases, free resolutions and matrix factorizations",
    version="0.1.0",
    lifespan=lifespan,
)


# ============================================================================
# CORS Middleware
# ============================================================================
# Browser origins come from LOCALRES_CORS_ORIGINS; none are allowed by default

if settings.cors_origins:
    app.add_middleware(
        CORSMiddleware,
        allow_origins=settings.cors_origins,
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )


# ============================================================================
# Include Routers
# ============================================================================
# All v1 routes will be prefixed with /api/v1

app.include_router(
    v1_router,
    prefix="/api/v1",
    tags=["v1"],
)


# ============================================================================
# Health Check Endpoint
# ============================================================================

@app.get("/health", tags=["Health"])
async def health_check():
    """Returns a simple status to verify the API is running."""
    return {"status": "healthy", "message": "localres API is running!"}
