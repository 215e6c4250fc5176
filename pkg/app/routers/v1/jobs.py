"""
Jobs API Router (v1)

Runs engine commands over HTTP.

Educational Note: Sync endpoints
--------------------------------
The algebra is CPU-bound and never awaits anything, so the handlers are
plain ``def`` functions. FastAPI runs those in its threadpool, which keeps
the event loop free for other requests while a resolution is computed.
"""

import logging

from fastapi import APIRouter, HTTPException, status

from app.dependencies.internal.errors import (
    InternalInconsistencyError,
    JobParseError,
    LocalResError,
    ResourceCeilingError,
    UnitDenominatorError,
)
from app.dependencies.internal.jobs import COMMANDS, JOBLESS_COMMANDS, parse_job, run_job

from ..dependencies import StoreDependency
from .dtos import CommandInfo, CommandListResponse, JobRequest, JobResponse

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/jobs", tags=["Jobs"])


def _status_for(exc: LocalResError) -> int:
    if isinstance(exc, JobParseError):
        return status.HTTP_400_BAD_REQUEST
    if isinstance(exc, ResourceCeilingError):
        return status.HTTP_503_SERVICE_UNAVAILABLE
    if isinstance(exc, (InternalInconsistencyError, UnitDenominatorError)):
        return status.HTTP_500_INTERNAL_SERVER_ERROR
    return status.HTTP_422_UNPROCESSABLE_ENTITY


# ============================================================================
# RUN - Execute one command on a job
# ============================================================================

@router.post(
    "",
    response_model=JobResponse,
    response_model_by_alias=True,
    response_model_exclude_none=True,
    summary="Run a job",
    description="Parse the job text, run one command and return its report",
)
def run_job_endpoint(request: JobRequest, store: StoreDependency) -> JobResponse:
    """
    Runs ``request.command`` on the declarations in ``request.job``.

    A report whose attestations fail is still a 200: the failure is data,
    visible in ``attestations``. Engine errors map to status codes:
    - 400: the job text or an option did not parse
    - 422: the input violates a precondition (unit ideal, bad sizes, ...)
    - 500: an identity that must hold exactly broke
    - 503: a resource ceiling was hit
    """
    try:
        job = None
        if request.job.strip() or request.command not in JOBLESS_COMMANDS:
            job = parse_job(request.job)
        return run_job(
            job,
            request.command,
            request.options,
            oracle=request.oracle,
            meta=request.meta,
            store=store,
        )
    except LocalResError as exc:
        logger.warning("job failed: %s", exc.message)
        raise HTTPException(status_code=_status_for(exc), detail=exc.to_dict())


# ============================================================================
# READ - List the commands
# ============================================================================

@router.get(
    "/commands",
    response_model=CommandListResponse,
    summary="List commands",
    description="Every command with the JSON schema of its options",
)
def list_commands() -> CommandListResponse:
    commands = [
        CommandInfo(
            name=name,
            needs_job=name not in JOBLESS_COMMANDS,
            options=model.model_json_schema(),
        )
        for name, (model, _) in COMMANDS.items()
    ]
    return CommandListResponse(commands=commands, total=len(commands))
