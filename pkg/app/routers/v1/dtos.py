"""
Pydantic Schemas for the job endpoints

Requests carry the job text itself (same grammar as a job file) plus the
command to run on it. Responses are the same report documents the CLI
prints, so a client can switch between the two without translation.
"""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from app.dependencies.internal.jobs import ErrorDocument, ReportDocument


# ============================================================================
# Request Schema
# ============================================================================

class JobRequest(BaseModel):
    """A job to run: the declarations plus one command and its options."""

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "job": "ring { vars=[x,y]; center=[x,y]; field=Q; }\nideal I = [x^2 + y^2, x*y, y^3]",
                "command": "twist-check",
                "options": {"r": 2, "cap": 10},
                "oracle": True,
            }
        }
    )

    job: str = Field(
        default="",
        max_length=100_000,
        description="Job text; may be empty for commands that take no declarations (sod)",
    )
    command: str = Field(..., min_length=1, description="Command name, e.g. resolve")
    options: dict[str, Any] = Field(
        default_factory=dict,
        description="Command options; override run directives in the job text",
    )
    oracle: bool = Field(default=False, description="Add independent cross-checks")
    meta: bool = Field(default=False, description="Add a meta block to the report")


# ============================================================================
# Response Schemas
# ============================================================================

JobResponse = ReportDocument


class CommandInfo(BaseModel):
    """One command with the JSON schema of its options."""

    name: str
    needs_job: bool
    options: dict[str, Any]


class CommandListResponse(BaseModel):
    commands: list[CommandInfo]
    total: int


ErrorResponse = ErrorDocument
