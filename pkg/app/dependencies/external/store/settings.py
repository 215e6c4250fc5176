"""
Engine Configuration using Pydantic Settings

Resource ceilings, the resolution store location and logging level, loaded
from environment variables (or a .env file next to the working directory).
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class EngineSettings(BaseSettings):
    """
    Engine configuration loaded from environment variables.

    Environment variables recognised:
    - LOCALRES_STEP_CEILING: reduction steps allowed per division call
    - LOCALRES_TAIL_BUDGET: steps spent on best-effort tail reduction
    - LOCALRES_TAIL_DEGREE: degree bound of the linear solve for reduced tails
    - LOCALRES_DEGREE_CEILING: largest exponent or degree accepted from input
    - LOCALRES_CORS_ORIGINS: JSON list of browser origins for the API
    - LOCALRES_PAIR_CEILING: S-pairs treated per standard-basis completion
    - LOCALRES_STORE_DIR: directory holding saved resolutions
    - LOCALRES_CHECK_IDENTITIES: assert exact identities inside the engine
    - LOCALRES_LOG_LEVEL: logging level used by the CLI
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    step_ceiling: int = Field(
        default=1_000_000,
        ge=1,
        validation_alias="LOCALRES_STEP_CEILING",
        description="Reduction steps per division call before a resource error",
    )

    tail_budget: int = Field(
        default=2_000,
        ge=0,
        validation_alias="LOCALRES_TAIL_BUDGET",
        description="Reduction steps spent on best-effort tail reduction",
    )

    tail_degree: int = Field(
        default=3,
        ge=0,
        validation_alias="LOCALRES_TAIL_DEGREE",
        description="Largest unit and quotient degree tried when solving for a reduced tail",
    )

    degree_ceiling: int = Field(
        default=200,
        ge=1,
        validation_alias="LOCALRES_DEGREE_CEILING",
        description="Largest exponent or total degree accepted from polynomial input",
    )

    cors_origins: list[str] = Field(
        default_factory=list,
        validation_alias="LOCALRES_CORS_ORIGINS",
        description="Origins allowed to call the HTTP API from a browser",
    )

    pair_ceiling: int = Field(
        default=100_000,
        ge=1,
        validation_alias="LOCALRES_PAIR_CEILING",
        description="S-pairs treated in one completion before a resource error",
    )

    store_dir: str = Field(
        default=".localres",
        validation_alias="LOCALRES_STORE_DIR",
        description="Directory of the JSON resolution store",
    )

    check_identities: bool = Field(
        default=True,
        validation_alias="LOCALRES_CHECK_IDENTITIES",
        description="Verify division and homotopy identities on every call",
    )

    log_level: str = Field(
        default="WARNING",
        validation_alias="LOCALRES_LOG_LEVEL",
        description="Level passed to logging.basicConfig by the CLI",
    )


# Single instance imported throughout the app
settings = EngineSettings()
