from typing import Tuple
from pydantic import Field
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict


class Settings(BaseSettings):
    PROJECT_NAME: str = "Heat Flow Monotonicity Lab"
    VERSION: str = "1.0.0"
    CLI_NAME: str = "heatlab"

    # Symbolic calculus
    DERIVATIVE_CAP: int = Field(8, ge=1, le=12)

    # Quadrature
    QUADRATURE_POINTS: int = Field(200, ge=16)
    TAIL_CUTOFF_RATIO: float = Field(1e-60, gt=0, lt=1)
    QUADRATURE_RELATIVE_TOLERANCE: float = Field(1e-10, gt=0)

    # Sign tables
    ZERO_BAND: float = Field(1e-10, gt=0)
    RICHARDSON_STEP_RATIO: float = Field(1e-2, gt=0)
    RICHARDSON_LEVELS: int = Field(3, ge=1, le=6)

    # Certificate search
    SEARCH_MAX_ITERATIONS: int = Field(20000, ge=1)
    SEARCH_STEP_SIZE: float = Field(0.05, gt=0)
    SEARCH_MAX_DENOMINATOR: int = Field(10**6, ge=1)
    SEARCH_MAX_DENOMINATOR_CEILING: int = Field(10**9, ge=1)
    SEARCH_RESIDUAL_TOLERANCE: float = Field(1e-9, gt=0)

    # Discrete side
    CHROMATIC_EDGE_CAP: int = Field(20, ge=0)

    # Reports
    REPORT_SCHEMA_VERSION: int = 1
    LOG_LEVEL: str = "INFO"

    model_config = SettingsConfigDict(case_sensitive=True)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # init kwargs only; no environment or .env lookup
        return (init_settings,)


settings = Settings()
