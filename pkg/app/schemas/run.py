from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from app.core.config import settings

OutputFormat = Literal["json", "csv", "text"]


class RunConfig(BaseModel):
    subcommand: str
    inputs: List[Path] = Field(default_factory=list)
    output_dir: Optional[Path] = None
    formats: List[OutputFormat] = Field(default_factory=lambda: ["text"])
    parameters: Dict[str, Any] = Field(default_factory=dict)
    timestamp: bool = True

    @field_validator('inputs')
    @classmethod
    def resolve_inputs(cls, v):
        return [p.expanduser().resolve() for p in v]

    @field_validator('output_dir')
    @classmethod
    def resolve_output_dir(cls, v):
        return v.expanduser().resolve() if v is not None else None

    @field_validator('formats')
    @classmethod
    def validate_formats(cls, v):
        if not v:
            raise ValueError('At least one output format is required')
        return list(dict.fromkeys(v))


class ReportEnvelope(BaseModel):
    schema_version: int = Field(default_factory=lambda: settings.REPORT_SCHEMA_VERSION, alias="schemaVersion")
    kind: str
    tool: str = Field(default_factory=lambda: f"{settings.CLI_NAME} {settings.VERSION}")
    generated_at: Optional[datetime] = Field(None, alias="generatedAt")
    config: Dict[str, Any] = Field(default_factory=dict)
    report: Any = None

    model_config = {"populate_by_name": True}

    @classmethod
    def wrap(cls, kind: str, report: Any, run: RunConfig) -> "ReportEnvelope":
        return cls(
            kind=kind,
            generated_at=datetime.now(timezone.utc) if run.timestamp else None,
            config=run.model_dump(mode="json", exclude={"timestamp"}),
            report=report,
        )
