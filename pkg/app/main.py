import click

from app.cli.router import include_commands
from app.core.config import settings
from app.core.logging_config import configure_logging


@click.group(name=settings.CLI_NAME, help=f"{settings.PROJECT_NAME}: heat-flow derivatives, "
             "sum-of-squares certificates and monotonicity scans.")
@click.version_option(settings.VERSION, prog_name=settings.CLI_NAME)
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=settings.LOG_LEVEL, show_default=True)
def cli(log_level: str) -> None:
    configure_logging(log_level)


include_commands(cli)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
