import click

from app.cli.commands import discrete, flow, information, symbolic


def include_commands(group: click.Group) -> None:
    for module in (symbolic, flow, information, discrete):
        for command in module.commands:
            group.add_command(command)
