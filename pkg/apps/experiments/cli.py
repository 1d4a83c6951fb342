"""
pivotbench Experiments App - Command-line Dispatch

Maps the pivotbench subcommands onto the workbench management commands:

    pivotbench gen | dim | hist | project | conc-sphere | bounds | build | sweep | orchard-bench

Exit status: 0 on success, 1 on a runtime error, 2 on a usage error.
"""

import logging
import os
import sys
from importlib import import_module

SUBCOMMANDS = {
    'gen': 'gen',
    'dim': 'dim',
    'hist': 'hist',
    'project': 'project',
    'conc-sphere': 'conc_sphere',
    'bounds': 'bounds',
    'build': 'build',
    'sweep': 'sweep',
    'orchard-bench': 'orchard_bench',
}

USAGE = (
    'usage: pivotbench <subcommand> [options]\n\n'
    f'subcommands: {", ".join(SUBCOMMANDS)}\n'
    "run 'pivotbench <subcommand> --help' for the options of one subcommand\n"
)

logger = logging.getLogger(__name__)


def cli_dispatch(argv=None, stdout=None, stderr=None):
    """
    Run one pivotbench subcommand.

    Args:
        argv: arguments after the program name (defaults to sys.argv[1:])

    Returns:
        int: exit status
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    if argv and argv[0] in ('-h', '--help', 'help'):
        stdout.write(USAGE)
        return 0
    if not argv or argv[0] not in SUBCOMMANDS:
        if argv:
            stderr.write(f'pivotbench: unknown subcommand {argv[0]!r}\n')
        stderr.write(USAGE)
        return 2

    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings.local')
    import django
    from django.core.management import get_commands

    django.setup()
    name = SUBCOMMANDS[argv[0]]
    module = import_module(f'{get_commands()[name]}.management.commands.{name}')
    command = module.Command(stdout=stdout, stderr=stderr)
    try:
        command.run_from_argv(['pivotbench', argv[0], *argv[1:]])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    except Exception:
        logger.exception(f'pivotbench {argv[0]} failed')
        stderr.write(f'pivotbench {argv[0]}: unexpected error, see log\n')
        return 1
    return 0
