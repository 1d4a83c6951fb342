#!/usr/bin/env python
"""pivotbench command-line entry point."""
import os
import sys


def main():
    """Run one pivotbench subcommand."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings.local')
    try:
        from apps.experiments.cli import cli_dispatch
    except ImportError as exc:
        raise ImportError(
            "Couldn't import pivotbench. Are Django and numpy installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()
