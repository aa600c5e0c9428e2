"""``boundary-dimension <subcommand> [--config FILE] [--out DIR] ...``

Each subcommand is a management command of the app; this entry point configures Django in code
and dispatches to it. Exit codes: 0 success or inconclusive, 1 failed assertion, 2 usage or config error.
"""
import sys
from typing import List, Optional

import django
from django.conf import settings
from django.core.management import execute_from_command_line


SUBCOMMANDS = {
    'pressure': 'pressure',
    's-infinity': 's_infinity',
    'bowen': 'bowen',
    'boxdim': 'boxdim',
    'gaps': 'gaps',
    'orbit': 'orbit',
    'poincare': 'poincare',
    'counting': 'counting',
    'verify-main': 'verify_main',
    'verify-hdim': 'verify_hdim',
    'selftest': 'selftest',
}

USAGE = (
    'usage: boundary-dimension {{{}}} '.format(','.join(SUBCOMMANDS))
    + '[--config FILE] [--out DIR] [--threads N] [--tol TOL] [--truncation M]'
)


def configure():
    if settings.configured:
        return
    from boundary_dimension import cli_settings
    settings.configure(**{name: getattr(cli_settings, name) for name in dir(cli_settings) if name.isupper()})
    django.setup()


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ('-h', '--help'):
        print(USAGE, file=sys.stdout if argv else sys.stderr)
        return 0 if argv else 2
    name = argv[0]
    if name not in SUBCOMMANDS:
        print(f'Unknown subcommand {name!r}\n{USAGE}', file=sys.stderr)
        return 2
    configure()
    try:
        execute_from_command_line(['boundary-dimension', SUBCOMMANDS[name], *argv[1:]])
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    return 0
