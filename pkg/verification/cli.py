"""In-process entry point: run a lab command and return its exit status.

Exit codes: 0 for Pass, Found and ExhaustedNone; 1 for Fail or an unwritable
output; 2 for BudgetExceeded; 3 for usage errors.
"""

import os
import sys

import django
from django.core.management import call_command, load_command_class
from django.core.management.base import CommandError

USAGE_ERROR = 3
COMMANDS = ('build', 'inspect', 'verify', 'search', 'extract', 'revalidate', 'export', 'ledger')


def run(argv, stdout=None, stderr=None) -> int:
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'coarse_lab.settings')
    django.setup()
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if not argv or argv[0] not in COMMANDS:
        stderr.write(f'usage: <command> [options]; commands: {", ".join(COMMANDS)}\n')
        return USAGE_ERROR
    name, rest = argv[0], list(argv[1:])
    command = load_command_class('verification', name)
    try:
        call_command(command, *rest, stdout=stdout, stderr=stderr)
    except CommandError as exc:
        stderr.write(f'{exc}\n')
        return USAGE_ERROR
    return command.exit_code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
