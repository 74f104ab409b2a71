"""Shared plumbing for the lab's management commands."""

import logging
import sys
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from verification.certificates import Certificate, Verdict, emit_certificate
from verification.exceptions import LabError
from verification.forms import ConstructionParamsForm
from verification.models import CertificateRecord

logger = logging.getLogger('verification.commands')

USAGE_ERROR = 3

VERDICT_EXIT_CODES = {
    Verdict.PASS: 0,
    Verdict.FOUND: 0,
    Verdict.EXHAUSTED_NONE: 0,
    Verdict.FAIL: 1,
    Verdict.BUDGET_EXCEEDED: 2,
}


class LabCommand(BaseCommand):
    """Base for lab commands: option validation, certificate output and exit codes.

    Library errors become usage errors (exit 3); a certificate's verdict sets
    exit_code, which run_from_argv turns into the process status.
    """
    form_class = ConstructionParamsForm
    requires_system_checks = []

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.exit_code = 0

    def add_construction_arguments(self, parser):
        parser.add_argument('--h', type=int, help='Height of the binary tree.')
        parser.add_argument('--d', type=int, help='Length parameter.')
        parser.add_argument('--m', type=int, help='Nesting depth.')

    def add_output_arguments(self, parser):
        parser.add_argument('--out', help='Write the result here instead of stdout.')
        parser.add_argument('--record', action='store_true',
                            help='Also store the certificate in the ledger.')

    def usage(self, message):
        return CommandError(message, returncode=USAGE_ERROR)

    def clean_options(self, options):
        """Validate options through the command's form"""
        form = self.form_class(data=options)
        if not form.is_valid():
            errors = '; '.join(f'{field}: {" ".join(messages)}' if field != '__all__' else ' '.join(messages)
                               for field, messages in form.errors.items())
            raise CommandError(f'invalid options: {errors}', returncode=USAGE_ERROR)
        return form.cleaned_data

    def write_result(self, text, out=None):
        """Write text to --out or stdout; an unwritable path sets exit code 1"""
        if not out:
            self.stdout.write(text, ending='')
            return True
        try:
            Path(out).write_text(text, encoding='utf-8')
        except OSError as exc:
            self.stderr.write(f'cannot write {out}: {exc}')
            self.exit_code = 1
            return False
        logger.info('wrote %s', out)
        return True

    def emit(self, cert: Certificate, options):
        """Write the certificate, record it if asked, and set the exit code from its verdict"""
        self.exit_code = VERDICT_EXIT_CODES[cert.verdict]
        if cert.seed is not None:
            self.stderr.write(f'seed: {cert.seed}')
        out = options.get('out')
        if not out:
            emit_certificate(cert, self.stdout)
        else:
            try:
                with Path(out).open('w', encoding='utf-8') as stream:
                    emit_certificate(cert, stream)
            except OSError as exc:
                self.stderr.write(f'cannot write {out}: {exc}')
                self.exit_code = 1
                return
            logger.info('wrote %s', out)
        if options.get('record'):
            record = CertificateRecord.from_certificate(cert)
            record.save()
            logger.info('recorded certificate %s as ledger entry %d', record.digest[:12], record.pk)

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except LabError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except SystemExit as exc:
            # argparse exits 2 on usage errors; 2 is reserved for BudgetExceeded
            if exc.code == 2:
                sys.exit(USAGE_ERROR)
            raise
        if self.exit_code:
            sys.exit(self.exit_code)
