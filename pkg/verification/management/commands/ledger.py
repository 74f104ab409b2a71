from verification.management.base import LabCommand
from verification.models import CertificateRecord


class Command(LabCommand):
    help = 'List certificates recorded with --record.'

    def add_arguments(self, parser):
        parser.add_argument('--claim', help='Only this claim.')
        parser.add_argument('--limit', type=int, default=20)

    def handle(self, *args, **options):
        records = CertificateRecord.objects.all()
        if options.get('claim'):
            records = records.filter(claim=options['claim'])
        if options['limit'] < 1:
            raise self.usage('--limit must be positive')
        for record in records[:options['limit']]:
            self.stdout.write(f'{record.created_at:%Y-%m-%d %H:%M:%S} {record.claim:<22} '
                              f'{record.verdict:<16} {record.digest[:12]} {record.params}')
