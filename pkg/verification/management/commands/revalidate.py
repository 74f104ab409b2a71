from pathlib import Path

from verification.certificates import parse_certificate
from verification.claims import revalidate
from verification.management.base import LabCommand
from verification.serializers import load_graph_payload, read_json


class Command(LabCommand):
    help = "Re-check a certificate's witness against the rebuilt graph or a graph file, without searching."

    def add_arguments(self, parser):
        parser.add_argument('certificate', help='Certificate JSON file.')
        parser.add_argument('graph', nargs='?', help='Graph JSON file written by build or export.')
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        try:
            text = Path(options['certificate']).read_text(encoding='utf-8')
        except OSError as exc:
            raise self.usage(f'cannot read {options["certificate"]}: {exc}')
        cert = parse_certificate(text)
        graph_payload = None
        if options.get('graph'):
            try:
                graph_payload = load_graph_payload(read_json(options['graph']))
            except OSError as exc:
                raise self.usage(f'cannot read {options["graph"]}: {exc}')
        self.emit(revalidate(cert, graph_payload), options)
