from verification.claims import VERIFY_CLAIMS
from verification.forms import QIForm
from verification.management.base import LabCommand


class Command(LabCommand):
    help = 'Run one verification claim and emit its certificate.'
    form_class = QIForm

    def add_arguments(self, parser):
        parser.add_argument('claim', choices=sorted(VERIFY_CLAIMS))
        self.add_construction_arguments(parser)
        parser.add_argument('--K', type=int, help='Distance threshold for menger-pair.')
        parser.add_argument('--l', type=int, help='Radius for menger-sep (and the combined menger-pair note).')
        parser.add_argument('--level', type=int, help='Restrict obs33 to one tree level.')
        parser.add_argument('--recursive', action='store_true', help='Check the recursive decomposition (td).')
        parser.add_argument('--avoid-root', action='store_true', dest='avoid_root')
        parser.add_argument('--M', type=int)
        parser.add_argument('--A', type=int)
        parser.add_argument('--map', choices=['identity', 'subdivision'])
        parser.add_argument('--map-file', dest='map_file',
                            help='Vertex map JSON with an "assignment" list, for qi and the lemma sweeps.')
        parser.add_argument('--target', help='Target graph spec of --map-file (default: the host).')
        parser.add_argument('--host', help='Source graph for qi and the lemma sweeps.')
        parser.add_argument('--budget', type=int, help='Search node limit.')
        parser.add_argument('--samples', type=int, help='Switch to sampled mode with this many samples.')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--jobs', type=int, help='Worker threads for candidate sweeps.')
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        cleaned = self.clean_options(options)
        cert = VERIFY_CLAIMS[options['claim']](cleaned)
        self.emit(cert, options)
