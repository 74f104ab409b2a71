from verification.claims import run_extract_kn
from verification.forms import ExtractionForm
from verification.management.base import LabCommand


class Command(LabCommand):
    help = 'Run the K_n extraction pipeline on G_{h,d,m} with the identity map.'
    form_class = ExtractionForm

    def add_arguments(self, parser):
        parser.add_argument('pipeline', choices=['kn'])
        self.add_construction_arguments(parser)
        parser.add_argument('--n', type=int, help='Clique size.')
        parser.add_argument('--M', type=int)
        parser.add_argument('--A', type=int)
        parser.add_argument('--override', action='append', metavar='KEY=VALUE',
                            help='Replace a derived constant (N, q, r, d, h, m, root_radius); repeatable.')
        parser.add_argument('--assume-qi', action='store_true', dest='assume_qi',
                            help='Skip the all-pairs quasi-isometry check.')
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        cleaned = self.clean_options(options)
        self.emit(run_extract_kn(cleaned), options)
