from verification.claims import SEARCHES
from verification.forms import SearchOptionsForm
from verification.management.base import LabCommand


class Command(LabCommand):
    help = 'Budgeted search for a fat model, a far path system, or a path-connectivity witness.'
    form_class = SearchOptionsForm

    def add_arguments(self, parser):
        parser.add_argument('kind', choices=sorted(SEARCHES))
        parser.add_argument('--host', help='grid:R,C | cycle:N | path:N | complete:N | gdm:h,d,m')
        parser.add_argument('--pattern', help='Pattern graph for fat-model, same grammar as --host.')
        parser.add_argument('--K', type=int)
        parser.add_argument('--l', type=int, help='Number of paths for path-system.')
        parser.add_argument('--n', type=int, help='Subset size bound for path-connected.')
        parser.add_argument('--a', help='Comma-separated vertex ids.')
        parser.add_argument('--b', help='Comma-separated vertex ids.')
        parser.add_argument('--w', help='Comma-separated vertex ids.')
        parser.add_argument('--budget', type=int, help='Search node limit.')
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        cleaned = self.clean_options(options)
        cert = SEARCHES[options['kind']](cleaned)
        self.emit(cert, options)
