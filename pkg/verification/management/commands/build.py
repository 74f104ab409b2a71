from verification.construction import ConstructionParams, build
from verification.management.base import LabCommand
from verification.serializers import dumps, labeled_graph_to_dict


class Command(LabCommand):
    help = 'Build G_{h,d,m} and write it with its landmark registry as JSON.'

    def add_arguments(self, parser):
        self.add_construction_arguments(parser)
        parser.add_argument('--out', help='Write the labeled graph here instead of stdout.')

    def handle(self, *args, **options):
        cleaned = self.clean_options(options)
        if cleaned['h'] is None:
            raise self.usage('--h, --d and --m are required')
        lg = build(ConstructionParams(cleaned['h'], cleaned['d'], cleaned['m']))
        self.write_result(dumps(labeled_graph_to_dict(lg)), options.get('out'))
