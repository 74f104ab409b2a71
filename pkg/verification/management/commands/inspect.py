from verification.construction import ConstructionParams, Spine, build, landmark, parse_landmark_query
from verification.management.base import LabCommand
from verification.serializers import dumps


class Command(LabCommand):
    help = 'Look up landmarks of G_{h,d,m}: root, S, T, V:j,i, copy:j,i, tree:level,pos, leaf:j, spine:k.'

    def add_arguments(self, parser):
        parser.add_argument('queries', nargs='+', help="Landmark queries such as 'V:2,2' or 'root'.")
        self.add_construction_arguments(parser)
        parser.add_argument('--out', help='Write the answers here instead of stdout.')

    def handle(self, *args, **options):
        cleaned = self.clean_options(options)
        if cleaned['h'] is None:
            raise self.usage('--h, --d and --m are required')
        lg = build(ConstructionParams(cleaned['h'], cleaned['d'], cleaned['m']))
        answers = {}
        for query in options['queries']:
            kind, index = parse_landmark_query(query)
            found = landmark(lg, kind, *index)
            answers[query] = found.path if isinstance(found, Spine) else found
        self.write_result(dumps(answers), options.get('out'))
