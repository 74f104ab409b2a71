from verification.claims import labeled, parse_graph_spec, vertex_map
from verification.forms import QIForm
from verification.management.base import LabCommand
from verification.serializers import (
    dumps,
    export_dot,
    graph_to_dict,
    labeled_graph_to_dict,
    td_to_dict,
    vertex_map_to_dict,
)
from verification.treedec import build_flat, build_recursive


class Command(LabCommand):
    help = ('Export G_{h,d,m} (or a --host graph) as DOT or JSON, its tree-decomposition as JSON, '
            'or a vertex map on it as JSON.')
    form_class = QIForm

    def add_arguments(self, parser):
        self.add_construction_arguments(parser)
        parser.add_argument('--host', help='grid:R,C | cycle:N | path:N | complete:N instead of G_{h,d,m}.')
        parser.add_argument('--format', choices=['dot', 'json', 'td', 'map'], default='dot')
        parser.add_argument('--recursive', action='store_true',
                            help='With --format td, export the recursive decomposition.')
        parser.add_argument('--map', choices=['identity', 'subdivision'],
                            help='With --format map, the map to write (default identity).')
        parser.add_argument('--out', help='Write here instead of stdout.')

    def handle(self, *args, **options):
        cleaned = self.clean_options(options)
        fmt = options['format']
        if cleaned['host']:
            if fmt == 'td':
                raise self.usage('--format td needs --h, --d and --m')
            g = parse_graph_spec(cleaned['host'])
            if fmt == 'map':
                text = dumps(vertex_map_to_dict(vertex_map(cleaned['map'], g)))
            else:
                text = export_dot(g) if fmt == 'dot' else dumps(graph_to_dict(g))
        else:
            lg = labeled(cleaned)
            if fmt == 'dot':
                text = export_dot(lg)
            elif fmt == 'json':
                text = dumps(labeled_graph_to_dict(lg))
            elif fmt == 'map':
                text = dumps(vertex_map_to_dict(vertex_map(cleaned['map'], lg.graph)))
            else:
                td = build_recursive(lg) if cleaned['recursive'] else build_flat(lg)
                text = dumps(td_to_dict(td))
        self.write_result(text, options.get('out'))
