import json
import sys

from django.core.management.base import BaseCommand

from fwrank.exceptions import FactorWidthError
from fwrank.formats import render_json, render_text
from fwrank.services import Command as FWCommand
from fwrank.services import fw_service


def _add_common(parser):
    parser.add_argument('--k', type=int)
    parser.add_argument('--format', choices=['text', 'json'], default='text')
    parser.add_argument('--tol-psd', type=float)
    parser.add_argument('--tol-recon', type=float)
    parser.add_argument('--tol-zero', type=float)
    parser.add_argument('--max-iter', type=int)
    parser.add_argument('--budget', type=int)
    parser.add_argument('--jobs', type=int, default=1)


class Command(BaseCommand):
    help = 'Factor width, factor-width-k rank bounds, covering numbers and Hadamard analysis'

    def create_parser(self, prog_name, subcommand, **kwargs):
        # Python 3.10 argparse otherwise reads the verbs' --s as an ambiguous
        # prefix of Django's --settings / --skip-checks on the top-level parser.
        kwargs.setdefault('allow_abbrev', False)
        return super().create_parser(prog_name, subcommand, **kwargs)

    def add_arguments(self, parser):
        verbs = parser.add_subparsers(dest='verb', required=True)

        for verb, help_text in (
            ('check', 'factor width and membership verdict'),
            ('decompose', 'factor-width-k decomposition'),
            ('bounds', 'bounds on the factor-width-k rank'),
        ):
            sub = verbs.add_parser(verb, help=help_text)
            sub.add_argument('inputs', nargs='+', help='matrix files')
            _add_common(sub)

        sub = verbs.add_parser('cover', help='covering number C(n, k, 2)')
        sub.add_argument('n', type=int)
        _add_common(sub)

        sub = verbs.add_parser('cliquecover', help='k-clique cover number of a graph')
        sub.add_argument('inputs', nargs='+', help='graph files')
        _add_common(sub)

        sub = verbs.add_parser('hadamard', help='Hadamard product or power report')
        sub.add_argument('inputs', nargs='+', help='one matrix file, or two for a product')
        sub.add_argument('--s', type=float)
        sub.add_argument('--min-power', action='store_true')
        sub.add_argument('--m-cap', type=int)
        _add_common(sub)

        sub = verbs.add_parser('conjecture', help='counterexample search for real Hadamard powers')
        sub.add_argument('n', type=int)
        sub.add_argument('--s', type=float)
        sub.add_argument('--trials', type=int)
        sub.add_argument('--seed', type=int)
        sub.add_argument('--records', help='write one JSON line per trial to this file')
        _add_common(sub)

    def handle(self, *args, **options):
        fmt = options.get('format') or 'text'
        try:
            command = FWCommand(
                verb=options['verb'],
                inputs=options.get('inputs') or [],
                k=options.get('k'),
                s=options.get('s'),
                n=options.get('n'),
                format=fmt,
                tol_psd=options.get('tol_psd'),
                tol_recon=options.get('tol_recon'),
                tol_zero=options.get('tol_zero'),
                max_iter=options.get('max_iter'),
                budget=options.get('budget'),
                m_cap=options.get('m_cap'),
                min_power=bool(options.get('min_power')),
                trials=options.get('trials'),
                seed=options.get('seed'),
                records=options.get('records'),
                jobs=options.get('jobs') or 1,
            )
            result = fw_service.run(command)
        except FactorWidthError as e:
            self._error(e, fmt)
            sys.exit(e.exit_code)

        render = render_json if fmt == 'json' else render_text
        self.stdout.write("\n\n".join(render(report) for report in result.reports))
        for outcome in result.errors:
            self._error(outcome.error, fmt, outcome.input)
        if result.exit_code:
            sys.exit(result.exit_code)

    def _error(self, error, fmt, source=None):
        payload = error.to_dict()
        if source is not None:
            payload['input'] = str(source)
        if fmt == 'json':
            self.stderr.write(json.dumps(payload, sort_keys=True))
        else:
            prefix = f"{source}: " if source is not None else ''
            self.stderr.write(f"{prefix}{payload['error']}: {payload['message']}")
