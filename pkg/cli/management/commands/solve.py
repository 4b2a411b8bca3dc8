from time import perf_counter

from django.core.management.base import BaseCommand

from cli.exceptions import exit_codes
from cli.services import (
    decimal_string,
    kernel_rows,
    parse_epsilon,
    parse_game,
    parse_ladder,
    write_rows,
)
from games.exceptions import GameValidationError
from Engines.discounted_engine.engine import DiscountedEngine
from Engines.limit_engine.engine import approx_limit_ladder, solve_limit_exact
from Engines.limit_engine.parity import parity_to_limit


class Command(BaseCommand):
    help = 'Approximate the discounted, limit or parity value of a game state within epsilon'

    def add_arguments(self, parser):
        parser.add_argument('kind', choices=['discounted', 'limit', 'parity'])
        parser.add_argument('--game', required=True, help='Game document (JSON)')
        parser.add_argument('--state', required=True)
        parser.add_argument('--epsilon', required=True, help='Additive error as p/q or 2^-k')
        parser.add_argument('--mode', choices=['exact', 'ladder'], default='exact')
        parser.add_argument('--ladder', default=None, help='Comma-separated decreasing discount ladder')
        parser.add_argument('--emit-kernel', dest='emit_kernel', default=None, metavar='PATH',
                            help='Write the kernel entries behind W(z) as CSV (discounted only)')

    def handle(self, *args, **options):
        started = perf_counter()
        with exit_codes():
            document = parse_game(options['game'])
            game, state = document.game, options['state']
            if state not in game.states:
                raise GameValidationError(f"unknown state {state}")
            eps = parse_epsilon(options['epsilon'])
            kind = options['kind']
            rows = [('kind', kind), ('state', state), ('epsilon', eps)]

            if kind == 'discounted':
                if document.discount is None:
                    raise GameValidationError("discounted solve needs discounts.factors in the game document")
                engine = DiscountedEngine(game, state, document.discount)
                value, bracket = engine.run(eps)
                rows += [('lo', bracket.lo), ('hi', bracket.hi), ('iterations', bracket.iterations)]
                if options['emit_kernel']:
                    with open(options['emit_kernel'], 'w', encoding='utf-8') as fh:
                        write_rows(fh, kernel_rows(engine.table))
            elif options['mode'] == 'ladder':
                ladder = parse_ladder(options['ladder']) if options['ladder'] else None
                rewards, chi = self._limit_inputs(document, kind)
                result = approx_limit_ladder(game, state, rewards, chi, eps, ladder)
                value = result.estimate
                last = result.points[-1].bracket
                rows += [('mode', 'ladder')]
                rows += [(f'value_at_{point.lam}', point.value) for point in result.points]
                rows += [('lo', last.lo), ('hi', last.hi), ('iterations', last.iterations)]
            else:
                rewards, chi = self._limit_inputs(document, kind)
                result = solve_limit_exact(game, state, rewards, chi, eps)
                value, constants = result.value, result.constants
                rows += [('mode', 'exact'), ('D', constants.D), ('B1', constants.B1),
                         ('factors', len(constants.lambdas)), ('epsilon_rounded', constants.eps),
                         ('lo', result.bracket.lo), ('hi', result.bracket.hi),
                         ('iterations', result.bracket.iterations)]

            rows += [('value', value), ('value_decimal', decimal_string(value))]
            write_rows(self.stdout, rows)
        self.stderr.write(f'wall_time_seconds={perf_counter() - started:.3f}')

    @staticmethod
    def _limit_inputs(document, kind):
        if kind == 'parity':
            return parity_to_limit(document.game)
        if document.assignment is None:
            raise GameValidationError("limit solve needs discounts.assignment in the game document")
        return None, document.assignment
