from fractions import Fraction

from django.conf import settings
from django.core.management.base import BaseCommand

from cli.exceptions import exit_codes
from cli.services import parse_epsilon, parse_game, parse_ladder, write_rows
from games.exceptions import GameValidationError
from games.services import with_rewards
from kernel.services import value_iteration_oracle
from Engines.limit_engine.engine import ladder_discount, richardson, validate_ladder
from Engines.limit_engine.parity import parity_to_limit


class Command(BaseCommand):
    help = 'Certified value-iteration intervals along a discount ladder, with the extrapolated limit'

    def add_arguments(self, parser):
        parser.add_argument('--game', required=True)
        parser.add_argument('--state', required=True)
        parser.add_argument('--ladder', default=None, help='Comma-separated decreasing discount ladder')
        parser.add_argument('--tol', default='1/1024', help='Stopping tolerance as p/q or 2^-k')

    def handle(self, *args, **options):
        with exit_codes():
            document = parse_game(options['game'])
            game, state = document.game, options['state']
            if state not in game.states:
                raise GameValidationError(f"unknown state {state}")
            ladder = validate_ladder(parse_ladder(options['ladder'] or settings.CSG_DEFAULT_LADDER))
            tol = parse_epsilon(options['tol'])
            if game.rewards:
                chi = document.assignment or {s: 1 for s in game.states}
            else:
                rewards, chi = parity_to_limit(game)
                game = with_rewards(game, rewards)

            rows = [('lambda', 'lo', 'hi')]
            mids = []
            for t in ladder:
                lo, hi = value_iteration_oracle(game, ladder_discount(t, chi), tol)[state]
                rows.append((t, lo, hi))
                mids.append((t, (lo + hi) / 2))
            estimate = richardson(mids)
            rows.append((Fraction(0), estimate, estimate))
        write_rows(self.stdout, rows)
