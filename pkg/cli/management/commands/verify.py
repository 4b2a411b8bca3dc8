from django.core.management.base import BaseCommand, CommandError

from certificates.services import evaluate_certificate
from cli.exceptions import EXIT_REJECTED, exit_codes
from cli.services import parse_certificate, parse_epsilon, parse_game, write_rows
from games.exceptions import GameValidationError


class Command(BaseCommand):
    help = 'Check a value certificate (sigma, tau, alpha = j*2^-(kappa+2)) against a discounted game'

    def add_arguments(self, parser):
        parser.add_argument('--game', required=True)
        parser.add_argument('--cert', required=True, help='Certificate document (JSON)')
        parser.add_argument('--epsilon', required=True, help='2^-kappa')
        parser.add_argument('--state', default=None, help='Overrides the state named in the certificate')

    def handle(self, *args, **options):
        with exit_codes():
            document = parse_game(options['game'])
            if document.discount is None:
                raise GameValidationError("verification needs discounts.factors in the game document")
            cert = parse_certificate(options['cert'], document.game)
            state = options['state'] or cert.state
            if state is None:
                raise GameValidationError("no state given on the command line or in the certificate")
            eps = parse_epsilon(options['epsilon'])
            check = evaluate_certificate(document.game, document.discount, state, cert, eps)

        write_rows(self.stdout, [
            ('state', state),
            ('alpha', check.alpha),
            ('epsilon', check.eps),
            ('v_sigma', check.v_sigma),
            ('v_tau', check.v_tau),
            ('lower_lhs', check.alpha - 3 * check.eps / 4),
            ('lower_rhs', check.v_sigma - check.eps / 4),
            ('upper_lhs', check.alpha + 3 * check.eps / 4),
            ('upper_rhs', check.v_tau + check.eps / 4),
            ('accepted', 'yes' if check.accepted else 'no'),
        ])
        if not check.accepted:
            raise CommandError('certificate rejected', returncode=EXIT_REJECTED)
        self.stderr.write(self.style.SUCCESS('certificate accepted'))
