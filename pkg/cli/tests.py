from fractions import Fraction
from io import StringIO
from pathlib import Path
from random import Random
import csv
import json
import tempfile

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from games.exceptions import GameValidationError
from games.samples import big_match, random_discount, random_game
from .exceptions import GameDocumentError
from .serializers import parse_rational
from .services import parse_game, parse_game_document, serialize_game

FIXTURES = Path(__file__).resolve().parent / 'fixtures'

MINIMAL = {
    "states": ["s"],
    "actions1": ["a"],
    "actions2": ["b"],
    "transitions": {"s": {"a": {"b": {"s": "1"}}}},
    "rewards": {"s": {"a": {"b": "1/2"}}},
}


def fixture(name):
    return str(FIXTURES / name)


def run(*args, **options):
    out, err = StringIO(), StringIO()
    call_command(*args, stdout=out, stderr=err, **options)
    return out.getvalue()


def report(text):
    return {row[0]: row[1] for row in csv.reader(StringIO(text)) if row}


class RationalParsingTests(SimpleTestCase):
    def test_forms(self):
        self.assertEqual(parse_rational("3/4"), Fraction(3, 4))
        self.assertEqual(parse_rational("-2"), Fraction(-2))
        self.assertEqual(parse_rational(5), Fraction(5))
        self.assertEqual(parse_rational("2^-7"), Fraction(1, 128))

    def test_rejects_floats(self):
        for bad in ("0.5", 0.5, "1/0", "x", True):
            with self.assertRaises(ValueError):
                parse_rational(bad)


class GameDocumentTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, name, text):
        path = Path(self.tmp.name) / name
        path.write_text(text, encoding='utf-8')
        return str(path)

    def test_minimal_document(self):
        document = parse_game_document(MINIMAL)
        self.assertEqual(document.game.states, ("s",))
        self.assertEqual(document.game.reward("s", "a", "b"), Fraction(1, 2))
        self.assertIsNone(document.discount)

    def test_row_sum_error_has_coordinates(self):
        data = json.loads(json.dumps(MINIMAL))
        data["transitions"]["s"]["a"]["b"] = {"s": "3/4"}
        with self.assertRaisesMessage(GameValidationError, "(s, a, b)"):
            parse_game_document(data)

    def test_syntax_error_position(self):
        path = self.write('broken.json', '{\n  "states": ["s"],\n  "actions1": [\n}\n')
        with self.assertRaises(GameDocumentError) as ctx:
            parse_game(path)
        self.assertEqual(ctx.exception.line, 4)
        self.assertIsNotNone(ctx.exception.column)

    def test_field_errors(self):
        data = dict(MINIMAL, rewards={"s": {"a": {"b": 0.5}}})
        with self.assertRaises(GameDocumentError):
            parse_game_document(data)
        data = dict(MINIMAL, transitions={"s": {"a": {"b": {"t": "1"}}}})
        with self.assertRaisesMessage(GameDocumentError, "unknown states"):
            parse_game_document(data)

    def test_big_match_fixture(self):
        document = parse_game(fixture('big_match.json'))
        self.assertEqual(document.game, big_match())
        self.assertEqual(document.game.n, 3)
        self.assertEqual(document.game.m, 2)
        self.assertEqual(document.discount.factors, (Fraction(1, 2),))

    def test_round_trip(self):
        rng = Random(41)
        for _ in range(20):
            game = random_game(rng, rng.randint(1, 3), rng.randint(1, 3))
            disc = random_discount(rng, game, d=2)
            document = parse_game_document(json.loads(json.dumps(serialize_game(game, disc))))
            self.assertEqual(document.game, game)
            self.assertEqual(document.discount, disc)

    def test_every_fixture_parses(self):
        for path in FIXTURES.glob('*.json'):
            if not path.name.startswith('certificate'):
                parse_game(str(path))


class SolveCommandTests(SimpleTestCase):
    def assertBracket(self, rows, width, iterations):
        lo, hi = parse_rational(rows['lo']), parse_rational(rows['hi'])
        self.assertEqual(hi - lo, width)
        self.assertEqual(rows['iterations'], iterations)

    def test_discounted_matching_pennies(self):
        out = run('solve', 'discounted', game=fixture('matching_pennies.json'), state='s', epsilon='1/128')
        rows = report(out)
        self.assertLessEqual(abs(parse_rational(rows['value']) - Fraction(1, 2)), Fraction(1, 128))
        self.assertEqual(rows['iterations'], '7')
        self.assertTrue(rows['value_decimal'].startswith('0.5'))

    def test_reports_are_deterministic(self):
        args = dict(game=fixture('constant.json'), state='s', epsilon='2^-6')
        self.assertEqual(run('solve', 'discounted', **args), run('solve', 'discounted', **args))

    def test_parity_single_even_state(self):
        rows = report(run('solve', 'parity', game=fixture('parity_even.json'), state='s', epsilon='1/8'))
        self.assertLessEqual(abs(parse_rational(rows['value']) - 1), Fraction(1, 8))
        self.assertEqual(rows['mode'], 'exact')
        self.assertBracket(rows, Fraction(1, 16), '4')

    def test_limit_big_match_ladder(self):
        rows = report(run('solve', 'limit', game=fixture('big_match.json'), state='play', epsilon='1/32',
                          mode='ladder', ladder='2^-4,2^-6,2^-8'))
        self.assertLessEqual(abs(parse_rational(rows['value']) - Fraction(1, 2)), Fraction(1, 32))
        self.assertBracket(rows, Fraction(1, 64), '6')
        self.assertIn('value_at_1/256', rows)

    def test_limit_absorbing_exact(self):
        rows = report(run('solve', 'limit', game=fixture('absorbing.json'), state='start', epsilon='1/8'))
        self.assertLessEqual(abs(parse_rational(rows['value']) - 1), Fraction(1, 8))
        self.assertEqual(rows['epsilon_rounded'], '1/8')
        self.assertBracket(rows, Fraction(1, 16), '4')

    def test_limit_constant_exact(self):
        rows = report(run('solve', 'limit', game=fixture('constant.json'), state='s', epsilon='2^-3'))
        self.assertLessEqual(abs(parse_rational(rows['value']) - Fraction(3, 5)), Fraction(1, 8))
        self.assertEqual(rows['D'], '1')

    @override_settings(CSG_EXACT_MAX_STATES=2)
    def test_exact_cap_exit_code(self):
        with self.assertRaises(CommandError) as ctx:
            run('solve', 'limit', game=fixture('big_match.json'), state='play', epsilon='1/8')
        self.assertEqual(ctx.exception.returncode, 3)

    def test_validation_exit_code(self):
        with self.assertRaises(CommandError) as ctx:
            run('solve', 'discounted', game=fixture('parity_even.json'), state='s', epsilon='1/8')
        self.assertEqual(ctx.exception.returncode, 2)
        with self.assertRaises(CommandError) as ctx:
            run('solve', 'discounted', game=fixture('constant.json'), state='nowhere', epsilon='1/8')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_emit_kernel(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'kernel.csv'
            run('solve', 'discounted', game=fixture('matching_pennies.json'), state='s', epsilon='1/4',
                emit_kernel=str(path))
            rows = list(csv.reader(path.read_text().splitlines()))
        self.assertEqual(rows[0], ['sigma', 'tau', 'nabla_s', 'nabla'])
        self.assertEqual(len(rows), 5)


class VerifyCommandTests(SimpleTestCase):
    game = fixture('matching_pennies.json')

    def test_uniform_certificate_accepted(self):
        rows = report(run('verify', game=self.game, cert=fixture('certificate_uniform.json'), epsilon='2^-4'))
        self.assertEqual(rows['accepted'], 'yes')
        self.assertEqual(rows['alpha'], '1/2')

    def test_alpha_one_rejected(self):
        with self.assertRaises(CommandError) as ctx:
            run('verify', game=self.game, cert=fixture('certificate_alpha_one.json'), epsilon='2^-4')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_kappa_mismatch_is_malformed(self):
        with self.assertRaises(CommandError) as ctx:
            run('verify', game=self.game, cert=fixture('certificate_uniform.json'), epsilon='2^-3')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_missing_strategy_row(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'cert.json'
            path.write_text(json.dumps({"state": "s", "kappa": 2, "j": 8, "sigma": {}, "tau": {"s": ["1/2", "1/2"]}}))
            with self.assertRaises(CommandError) as ctx:
                run('verify', game=self.game, cert=str(path), epsilon='1/4')
        self.assertEqual(ctx.exception.returncode, 2)


class OracleCommandTests(SimpleTestCase):
    def rows(self, **options):
        out = run('oracle', **options)
        return [[parse_rational(x) for x in row] for row in list(csv.reader(StringIO(out)))[1:]]

    def test_constant_game_intervals(self):
        rows = self.rows(game=fixture('constant.json'), state='s', ladder='1/2,1/4,1/8', tol='1/256')
        for lam, lo, hi in rows[:-1]:
            self.assertTrue(lo <= Fraction(3, 5) <= hi)
            self.assertLessEqual(hi - lo, Fraction(2, 256))
        self.assertEqual(rows[-1][0], 0)

    def test_big_match_trend(self):
        rows = self.rows(game=fixture('big_match.json'), state='play', ladder='2^-2,2^-4', tol='1/256')
        for lam, lo, hi in rows[:-1]:
            self.assertTrue(lo <= Fraction(1, 2) <= hi)
        self.assertLessEqual(abs(rows[-1][1] - Fraction(1, 2)), Fraction(1, 32))

    def test_non_decreasing_ladder(self):
        with self.assertRaises(CommandError) as ctx:
            run('oracle', game=fixture('constant.json'), state='s', ladder='1/4,1/2')
        self.assertEqual(ctx.exception.returncode, 2)
