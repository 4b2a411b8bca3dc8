from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple
import csv
import json
import logging

from certificates.models import ValueCertificate
from games.exceptions import GameValidationError
from games.models import DiscountSpec, GameSpec, MixedStationary
from games.samples import make_game
from games.services import validate_discount
from kernel.models import KernelTable
from .exceptions import GameDocumentError
from .models import GameDocument
from .serializers import CertificateSerializer, GameDocumentSerializer, format_rational, parse_rational

logger = logging.getLogger(__name__)


def _flatten_errors(errors, prefix: str = "") -> str:
    if isinstance(errors, dict):
        return "; ".join(_flatten_errors(v, f"{prefix}{k}." if k != "non_field_errors" else prefix)
                         for k, v in errors.items())
    if isinstance(errors, list):
        return "; ".join(_flatten_errors(v, prefix) for v in errors)
    return f"{prefix.rstrip('.')}: {errors}" if prefix else str(errors)


def load_document(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise GameDocumentError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameDocumentError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise GameDocumentError(f"{path}: top level must be an object")
    return data


def parse_game_document(data: dict) -> GameDocument:
    """Validate a decoded game document and build the model; semantic checks are left to validate_game."""
    serializer = GameDocumentSerializer(data=data)
    if not serializer.is_valid():
        raise GameDocumentError(_flatten_errors(serializer.errors))
    doc = serializer.validated_data

    transitions = {
        (s, a, b): row
        for s, by_a in doc['transitions'].items()
        for a, by_b in by_a.items()
        for b, row in by_b.items()
    }
    rewards = {
        (s, a, b): r
        for s, by_a in doc.get('rewards', {}).items()
        for a, by_b in by_a.items()
        for b, r in by_b.items()
    }
    game = make_game(doc['states'], doc['actions1'], doc['actions2'], transitions, rewards,
                     doc.get('priorities'))

    discount, assignment = None, None
    if 'discounts' in doc:
        assignment = dict(doc['discounts']['assignment'])
        if 'factors' in doc['discounts']:
            discount = validate_discount(game, DiscountSpec(tuple(doc['discounts']['factors']), assignment))
    return GameDocument(game, discount, assignment)


def parse_game(path: str) -> GameDocument:
    document = parse_game_document(load_document(path))
    logger.info(f"Parsed {path}: n={document.game.n}, m={document.game.m}")
    return document


def _nest(entries: Dict[Tuple[str, str, str], object]) -> dict:
    nested: dict = {}
    for (s, a, b), value in entries.items():
        nested.setdefault(s, {}).setdefault(a, {})[b] = value
    return nested


def serialize_game(game: GameSpec, discount: Optional[DiscountSpec] = None,
                   assignment: Optional[Dict[str, int]] = None) -> dict:
    """Inverse of parse_game_document; zero transition entries are left out."""
    data = {
        'states': list(game.states),
        'actions1': list(game.actions1),
        'actions2': list(game.actions2),
        'transitions': _nest({
            triple: {t: format_rational(p) for t, p in zip(game.states, row) if p}
            for triple, row in game.transition.items()
        }),
    }
    if game.rewards:
        data['rewards'] = _nest({triple: format_rational(r) for triple, r in game.rewards.items()})
    if game.priorities is not None:
        data['priorities'] = dict(game.priorities)
    if discount is not None:
        data['discounts'] = {
            'factors': [format_rational(f) for f in discount.factors],
            'assignment': dict(discount.assignment),
        }
    elif assignment is not None:
        data['discounts'] = {'assignment': dict(assignment)}
    return data


def parse_certificate(path: str, game: GameSpec) -> ValueCertificate:
    serializer = CertificateSerializer(data=load_document(path))
    if not serializer.is_valid():
        raise GameDocumentError(_flatten_errors(serializer.errors))
    doc = serializer.validated_data
    for label in ('sigma', 'tau'):
        missing = set(game.states) - set(doc[label])
        if missing:
            raise GameDocumentError(f"{label}: no row for states {sorted(missing)}")
    return ValueCertificate(
        sigma=MixedStationary(1, {s: tuple(doc['sigma'][s]) for s in game.states}),
        tau=MixedStationary(2, {s: tuple(doc['tau'][s]) for s in game.states}),
        j=doc['j'],
        kappa=doc['kappa'],
        state=doc.get('state'),
    )


def parse_epsilon(text: str) -> Fraction:
    try:
        eps = parse_rational(text)
    except ValueError as exc:
        raise GameValidationError(str(exc)) from exc
    if eps <= 0:
        raise GameValidationError(f"epsilon must be positive, got {text}")
    return eps


def parse_ladder(text: str) -> Tuple[Fraction, ...]:
    try:
        return tuple(parse_rational(part) for part in text.split(',') if part.strip())
    except ValueError as exc:
        raise GameValidationError(str(exc)) from exc


def decimal_string(q: Fraction, digits: int = 12) -> str:
    with localcontext() as ctx:
        ctx.prec = digits + 8
        return str(round(Decimal(q.numerator) / Decimal(q.denominator), digits))


def write_rows(stream, rows: Iterable[Sequence]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    for row in rows:
        writer.writerow([format_rational(x) if isinstance(x, Fraction) else x for x in row])


def kernel_rows(table: KernelTable) -> Iterable[Sequence]:
    yield ('sigma', 'tau', 'nabla_s', 'nabla')
    for i, p1 in enumerate(table.rows):
        for j, p2 in enumerate(table.cols):
            entry = table.entries[i][j]
            yield ('|'.join(p1.key), '|'.join(p2.key), Fraction(entry.nabla_s), Fraction(entry.nabla))
