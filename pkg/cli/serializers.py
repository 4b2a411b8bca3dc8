from fractions import Fraction

from rest_framework import serializers

from games.services import format_rational, parse_rational


class RationalField(serializers.Field):
    default_error_messages = {
        'invalid': 'Expected a rational as "p/q", an integer or "2^k", got {value!r}.',
    }

    def to_internal_value(self, data):
        try:
            return parse_rational(data)
        except ValueError:
            self.fail('invalid', value=data)

    def to_representation(self, value):
        return format_rational(Fraction(value))


def _nested(depth: int, leaf, **kwargs):
    field = leaf
    for _ in range(depth - 1):
        field = serializers.DictField(child=field)
    return serializers.DictField(child=field, **kwargs)


class DiscountSerializer(serializers.Serializer):
    factors = serializers.ListField(child=RationalField(), required=False, min_length=1)
    assignment = serializers.DictField(child=serializers.IntegerField(min_value=1))


class GameDocumentSerializer(serializers.Serializer):
    states = serializers.ListField(child=serializers.CharField(), min_length=1)
    actions1 = serializers.ListField(child=serializers.CharField(), min_length=1)
    actions2 = serializers.ListField(child=serializers.CharField(), min_length=1)
    # state -> a -> b -> target -> probability
    transitions = _nested(3, serializers.DictField(child=RationalField()))
    # state -> a -> b -> reward
    rewards = _nested(2, serializers.DictField(child=RationalField()), required=False)
    priorities = serializers.DictField(child=serializers.IntegerField(min_value=0), required=False)
    discounts = DiscountSerializer(required=False)

    def validate_states(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError("State identifiers must be unique.")
        return value

    def validate(self, data):
        states = set(data['states'])
        for s, by_a in data['transitions'].items():
            if s not in states:
                raise serializers.ValidationError(f"Transition from unknown state {s!r}.")
            for a, by_b in by_a.items():
                if a not in data['actions1']:
                    raise serializers.ValidationError(f"Unknown player-1 action {a!r} at state {s!r}.")
                for b, row in by_b.items():
                    if b not in data['actions2']:
                        raise serializers.ValidationError(f"Unknown player-2 action {b!r} at ({s}, {a}).")
                    unknown = set(row) - states
                    if unknown:
                        raise serializers.ValidationError(f"Transition at ({s}, {a}, {b}) targets unknown states {sorted(unknown)}.")
        unknown = set(data.get('rewards', {})) - states
        if unknown:
            raise serializers.ValidationError(f"Rewards for unknown states {sorted(unknown)}.")
        discounts = data.get('discounts')
        if discounts is not None:
            assignment = discounts['assignment']
            if set(assignment) != states:
                raise serializers.ValidationError("Discount assignment must cover exactly the game's states.")
            factors = discounts.get('factors')
            if factors is not None and max(assignment.values()) > len(factors):
                raise serializers.ValidationError("Discount assignment refers to a missing factor.")
        return data


class CertificateSerializer(serializers.Serializer):
    state = serializers.CharField(required=False)
    kappa = serializers.IntegerField(min_value=0)
    j = serializers.IntegerField(min_value=0)
    sigma = serializers.DictField(child=serializers.ListField(child=RationalField(), min_length=1))
    tau = serializers.DictField(child=serializers.ListField(child=RationalField(), min_length=1))

    def validate(self, data):
        if data['j'] > 1 << (data['kappa'] + 2):
            raise serializers.ValidationError("j must lie in [0, 2^(kappa+2)].")
        return data
