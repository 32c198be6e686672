import math
import re
from fractions import Fraction
from typing import Annotated, Any, Iterable, List

from pydantic import BeforeValidator, PlainSerializer

from sftkit.exceptions import InputValidationError

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_rational(value: Any) -> Fraction:
    """Parse a strict rational: an int, a Fraction or a reduced "p/q" string with q > 0."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputValidationError(f"Expected a rational, got boolean {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise InputValidationError(f"Expected a rational string 'p/q', got {value!r}")

    match = _RATIONAL_RE.match(value.strip())
    if not match:
        raise InputValidationError(f"Malformed rational {value!r}, expected 'p/q'")

    numerator = int(match.group(1))
    if match.group(2) is None:
        return Fraction(numerator)

    denominator = int(match.group(2))
    if denominator == 0:
        raise InputValidationError(f"Rational {value!r} has zero denominator")
    # Canonical form only: "2/4" and "0/3" are rejected
    if math.gcd(numerator, denominator) != 1:
        raise InputValidationError(f"Rational {value!r} is not in lowest terms")
    return Fraction(numerator, denominator)


def format_rational(value: Fraction) -> str:
    """Format a rational as "p/q", or "p" when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    result = 1
    for value in values:
        result = math.lcm(result, Fraction(value).denominator)
    return result


def format_rationals(values: Iterable[Fraction]) -> List[str]:
    return [format_rational(v) for v in values]


# Exact rational field type for pydantic models
Rational = Annotated[
    Fraction,
    BeforeValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
]
