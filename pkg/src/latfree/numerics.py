"""Exact rational scalars and three-way sign classification.

All tie-sensitive comparisons in the solver go through
:func:`classify_sign` so that the cut / strict-cut distinction is never
decided by floating-point noise.  Built-in models work on
:class:`fractions.Fraction` end to end and use the exact policy;
black-box float oracles use a tolerance policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import NonFiniteValue

#: Exact scalar type used throughout the rational model.  ``Fraction``
#: already guarantees a positive denominator and eager gcd normalization.
Rational = Fraction

Scalar = Union[Fraction, int, float]

EXACT_MODE = "exact"
TOLERANCE_MODE = "tolerance"


@dataclass(frozen=True)
class SignPolicy:
    """How a scalar is classified into {-1, 0, +1}.

    ``exact`` mode requires rational input and classifies exactly.
    ``tolerance`` mode maps values within ``[-tau, tau]`` to 0.
    """

    mode: str
    tau: Scalar = 0

    def __post_init__(self):
        if self.mode not in (EXACT_MODE, TOLERANCE_MODE):
            raise ValueError(f"unknown sign policy mode: {self.mode!r}")
        if self.tau < 0:
            raise ValueError("tolerance must be nonnegative")

    @property
    def is_exact(self) -> bool:
        return self.mode == EXACT_MODE


EXACT = SignPolicy(EXACT_MODE)

#: Default tolerance used for black-box float oracles.
DEFAULT_TOLERANCE = 1e-9


def tolerance_policy(tau: Scalar = DEFAULT_TOLERANCE) -> SignPolicy:
    return SignPolicy(TOLERANCE_MODE, tau)


def classify_sign(v: Scalar, policy: SignPolicy = EXACT) -> int:
    """Three-way sign of ``v`` under ``policy``.

    Raises :class:`NonFiniteValue` for NaN or infinite input, and
    ``TypeError`` when a float reaches the exact policy.
    """
    if isinstance(v, float) and not math.isfinite(v):
        raise NonFiniteValue(f"cannot classify non-finite value {v!r}")
    if policy.is_exact:
        if isinstance(v, float):
            raise TypeError("exact sign policy requires rational input")
        return (v > 0) - (v < 0)
    if v > policy.tau:
        return 1
    if v < -policy.tau:
        return -1
    return 0


def parse_scalar(text: str) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a finite decimal string exactly.

    ``Fraction`` converts decimal strings with a finite expansion without
    rounding, e.g. ``"0.4"`` becomes ``2/5``.
    """
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def format_scalar(value: Scalar) -> str:
    """Render a scalar in rational text form (floats via shortest repr)."""
    if isinstance(value, float):
        return repr(value)
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
