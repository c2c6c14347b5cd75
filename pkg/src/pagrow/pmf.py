"""Probability tables over an arithmetic degree/ball-count support."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO

FLOAT_MASS_TOL = 1e-9


@dataclass(frozen=True)
class DegreePmf:
    """Probability table over {offset, offset+step, offset+2*step, ...}.

    Exact tables hold Fractions summing to exactly 1; float tables hold
    floats summing to 1 within a small tolerance and may carry the worst
    cancellation estimate observed while evaluating them.
    """

    support_offset: int | Fraction
    step: int
    probs: tuple
    exact: bool = True
    cancellation: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError(f"support step must be positive, got {self.step}")
        object.__setattr__(self, "probs", tuple(self.probs))

    def values(self) -> list:
        return [self.support_offset + x * self.step for x in range(len(self.probs))]

    def items(self) -> list[tuple]:
        return list(zip(self.values(), self.probs))

    def as_dict(self) -> dict:
        return dict(self.items())

    def total(self):
        return sum(self.probs)

    def mean(self):
        return sum(v * p for v, p in self.items())

    def second_moment(self):
        return sum(v * v * p for v, p in self.items())

    def variance(self):
        m = self.mean()
        return self.second_moment() - m * m

    def to_csv(self, fh: TextIO) -> None:
        """Rows `value,probability`; exact probabilities as `p/q` strings."""
        fh.write("value,probability\n")
        for v, p in self.items():
            fh.write(f"{v},{format_probability(p, self.exact)}\n")


def format_probability(p, exact: bool) -> str:
    if exact:
        f = Fraction(p)
        return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)
    return format(float(p), ".17g")


def pmf_from_dict(table: dict, exact: bool = True, cancellation: float | None = None) -> DegreePmf:
    """Dense pmf over [min(table), max(table)] with zero-filled gaps."""
    if not table:
        raise ValueError("empty probability table")
    lo, hi = min(table), max(table)
    zero = Fraction(0) if exact else 0.0
    probs = [table.get(v, zero) for v in range(lo, hi + 1)]
    return DegreePmf(lo, 1, tuple(probs), exact=exact, cancellation=cancellation)


def check_mass(pmf: DegreePmf) -> None:
    """Raise when total mass is off: exact must be 1, float within tolerance."""
    total = pmf.total()
    if pmf.exact:
        if total != 1:
            raise ValueError(f"exact pmf mass is {total}, expected 1")
    elif abs(float(total) - 1.0) > FLOAT_MASS_TOL:
        raise ValueError(f"float pmf mass {total!r} deviates beyond {FLOAT_MASS_TOL}")
