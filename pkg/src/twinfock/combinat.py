"""Exact and log-space combinatorial kernels.

Photon-arrangement counting shows up in every closed-form probability in
this package.  Two evaluation routes are provided: exact big-integer
arithmetic, which is mandatory at desk scale (photons + modes below
EXACT_CROSSOVER), and log-space floats for instances where the binomials
dwarf the float64 range.  The test suite pins the two routes against each
other on the region where both apply.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

#: Largest photons + modes for which the exact big-integer route is used.
EXACT_CROSSOVER = 200


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k); zero when k exceeds n."""
    if n < 0 or k < 0:
        raise ValueError("binomial requires non-negative arguments")
    return math.comb(n, k)


def count_compositions(total: int, parts: int) -> int:
    """Count length-`parts` vectors of non-negative integers summing to `total`."""
    if parts < 1:
        raise ValueError("parts must be at least 1")
    if total < 0:
        raise ValueError("total must be non-negative")
    return math.comb(total + parts - 1, parts - 1)


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Yield all length-`parts` vectors summing to `total`, descending-lex order.

    The sequence starts at (total, 0, ..., 0), ends at (0, ..., 0, total)
    and has exactly count_compositions(total, parts) entries.  The order is
    fixed so that serialized states and CSV sweeps are reproducible.
    """
    if parts < 1:
        raise ValueError("parts must be at least 1")
    if total < 0:
        raise ValueError("total must be non-negative")
    for occupied in itertools.combinations_with_replacement(range(parts), total):
        counts = [0] * parts
        for mode in occupied:
            counts[mode] += 1
        yield tuple(counts)


@dataclass(frozen=True)
class LogProb:
    """Probability-like value carried on the natural-log scale.

    log_value == -inf encodes an exact zero, so products and sums stay
    meaningful far below the float64 underflow point near 1e-308.
    """

    log_value: float

    @property
    def is_zero(self) -> bool:
        return self.log_value == -math.inf

    @property
    def value(self) -> float:
        """Plain float value; underflows to 0.0 when too small to represent."""
        if self.is_zero:
            return 0.0
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    @classmethod
    def from_value(cls, value: float) -> "LogProb":
        if value < 0:
            raise ValueError("negative values have no log representation")
        if value == 0:
            return cls(-math.inf)
        return cls(math.log(value))

    def __mul__(self, other: "LogProb") -> "LogProb":
        if not isinstance(other, LogProb):
            return NotImplemented
        return LogProb(self.log_value + other.log_value)


def sum_log_probs(items: Iterable[LogProb]) -> LogProb:
    """Sum of log-scale values via a max-shifted log-sum-exp."""
    logs = [item.log_value for item in items if not item.is_zero]
    if not logs:
        return LogProb(-math.inf)
    peak = max(logs)
    return LogProb(peak + math.log(sum(math.exp(x - peak) for x in logs)))


def _check_ratio_args(photons: int, modes: int, picked: int) -> None:
    if modes < 1:
        raise ValueError("modes must be at least 1")
    if not 1 <= picked <= photons:
        raise ValueError("picked must satisfy 1 <= picked <= photons")


def falling_ratio_exact(photons: int, modes: int, picked: int) -> Fraction:
    """Exact value of prod_{j<picked} (photons - j) / (photons + modes - 1 - j).

    Equals C(photons - picked + modes - 1, modes - 1) over
    C(photons + modes - 1, modes - 1); the product telescopes into the
    binomial ratio, which is what gets evaluated here.
    """
    _check_ratio_args(photons, modes, picked)
    return Fraction(
        math.comb(photons - picked + modes - 1, modes - 1),
        math.comb(photons + modes - 1, modes - 1),
    )


def falling_ratio_term(photons: int, modes: int, picked: int) -> LogProb:
    """Log-space prod_{j<picked} (photons - j) / (photons + modes - 1 - j).

    This is the detector coefficient weighting the probability of picking up
    exactly `picked` noise photons.  Safe at photons = 1000, modes = 1e5
    where the plain float value underflows.
    """
    _check_ratio_args(photons, modes, picked)
    log_value = 0.0
    for j in range(picked):
        log_value += math.log(photons - j) - math.log(photons + modes - 1 - j)
    return LogProb(log_value)


def falling_ratio_logs(photons: int, modes: int) -> list[LogProb]:
    """All falling-ratio terms for picked = 1..photons, by prefix accumulation.

    Entry k-1 is bit-identical to falling_ratio_term(photons, modes, k)
    because both accumulate the same factor logs in the same order.
    """
    if modes < 1:
        raise ValueError("modes must be at least 1")
    if photons < 0:
        raise ValueError("photons must be non-negative")
    out = []
    acc = 0.0
    for j in range(photons):
        acc += math.log(photons - j) - math.log(photons + modes - 1 - j)
        out.append(LogProb(acc))
    return out


def falling_ratio(photons: int, modes: int, picked: int) -> float:
    """Float falling ratio, using the exact route below the crossover."""
    if photons + modes <= EXACT_CROSSOVER:
        return float(falling_ratio_exact(photons, modes, picked))
    return falling_ratio_term(photons, modes, picked).value
