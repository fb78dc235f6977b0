"""Hypothesis-test error rates for target detection with the pair states.

Target present: the receiver accepts whenever at least one signal photon
returns, so a miss requires every photon to be absorbed and the miss
probability is (1 - eta)^N regardless of the mode count.  Target absent:
the receiver sees only environment noise, and the false-alarm rate is a
noise-weighted sum of per-photon-count coefficients, every one of which
falls off as the mode count grows.  Closed forms are paired with
brute-force trace oracles over explicitly materialized states.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .combinat import (
    LogProb,
    compositions,
    count_compositions,
    falling_ratio,
)
from .fock import SparseState, combine
from .loss import absorption_weight, loss_component


@dataclass(frozen=True)
class ThermalNoise:
    """Identical thermal occupation of every environment mode.

    arrangement_prob(k) is the probability of one specific arrangement of k
    noise photons, (1 - x)^M x^k with x = nbar / (1 + nbar); the total
    probability of k photons in any arrangement multiplies this by the
    number of arrangements.
    """

    nbar: float
    modes: int

    def __post_init__(self):
        if self.nbar < 0:
            raise ValueError("mean occupation nbar must be non-negative")
        if self.modes < 1:
            raise ValueError("modes must be at least 1")

    def arrangement_log(self, k: int) -> LogProb:
        if k < 0:
            raise ValueError("photon count must be non-negative")
        if self.nbar == 0:
            return LogProb(0.0) if k == 0 else LogProb(-math.inf)
        x = self.nbar / (1.0 + self.nbar)
        return LogProb(self.modes * math.log1p(-x) + k * math.log(x))

    def arrangement_prob(self, k: int) -> float:
        return self.arrangement_log(k).value


@dataclass(frozen=True)
class TableNoise:
    """Arrangement probabilities supplied directly, entry i for i+1 photons.

    Counts beyond the table are treated as zero; the vacuum arrangement is
    not part of the table and reads as zero as well.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.values):
            raise ValueError("arrangement probabilities must be non-negative")

    @classmethod
    def from_file(cls, path) -> "TableNoise":
        """Parse a plain-text table, one float per line, line i holding p_i."""
        values = []
        with open(path) as handle:
            for line in handle:
                line = line.strip()
                if line:
                    values.append(float(line))
        return cls(tuple(values))

    def arrangement_prob(self, k: int) -> float:
        if k < 1 or k > len(self.values):
            return 0.0
        return self.values[k - 1]

    def arrangement_log(self, k: int) -> LogProb:
        return LogProb.from_value(self.arrangement_prob(k))


@dataclass(frozen=True)
class FalseAlarmTerm:
    """Contribution of one detected-photon count to the false-alarm rate."""

    detected: int
    coefficient: float
    contribution: float


@dataclass
class DetectionReport:
    """Closed-form error rates with the per-count breakdown, plus optional oracles."""

    photons: int
    modes: int
    eta: float
    p_fa_closed: float
    p_fa_terms: list[FalseAlarmTerm]
    p_md_closed: float
    p_fa_oracle: Optional[float] = None
    p_md_oracle: Optional[float] = None


class Baselines(NamedTuple):
    """Single-photon protocol reference rates."""

    single_copy: float      # one maximally mode-entangled photon: 1 / M
    repeated_copies: float  # N sequential single-photon probes: N / M
    in_regime: bool         # the N / M figure assumes N well below M


def _check_noise_modes(noise, modes: int) -> None:
    noise_modes = getattr(noise, "modes", None)
    if noise_modes is not None and noise_modes != modes:
        raise ValueError(f"noise model built for {noise_modes} modes, state has {modes}")


def p_md_closed(photons: int, eta: float) -> float:
    """Missed-detection probability (1 - eta)^N; the mode count never enters."""
    if photons < 0:
        raise ValueError("photons must be non-negative")
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    return (1.0 - eta) ** photons


def false_alarm_terms(photons: int, modes: int, noise) -> list[FalseAlarmTerm]:
    """Per-count breakdown of the closed-form false-alarm rate.

    The coefficient of the k-photon arrangement probability is the falling
    ratio prod_{j<k} (N - j) / (N + M - 1 - j), evaluated exactly at desk
    scale and in log space beyond the crossover.
    """
    if photons < 0:
        raise ValueError("photons must be non-negative")
    if modes < 1:
        raise ValueError("modes must be at least 1")
    _check_noise_modes(noise, modes)
    out = []
    for k in range(1, photons + 1):
        coefficient = falling_ratio(photons, modes, k)
        prob = noise.arrangement_prob(k)
        out.append(FalseAlarmTerm(k, coefficient, coefficient * prob))
    return out


def p_fa_closed(photons: int, modes: int, noise) -> float:
    """Closed-form false-alarm probability under the given noise model."""
    return sum(term.contribution for term in false_alarm_terms(photons, modes, noise))


def projector_components(
    photons: int,
    modes: int,
    reference_eta: float = 0.5,
    window: tuple[int, int] | None = None,
) -> list[SparseState]:
    """Orthonormal acceptance components, one per absorbed arrangement.

    The default window (1, photons) accepts any outcome with at least one
    returned photon; narrower windows restrict the accepted returned-photon
    range.  The components do not depend on reference_eta (it only scales
    weights, which are discarded here); the parameter is kept so alternate
    constructions can be compared.
    """
    if photons < 0:
        raise ValueError("photons must be non-negative")
    low, high = window if window is not None else (1, photons)
    if window is not None and not (1 <= low <= high <= photons):
        raise ValueError("window must satisfy 1 <= low <= high <= photons")
    out = []
    for returned in range(high, low - 1, -1):
        for absorbed in compositions(photons - returned, modes):
            out.append(loss_component(photons, modes, reference_eta, absorbed).state)
    return out


def apply_projector(components: list[SparseState], state: SparseState) -> SparseState:
    """Project a state onto the span of the given orthonormal components."""
    terms = [(comp.inner(state), comp) for comp in components]
    terms = [(c, s) for c, s in terms if c != 0]
    if not terms:
        return SparseState(state.modes, state.registers)
    return combine(terms)


def p_fa_oracle(photons: int, modes: int, noise, reference_eta: float = 0.5) -> float:
    """Brute-force false-alarm probability as a trace against the noise state.

    The noise-only ensemble is diagonal in the photon-number basis: a
    uniformly random idler arrangement tensored with environment content
    carrying its arrangement probability.  The projector trace is the sum of
    squared overlaps |<basis|component>|^2 weighted by each basis state's
    ensemble probability; basis states absent from a component overlap it
    with zero, so walking the component amplitudes covers the whole sum (a
    component term meets the ensemble state whose environment equals the
    term's returned-signal arrangement).  Intended for small instances.
    """
    _check_noise_modes(noise, modes)
    components = projector_components(photons, modes, reference_eta)
    uniform = 1.0 / count_compositions(photons, modes)
    probs = {k: noise.arrangement_prob(k) for k in range(1, photons + 1)}
    total = 0.0
    for component in components:
        for (_idler, returned), amp in component.terms():
            prob = probs.get(sum(returned), 0.0)
            if prob:
                total += uniform * prob * abs(amp) ** 2
    return total


def p_md_oracle(photons: int, modes: int, eta: float) -> float:
    """Brute-force missed-detection probability from the mixture weights.

    One minus the total weight of every component with at least one
    returned photon; equals (1 - eta)^N, which the tests pin.
    """
    accepted = 0.0
    for lost in range(photons):
        for absorbed in compositions(lost, modes):
            accepted += absorption_weight(photons, modes, eta, absorbed)
    return 1.0 - accepted


def single_photon_baselines(photons: int, modes: int) -> Baselines:
    """Reference false-alarm rates of the single-photon protocol.

    Flags the repeated-copies figure as out of regime once the photon count
    reaches the mode count, where the N / M approximation stops being a
    probability.
    """
    if photons < 0:
        raise ValueError("photons must be non-negative")
    if modes < 1:
        raise ValueError("modes must be at least 1")
    return Baselines(1.0 / modes, photons / modes, photons < modes)


def detection_report(
    photons: int,
    modes: int,
    eta: float,
    noise,
    include_oracle: bool = False,
    reference_eta: float = 0.5,
) -> DetectionReport:
    """Bundle the closed-form rates, optionally cross-checked by the oracles."""
    terms = false_alarm_terms(photons, modes, noise)
    report = DetectionReport(
        photons=photons,
        modes=modes,
        eta=eta,
        p_fa_closed=sum(term.contribution for term in terms),
        p_fa_terms=terms,
        p_md_closed=p_md_closed(photons, eta),
    )
    if include_oracle:
        report.p_fa_oracle = p_fa_oracle(photons, modes, noise, reference_eta)
        report.p_md_oracle = p_md_oracle(photons, modes, eta)
    return report
