"""Beamsplitter attenuation of the signal register.

A target of reflectivity eta returns each signal photon with amplitude
sqrt(eta) and leaks it to the environment with amplitude sqrt(1 - eta).
The returned light decomposes into mutually orthogonal pure components
labeled by the exact arrangement of absorbed photons; the component weights
follow from exact combinatorics.  A brute-force tripartite oracle that
tracks the environment register explicitly is provided as the independent
cross-check for the whole decomposition.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .combinat import binomial, compositions, count_compositions
from .fock import (
    AMPLITUDE_CAP,
    BACKGROUND,
    IDLER,
    KEY_BYTES_BUDGET,
    SIGNAL,
    AmplitudeCapError,
    SparseState,
    combine,
)
from .states import pair_state_direct


@dataclass(frozen=True)
class LossComponent:
    """One orthogonal piece of the returned state.

    absorbed: per-mode photon counts left in the environment
    weight:   probability of that exact arrangement
    state:    normalized idler/signal state conditioned on the arrangement
    """

    absorbed: tuple[int, ...]
    weight: float
    state: SparseState


def _check_loss_args(photons: int, modes: int, eta: float, absorbed) -> int:
    if photons < 0:
        raise ValueError("photons must be non-negative")
    if modes < 1:
        raise ValueError("modes must be at least 1")
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    absorbed = tuple(absorbed)
    if len(absorbed) != modes:
        raise ValueError(f"absorbed needs one count per mode ({modes})")
    if any(a < 0 for a in absorbed):
        raise ValueError("absorbed counts must be non-negative")
    lost = sum(absorbed)
    if lost > photons:
        raise ValueError("cannot absorb more photons than were sent")
    return lost


def absorption_weight(photons: int, modes: int, eta: float, absorbed) -> float:
    """Probability that the environment holds exactly the given arrangement.

    Evaluates eta^(N-k) (1-eta)^k times an exact big-integer sum of
    per-arrangement multiplicities over the C(N+M-1, N) pair-state terms,
    converting to float only once at the end.
    """
    lost = _check_loss_args(photons, modes, eta, absorbed)
    absorbed = tuple(absorbed)
    acc = 0
    for kept in compositions(photons - lost, modes):
        prod = 1
        for n_kept, n_lost in zip(kept, absorbed):
            prod *= binomial(n_kept + n_lost, n_lost)
        acc += prod
    ratio = Fraction(acc, count_compositions(photons, modes))
    return (eta ** (photons - lost)) * ((1.0 - eta) ** lost) * float(ratio)


def loss_component(photons: int, modes: int, eta: float, absorbed) -> LossComponent:
    """Weight and normalized conditional state for one absorption arrangement.

    The state adds the absorbed arrangement back onto the idler side of the
    smaller pair state and normalizes; it does not depend on eta, which only
    enters the weight.
    """
    lost = _check_loss_args(photons, modes, eta, absorbed)
    absorbed = tuple(absorbed)
    weight = absorption_weight(photons, modes, eta, absorbed)
    state = pair_state_direct(photons - lost, modes)
    for mode, count in enumerate(absorbed):
        for _ in range(count):
            state = state.create(IDLER, mode)
    state = state.scaled(1.0 / state.norm())
    return LossComponent(absorbed, weight, state)


def returned_mixture(photons: int, modes: int, eta: float) -> list[LossComponent]:
    """All components of the returned state, in canonical arrangement order.

    Orders by total absorbed count, then descending-lex arrangement; the
    weights sum to one.
    """
    out = []
    for lost in range(photons + 1):
        for absorbed in compositions(lost, modes):
            out.append(loss_component(photons, modes, eta, absorbed))
    return out


def beamsplitter_oracle(photons: int, modes: int, eta: float) -> SparseState:
    """Exact tripartite state after the beamsplitter, built by ladder operators.

    Loads each idler arrangement onto vacuum, then routes every signal
    photon through the splitter as sqrt(eta) a+_S + sqrt(1-eta) a+_B, one
    binomial expansion per photon.  Intended for small instances; the result
    holds C(N + 2M - 1, N) amplitudes.
    """
    _check_loss_args(photons, modes, eta, (0,) * modes)
    size = binomial(photons + 2 * modes - 1, photons)
    if size > AMPLITUDE_CAP or size * 3 * modes * 2 > KEY_BYTES_BUDGET:
        raise AmplitudeCapError(
            f"beamsplitter oracle with N={photons}, M={modes} needs {size} amplitudes"
        )
    registers = (IDLER, SIGNAL, BACKGROUND)
    keep = math.sqrt(eta)
    leak = math.sqrt(1.0 - eta)
    scale = 1.0 / math.sqrt(count_compositions(photons, modes))
    pieces = []
    for arrangement in compositions(photons, modes):
        term = SparseState.vacuum(modes, registers)
        for mode, count in enumerate(arrangement):
            for _ in range(count):
                term = term.create(IDLER, mode)
        for mode, count in enumerate(arrangement):
            for _ in range(count):
                term = combine([
                    (keep, term.create(SIGNAL, mode)),
                    (leak, term.create(BACKGROUND, mode)),
                ])
        # raw creations contribute sqrt(n!) on the idler side and another
        # sqrt(n!) through the signal powers, hence one factorial per mode
        pieces.append((scale / math.prod(math.factorial(c) for c in arrangement), term))
    return combine(pieces)


def split_by_environment(state: SparseState) -> list[LossComponent]:
    """Group a tripartite state by its environment-register content.

    Returns one component per occurring arrangement: the squared-norm weight
    and the normalized idler/signal remainder, ordered as returned_mixture
    orders its components.
    """
    if state.registers != (IDLER, SIGNAL, BACKGROUND):
        raise ValueError("expected a state over the idler, signal and background registers")
    groups: dict[tuple[int, ...], list] = {}
    for (idler, signal, environment), amp in state.terms():
        groups.setdefault(environment, []).append(((idler, signal), amp))
    out = []
    for environment in sorted(groups, key=lambda e: (sum(e), tuple(-c for c in e))):
        terms = groups[environment]
        weight = sum(abs(amp) ** 2 for _, amp in terms)
        norm = math.sqrt(weight)
        sub = SparseState.from_terms(
            state.modes,
            (IDLER, SIGNAL),
            ((counts, amp / norm) for counts, amp in terms),
        )
        out.append(LossComponent(environment, weight, sub))
    return out
