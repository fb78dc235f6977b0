"""Builders for the maximally mode-correlated photon-pair states.

The N-pair family places N photons in the signal register and N in the
idler, correlated mode by mode: an equal-amplitude superposition of |n, n>
over every arrangement n of N photons across M modes.  N = 0 is the vacuum
and N = 1 the maximally entangled single-photon state.  Two independent
construction routes are provided (closed-form amplitudes and repeated
pair creation from vacuum) so each can check the other.
"""

import math

from .combinat import compositions, count_compositions
from .fock import (
    AMPLITUDE_CAP,
    IDLER,
    KEY_BYTES_BUDGET,
    SIGNAL,
    AmplitudeCapError,
    SparseState,
    combine,
)


def pair_norm_constant(photons: int, modes: int) -> int:
    """Exact squared norm N! (N+M-1)! / (M-1)! of the N-th pair-creation power on vacuum."""
    if photons < 0:
        raise ValueError("photons must be non-negative")
    if modes < 1:
        raise ValueError("modes must be at least 1")
    return (
        math.factorial(photons)
        * math.factorial(photons + modes - 1)
        // math.factorial(modes - 1)
    )


def _check_materializable(photons: int, modes: int, registers: int = 2) -> int:
    count = count_compositions(photons, modes)
    if count > AMPLITUDE_CAP:
        raise AmplitudeCapError(
            f"pair state with N={photons}, M={modes} needs {count} amplitudes "
            f"(cap {AMPLITUDE_CAP})"
        )
    if count * registers * modes * 2 > KEY_BYTES_BUDGET:
        raise AmplitudeCapError(
            f"pair state with N={photons}, M={modes} exceeds the key storage budget"
        )
    return count


def pair_state_direct(photons: int, modes: int) -> SparseState:
    """Equal-weight superposition of |n, n> over all arrangements |n| = photons."""
    count = _check_materializable(photons, modes)
    amp = 1.0 / math.sqrt(count)
    return SparseState.from_terms(
        modes,
        (IDLER, SIGNAL),
        (((arrangement, arrangement), amp) for arrangement in compositions(photons, modes)),
    )


def pair_create(state: SparseState) -> SparseState:
    """Apply the pair-creation operator sum_i a+_{I,i} a+_{S,i} (no normalization)."""
    return combine(
        (1.0, state.create(IDLER, i).create(SIGNAL, i)) for i in range(state.modes)
    )


def pair_state_recursive(photons: int, modes: int) -> SparseState:
    """Build the N-pair state by repeated pair creation from vacuum.

    Each step applies the pair-creation operator to the (k-1)-pair state and
    rescales by 1 / sqrt(k (k + M - 1)), which keeps the state normalized.
    Agrees with pair_state_direct to float precision; the equality is pinned
    in the tests.
    """
    _check_materializable(photons, modes)
    state = SparseState.vacuum(modes, (IDLER, SIGNAL))
    for step in range(1, photons + 1):
        state = pair_create(state).scaled(1.0 / math.sqrt(step * (step + modes - 1)))
    return state


def annihilate_signal(photons: int, modes: int, mode: int) -> SparseState:
    """Remove one signal photon from the N-pair state in the given mode.

    Annihilating the vacuum (photons = 0) yields the empty state.
    """
    return pair_state_direct(photons, modes).annihilate(SIGNAL, mode)


def loss_identity_residual(photons: int, modes: int, mode: int) -> float:
    """Residual norm of the single-photon-loss identity.

    Losing one signal photon from the N-pair state equals, up to the factor
    sqrt(N / (N + M - 1)), adding one idler photon to the (N-1)-pair state;
    the returned norm of the difference should be zero to float precision.
    """
    if photons < 1:
        raise ValueError("photons must be at least 1")
    lhs = annihilate_signal(photons, modes, mode)
    rhs = pair_state_direct(photons - 1, modes).create(IDLER, mode)
    scale = math.sqrt(photons / (photons + modes - 1))
    return combine([(1.0, lhs), (-scale, rhs)]).norm()
