"""Sparse photon-number states over labeled mode registers.

States live on one to three registers (idler, signal, background), each
holding the same number of modes.  Amplitudes sit in a dict keyed by the
packed per-mode counts, so memory follows the number of occupied basis
arrangements rather than the Hilbert-space dimension.  Ladder operators and
linear combinations return new states; a constructed state is treated as
immutable, which makes concurrent use of distinct states safe.
"""

import math
import struct
from typing import Iterable, Iterator, Sequence

IDLER = "I"
SIGNAL = "S"
BACKGROUND = "B"
REGISTER_ORDER = (IDLER, SIGNAL, BACKGROUND)

#: Hard ceiling on the number of stored amplitudes in any single state.
AMPLITUDE_CAP = 10_000_000
#: Ceiling on total packed key bytes for a materialized state.  Catches
#: states that respect the amplitude cap but would exhaust memory through
#: very wide keys (many modes per register).
KEY_BYTES_BUDGET = 200_000_000
#: Amplitudes below this magnitude are dropped after linear combinations.
PRUNE_THRESHOLD = 1e-15

_MAX_MODE_COUNT = 0xFFFF


class AmplitudeCapError(RuntimeError):
    """An operation would materialize more state than the configured caps allow."""


class SparseState:
    """Sparse state vector over one or more equally sized mode registers.

    Basis keys pack the per-mode counts of every register as big-endian
    uint16 words, idler register first, so byte order of keys matches
    lexicographic order of the concatenated count vectors.  Per-mode counts
    are limited to 65535, far above anything reachable at desk scale.
    """

    __slots__ = ("modes", "registers", "_amps")

    def __init__(self, modes: int, registers: Sequence[str], amplitudes: dict | None = None):
        registers = tuple(registers)
        if modes < 1:
            raise ValueError("modes must be at least 1")
        canonical = tuple(r for r in REGISTER_ORDER if r in registers)
        if not registers or registers != canonical or len(set(registers)) != len(registers):
            raise ValueError(f"registers must be a non-empty ordered subset of {REGISTER_ORDER}")
        self.modes = modes
        self.registers = registers
        self._amps = dict(amplitudes) if amplitudes else {}

    # -- constructors ------------------------------------------------------

    @classmethod
    def vacuum(cls, modes: int, registers: Sequence[str]) -> "SparseState":
        """All-zero occupation with amplitude one."""
        zeros = tuple((0,) * modes for _ in registers)
        return cls.basis(modes, registers, zeros)

    @classmethod
    def basis(cls, modes: int, registers: Sequence[str], counts) -> "SparseState":
        """Single basis arrangement with amplitude one."""
        return cls.from_terms(modes, registers, [(counts, 1.0)])

    @classmethod
    def from_terms(cls, modes: int, registers: Sequence[str], terms: Iterable) -> "SparseState":
        """Build a state from (per-register count tuples, amplitude) pairs."""
        state = cls(modes, registers)
        for counts, amp in terms:
            state._amps[state._pack(counts)] = complex(amp)
        state._check_caps()
        return state

    # -- key packing -------------------------------------------------------

    def _pack(self, counts) -> bytes:
        if len(counts) != len(self.registers):
            raise ValueError(f"expected counts for registers {self.registers}")
        flat = []
        for vector in counts:
            if len(vector) != self.modes:
                raise ValueError(f"each register needs {self.modes} mode counts")
            flat.extend(vector)
        for c in flat:
            if not 0 <= c <= _MAX_MODE_COUNT:
                raise ValueError("mode counts must be in [0, 65535]")
        return struct.pack(f">{len(flat)}H", *flat)

    def _unpack(self, key: bytes) -> tuple[tuple[int, ...], ...]:
        flat = struct.unpack(f">{len(key) // 2}H", key)
        m = self.modes
        return tuple(flat[i * m:(i + 1) * m] for i in range(len(self.registers)))

    def _offset(self, register: str, mode: int) -> int:
        try:
            r = self.registers.index(register)
        except ValueError:
            raise ValueError(f"register {register!r} not present in {self.registers}") from None
        if not 0 <= mode < self.modes:
            raise ValueError(f"mode index {mode} out of range for {self.modes} modes")
        return 2 * (r * self.modes + mode)

    def _check_caps(self) -> None:
        n = len(self._amps)
        if n > AMPLITUDE_CAP:
            raise AmplitudeCapError(f"state needs {n} amplitudes (cap {AMPLITUDE_CAP})")
        if n * len(self.registers) * self.modes * 2 > KEY_BYTES_BUDGET:
            raise AmplitudeCapError(
                f"state of {n} terms x {self.modes} modes x {len(self.registers)} "
                f"registers exceeds the key storage budget"
            )

    # -- ladder operators ----------------------------------------------------

    def create(self, register: str, mode: int) -> "SparseState":
        """Raise the photon count of one mode, scaling each term by sqrt(n + 1)."""
        off = self._offset(register, mode)
        out = {}
        for key, amp in self._amps.items():
            n = int.from_bytes(key[off:off + 2], "big")
            if n >= _MAX_MODE_COUNT:
                raise ValueError("mode count overflow")
            new_key = key[:off] + (n + 1).to_bytes(2, "big") + key[off + 2:]
            out[new_key] = amp * math.sqrt(n + 1)
        return SparseState(self.modes, self.registers, out)

    def annihilate(self, register: str, mode: int) -> "SparseState":
        """Lower the photon count of one mode, scaling by sqrt(n); empty modes vanish."""
        off = self._offset(register, mode)
        out = {}
        for key, amp in self._amps.items():
            n = int.from_bytes(key[off:off + 2], "big")
            if n == 0:
                continue
            new_key = key[:off] + (n - 1).to_bytes(2, "big") + key[off + 2:]
            out[new_key] = amp * math.sqrt(n)
        return SparseState(self.modes, self.registers, out)

    # -- linear algebra ------------------------------------------------------

    def _check_compatible(self, other: "SparseState") -> None:
        if self.modes != other.modes or self.registers != other.registers:
            raise ValueError(
                f"incompatible states: {self.registers} x {self.modes} modes vs "
                f"{other.registers} x {other.modes} modes"
            )

    def inner(self, other: "SparseState") -> complex:
        """Inner product <self|other>, conjugate-linear in self."""
        self._check_compatible(other)
        if len(self._amps) <= len(other._amps):
            return complex(sum(
                amp.conjugate() * other._amps[key]
                for key, amp in self._amps.items() if key in other._amps
            ))
        return complex(sum(
            self._amps[key].conjugate() * amp
            for key, amp in other._amps.items() if key in self._amps
        ))

    def norm_sq(self) -> float:
        return sum(abs(amp) ** 2 for amp in self._amps.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def scaled(self, coeff: complex) -> "SparseState":
        """Scalar multiple with the standard post-prune."""
        return combine([(coeff, self)])

    def max_abs(self) -> float:
        """Largest amplitude magnitude; zero for the empty state."""
        return max((abs(amp) for amp in self._amps.values()), default=0.0)

    # -- inspection ----------------------------------------------------------

    def __len__(self) -> int:
        return len(self._amps)

    def __repr__(self) -> str:
        return f"SparseState(modes={self.modes}, registers={self.registers}, terms={len(self._amps)})"

    def terms(self) -> Iterator[tuple[tuple[tuple[int, ...], ...], complex]]:
        """Iterate (per-register count tuples, amplitude) pairs, unordered."""
        for key, amp in self._amps.items():
            yield self._unpack(key), amp

    def amplitude(self, counts) -> complex:
        """Amplitude of one basis arrangement; zero when absent."""
        return self._amps.get(self._pack(counts), 0j)

    # -- serialization ---------------------------------------------------------

    def dump_lines(self) -> list[str]:
        """One line per basis term, heaviest arrangement first.

        Tab-separated fields: comma-joined counts for each register in
        canonical order, then real and imaginary amplitude parts with 17
        significant digits.
        """
        lines = []
        for key in sorted(self._amps, reverse=True):
            counts = self._unpack(key)
            amp = self._amps[key]
            cols = [",".join(str(c) for c in vector) for vector in counts]
            cols.append(f"{amp.real:.17g}")
            cols.append(f"{amp.imag:.17g}")
            lines.append("\t".join(cols))
        return lines

    def dump(self, path) -> None:
        with open(path, "w") as handle:
            for line in self.dump_lines():
                handle.write(line + "\n")


def combine(terms: Iterable[tuple[complex, SparseState]]) -> SparseState:
    """Linear combination sum_i c_i |state_i| with post-prune of tiny amplitudes.

    Amplitudes below PRUNE_THRESHOLD are dropped; the result must respect
    the amplitude cap or AmplitudeCapError is raised.
    """
    terms = [(complex(c), s) for c, s in terms]
    if not terms:
        raise ValueError("combine needs at least one term")
    first = terms[0][1]
    acc: dict[bytes, complex] = {}
    for coeff, state in terms:
        first._check_compatible(state)
        if coeff == 0:
            continue
        for key, amp in state._amps.items():
            acc[key] = acc.get(key, 0j) + coeff * amp
    pruned = {key: amp for key, amp in acc.items() if abs(amp) >= PRUNE_THRESHOLD}
    result = SparseState(first.modes, first.registers, pruned)
    result._check_caps()
    return result
