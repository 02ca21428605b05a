"""Finite-dimensional complex states, subspace projectors, and the projection rule.

Projectors are stored as orthonormal spanning sets rather than dense
matrices, so projecting is a handful of inner products and idempotence
holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvariantError

TOL_NORM = 1e-12   # |sum of squared moduli - 1| allowed for a normalized vector
ORTHO_TOL = 1e-12  # |<v_i, v_j> - delta_ij| allowed for an orthonormal set
PROB_ZERO = 1e-14  # probabilities at or below this count as impossible
PHASE_PIVOT = 1e-9  # smallest modulus eligible to anchor the global phase


def _as_amplitudes(values) -> np.ndarray:
    amps = np.asarray(values, dtype=np.complex128)
    if amps.ndim != 1 or amps.size == 0:
        raise InvariantError("amplitudes must form a nonempty 1-d vector")
    if not np.all(np.isfinite(amps)):
        raise InvariantError("amplitudes must be finite")
    amps = amps.copy()
    amps.setflags(write=False)
    return amps


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm vector of complex amplitudes.

    The constructor validates the norm but never rescales, so amplitudes
    round-trip bit-for-bit through serialization. Use :meth:`normalized`
    to build a state from unnormalized data.
    """

    amps: np.ndarray

    def __post_init__(self):
        amps = _as_amplitudes(self.amps)
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > TOL_NORM:
            raise InvariantError(
                f"state is not normalized: sum of squared moduli = {norm2!r}"
            )
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, values) -> "StateVector":
        """Scale arbitrary nonzero amplitudes to unit norm."""
        amps = np.asarray(values, dtype=np.complex128)
        norm = float(np.linalg.norm(amps))
        if not np.isfinite(norm) or norm <= PROB_ZERO:
            raise InvariantError("cannot normalize a (near-)zero vector")
        return cls(amps / norm)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def __repr__(self) -> str:
        return f"StateVector({np.array2string(self.amps, separator=', ')})"


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector given by an orthonormal set spanning its range."""

    basis: tuple[StateVector, ...]
    _matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        basis = tuple(self.basis)
        if not basis:
            raise InvariantError("projector needs at least one basis vector")
        dim = basis[0].dim
        if any(v.dim != dim for v in basis):
            raise DimensionError("projector basis vectors differ in dimension")
        if len(basis) > dim:
            raise InvariantError(
                f"rank {len(basis)} exceeds dimension {dim}"
            )
        matrix = np.vstack([v.amps for v in basis])
        gram = matrix.conj() @ matrix.T
        dev = float(np.max(np.abs(gram - np.eye(len(basis)))))
        if dev > ORTHO_TOL:
            raise InvariantError(
                f"projector basis is not orthonormal (max deviation {dev:.3e})"
            )
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_matrix", matrix)

    @property
    def dim(self) -> int:
        return self.basis[0].dim

    @property
    def rank(self) -> int:
        return len(self.basis)


def inner_product(u: StateVector, v: StateVector) -> complex:
    """<u|v> with the conjugate on the first argument."""
    if u.dim != v.dim:
        raise DimensionError(f"dimension mismatch: {u.dim} vs {v.dim}")
    return complex(np.vdot(u.amps, v.amps))


def tensor(u: StateVector, v: StateVector) -> StateVector:
    """Composite state u (x) v; u is the slow (left) factor, index = i*v.dim + j."""
    return StateVector(np.kron(u.amps, v.amps))


def canonical_phase(amps: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the first amplitude above the pivot threshold
    is real and positive."""
    pivots = np.flatnonzero(np.abs(amps) > PHASE_PIVOT)
    if pivots.size == 0:
        return amps
    pivot = amps[pivots[0]]
    return amps * (pivot.conjugate() / abs(pivot))


def project(state: StateVector, p: Projector) -> tuple[float, StateVector | None]:
    """Apply the projection rule.

    Returns the outcome probability and, unless the outcome is impossible
    (probability <= PROB_ZERO), the normalized post-measurement state with
    its global phase canonicalized.
    """
    if state.dim != p.dim:
        raise DimensionError(f"dimension mismatch: {state.dim} vs {p.dim}")
    coeffs = p._matrix.conj() @ state.amps
    prob = float(np.vdot(coeffs, coeffs).real)
    if prob <= PROB_ZERO:
        return prob, None
    post = canonical_phase((coeffs @ p._matrix) / np.sqrt(prob))
    return prob, StateVector(post)


def phase_aligned_max_diff(u: StateVector, v: StateVector) -> float:
    """max_k |u_k - e^{i phi} v_k| minimized over the global phase of v.

    Returns a large sentinel when the states are (near-)orthogonal and no
    alignment exists.
    """
    if u.dim != v.dim:
        raise DimensionError(f"dimension mismatch: {u.dim} vs {v.dim}")
    overlap = np.vdot(v.amps, u.amps)
    if abs(overlap) <= PROB_ZERO:
        return 2.0
    aligned = v.amps * (overlap / abs(overlap))
    return float(np.max(np.abs(u.amps - aligned)))
