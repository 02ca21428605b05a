"""Spectral observables, complete commuting pairs, and degenerate outcome functions.

A commuting pair is kept as its joint eigenbasis with one (a, b) eigenvalue
pair per vector; applying a real function f to those pairs groups the basis
into f-eigenspaces, which is all the measurement engine needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DimensionError,
    FunctionDomainError,
    InvariantError,
    NotCompleteError,
)
from .hilbert import ORTHO_TOL, PROB_ZERO, Projector, StateVector, project, tensor

EIG_SEP = 1e-9  # eigenvalues closer than this are treated as equal
GS_TOL = 1e-6   # Gram-Schmidt residual norm below which a vector is dependent

OutcomeFunction = Callable[[float, float], float]


def _check_orthonormal(vectors: Sequence[StateVector], what: str) -> None:
    matrix = np.vstack([v.amps for v in vectors])
    gram = matrix.conj() @ matrix.T
    dev = float(np.max(np.abs(gram - np.eye(len(vectors)))))
    if dev > ORTHO_TOL:
        raise InvariantError(f"{what} is not orthonormal (max deviation {dev:.3e})")


def _check_real(value, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvariantError(f"{what} must be finite, got {value!r}")
    return value


@dataclass(frozen=True, eq=False)
class SpectralObservable:
    """Observable in spectral form: (eigenvalue, eigenvectors) groups whose
    vectors together form an orthonormal basis."""

    groups: tuple[tuple[float, tuple[StateVector, ...]], ...]

    def __post_init__(self):
        groups = tuple(
            (_check_real(value, "eigenvalue"), tuple(vectors))
            for value, vectors in self.groups
        )
        if not groups or any(not vectors for _, vectors in groups):
            raise InvariantError("observable needs nonempty eigenvector groups")
        vectors = [v for _, vs in groups for v in vs]
        dim = vectors[0].dim
        if any(v.dim != dim for v in vectors):
            raise DimensionError("eigenvectors differ in dimension")
        if len(vectors) != dim:
            raise InvariantError(
                f"{len(vectors)} eigenvectors do not span a dimension-{dim} space"
            )
        _check_orthonormal(vectors, "eigenbasis")
        values = [value for value, _ in groups]
        for i, x in enumerate(values):
            for y in values[i + 1:]:
                if abs(x - y) <= EIG_SEP:
                    raise InvariantError(
                        f"eigenvalues {x!r} and {y!r} are not separated"
                    )
        object.__setattr__(self, "groups", groups)

    @property
    def dim(self) -> int:
        return self.groups[0][1][0].dim

    @property
    def is_complete(self) -> bool:
        """True when every eigenvalue is simple (no degeneracy)."""
        return all(len(vectors) == 1 for _, vectors in self.groups)


class JointVector(NamedTuple):
    """One joint eigenvector with its (a, b) eigenvalue pair."""

    a: float
    b: float
    vector: StateVector


@dataclass(frozen=True, eq=False)
class CommutingPair:
    """Complete commuting pair: a joint orthonormal eigenbasis whose (a, b)
    eigenvalue pairs are pairwise distinct."""

    joint: tuple[JointVector, ...]
    _matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        joint = tuple(
            JointVector(_check_real(jv[0], "eigenvalue a"),
                        _check_real(jv[1], "eigenvalue b"), jv[2])
            for jv in self.joint
        )
        if not joint:
            raise InvariantError("commuting pair needs at least one joint vector")
        dim = joint[0].vector.dim
        if any(jv.vector.dim != dim for jv in joint):
            raise DimensionError("joint eigenvectors differ in dimension")
        if len(joint) != dim:
            raise InvariantError(
                f"{len(joint)} joint vectors do not span a dimension-{dim} space"
            )
        _check_orthonormal([jv.vector for jv in joint], "joint eigenbasis")
        for i, x in enumerate(joint):
            for y in joint[i + 1:]:
                if abs(x.a - y.a) <= EIG_SEP and abs(x.b - y.b) <= EIG_SEP:
                    raise InvariantError(
                        f"joint eigenvalue pair ({x.a!r}, {x.b!r}) repeats: "
                        "the pair does not lift the degeneracy"
                    )
        matrix = np.vstack([jv.vector.amps for jv in joint])
        matrix.setflags(write=False)
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "_matrix", matrix)

    @property
    def dim(self) -> int:
        return self.joint[0].vector.dim


@dataclass(frozen=True, eq=False)
class FunctionObservable:
    """Eigenspace grouping of a commuting pair under a real outcome function."""

    pair: CommutingPair
    fvalues: tuple[float, ...]
    eigenspaces: tuple[tuple[float, tuple[int, ...]], ...]

    def __post_init__(self):
        pair = self.pair
        fvalues = tuple(_check_real(v, "f value") for v in self.fvalues)
        if len(fvalues) != pair.dim:
            raise InvariantError("need one f value per joint eigenvector")
        spaces = tuple(
            (_check_real(rep, "eigenspace value"), tuple(int(k) for k in members))
            for rep, members in self.eigenspaces
        )
        seen = sorted(k for _, members in spaces for k in members)
        if seen != list(range(pair.dim)):
            raise InvariantError("eigenspaces must partition the joint indices")
        for rep, members in spaces:
            for k in members:
                if abs(fvalues[k] - rep) > EIG_SEP:
                    raise InvariantError(
                        f"f value {fvalues[k]!r} strays from its eigenspace value {rep!r}"
                    )
        reps = [rep for rep, _ in spaces]
        for i, x in enumerate(reps):
            for y in reps[i + 1:]:
                if abs(x - y) <= EIG_SEP:
                    raise InvariantError(
                        f"eigenspace values {x!r} and {y!r} are not separated"
                    )
        object.__setattr__(self, "pair", pair)
        object.__setattr__(self, "fvalues", fvalues)
        object.__setattr__(self, "eigenspaces", spaces)

    @property
    def dim(self) -> int:
        return self.pair.dim


def pauli_direction(theta: float) -> SpectralObservable:
    """Spin observable along an angle-theta axis in the x-z plane:
    cos(theta)*sigma_z + sin(theta)*sigma_x."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise InvariantError("direction angle must be finite")
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    plus = StateVector([c, s])
    minus = StateVector([-s, c])
    return SpectralObservable(((1.0, (plus,)), (-1.0, (minus,))))


def pair_from_locals(
    obs_a: SpectralObservable, obs_b: SpectralObservable
) -> CommutingPair:
    """Joint eigenbasis of two complete single-particle observables, A acting
    on the left (slow) tensor factor; ordering is row-major in (A, B) groups."""
    if not obs_a.is_complete:
        raise NotCompleteError("left observable is degenerate")
    if not obs_b.is_complete:
        raise NotCompleteError("right observable is degenerate")
    joint = [
        JointVector(a, b, tensor(va[0], vb[0]))
        for a, va in obs_a.groups
        for b, vb in obs_b.groups
    ]
    return CommutingPair(tuple(joint))


def product_function(a: float, b: float) -> float:
    """The built-in outcome function: the product of the two results."""
    return a * b


def table_function(rows: Sequence[tuple[float, float, float]]) -> OutcomeFunction:
    """Outcome function defined by (a, b, value) rows, matched within EIG_SEP."""
    table = [(float(a), float(b), float(v)) for a, b, v in rows]

    def lookup(a: float, b: float) -> float:
        for ra, rb, value in table:
            if abs(a - ra) <= EIG_SEP and abs(b - rb) <= EIG_SEP:
                return value
        raise FunctionDomainError(f"no table entry for outcome pair ({a!r}, {b!r})")

    return lookup


def _resolve_function(f) -> OutcomeFunction:
    if f == "product":
        return product_function
    if callable(f):
        return f
    raise FunctionDomainError(f"not an outcome function: {f!r}")


def function_observable(pair: CommutingPair, f) -> FunctionObservable:
    """Group the joint eigenbasis into eigenspaces of f(a, b).

    ``f`` is a callable on eigenvalue pairs or the string ``"product"``.
    Values within EIG_SEP of each other are clustered into one eigenspace;
    eigenspaces are ordered by their first joint index.
    """
    fn = _resolve_function(f)
    fvalues = []
    for jv in pair.joint:
        try:
            value = float(fn(jv.a, jv.b))
        except FunctionDomainError:
            raise
        except Exception as exc:
            raise FunctionDomainError(
                f"outcome function failed on ({jv.a!r}, {jv.b!r}): {exc}"
            ) from exc
        if not math.isfinite(value):
            raise FunctionDomainError(
                f"outcome function is not finite on ({jv.a!r}, {jv.b!r})"
            )
        fvalues.append(value)

    order = sorted(range(len(fvalues)), key=lambda k: fvalues[k])
    clusters: list[list[int]] = [[order[0]]]
    for k in order[1:]:
        if fvalues[k] - fvalues[clusters[-1][-1]] > EIG_SEP:
            clusters.append([])
        clusters[-1].append(k)
    clusters.sort(key=min)
    eigenspaces = tuple(
        (sum(fvalues[k] for k in members) / len(members), tuple(sorted(members)))
        for members in clusters
    )
    return FunctionObservable(pair, tuple(fvalues), eigenspaces)


def eigenspace_projectors(fo: FunctionObservable) -> list[tuple[float, Projector]]:
    """One projector per f-eigenspace, spanned by its member joint vectors."""
    return [
        (fvalue, Projector(tuple(fo.pair.joint[k].vector for k in members)))
        for fvalue, members in fo.eigenspaces
    ]


def _complete_eigenspace(
    seed: np.ndarray, members: list[np.ndarray]
) -> list[np.ndarray]:
    """Orthonormal basis of span(members) starting from ``seed``; remaining
    vectors come from Gram-Schmidt over the members in index order (two
    orthogonalization passes keep the result orthonormal to ~1e-15 even when
    the seed nearly coincides with a member)."""
    basis = [seed]
    for m in members:
        u = m.astype(np.complex128)
        for _ in range(2):
            for v in basis:
                u = u - np.vdot(v, u) * v
        norm = float(np.linalg.norm(u))
        if norm > GS_TOL:
            basis.append(u / norm)
    if len(basis) != len(members):
        raise InvariantError(
            "eigenspace completion failed: the projected state is nearly "
            "dependent with several member vectors at once"
        )
    return basis


def co_measurement_basis(
    state: StateVector, fo: FunctionObservable
) -> list[tuple[float, list[StateVector]]]:
    """Degeneracy-lifting basis adapted to ``state``.

    For every eigenspace the state overlaps, the first vector is the
    normalized projection of the state (so a fine-grained measurement in
    this basis reproduces the coarse f-measurement statistics); the rest
    complete that eigenspace orthonormally. Eigenspaces the state does
    not touch keep their member joint vectors. The union over eigenspaces is
    an orthonormal basis of the whole space.
    """
    if state.dim != fo.pair.dim:
        raise DimensionError(f"dimension mismatch: {state.dim} vs {fo.pair.dim}")
    out: list[tuple[float, list[StateVector]]] = []
    for fvalue, members in fo.eigenspaces:
        vectors = [fo.pair.joint[k].vector for k in members]
        prob, post = project(state, Projector(tuple(vectors)))
        if post is None:
            out.append((fvalue, list(vectors)))
            continue
        completed = _complete_eigenspace(post.amps, [v.amps for v in vectors])
        out.append((fvalue, [post] + [StateVector(u) for u in completed[1:]]))
    return out
