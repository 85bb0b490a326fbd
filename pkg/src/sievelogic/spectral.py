"""Finite-dimensional Hermitian operator algebra.

Operators are stored together with a fully resolved spectrum: distinct
eigenvalues in ascending order and one orthogonal spectral projector per
eigenvalue.  All numerics are double-precision complex; every invariant
is checked against explicit tolerances because exact spectral theory has
to be approximated at machine precision.

Matrix closeness is always measured in the max-abs entry norm.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    DegenerateClusteringError,
    InputError,
    NotHermitianError,
    ZeroNormError,
)
from .sieves import Partition


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances; every field can be overridden."""

    tau_herm: float = 1e-9
    tau_proj: float = 1e-9
    tau_rec: float = 1e-9
    tau_psd: float = 1e-9
    tau_tr: float = 1e-9
    tau_one: float = 1e-9
    eps_group: float = 1e-8

    def replace(self, **overrides) -> "Tolerances":
        known = {f.name for f in dataclasses.fields(self)}
        bad = set(overrides) - known
        if bad:
            raise InputError(f"unknown tolerance key(s): {', '.join(sorted(bad))}")
        return dataclasses.replace(self, **overrides)

    @classmethod
    def from_mapping(cls, overrides: Mapping[str, float]) -> "Tolerances":
        known = {f.name for f in dataclasses.fields(cls)}
        bad = set(overrides) - known
        if bad:
            raise InputError(f"unknown tolerance key(s): {', '.join(sorted(bad))}")
        return cls(**overrides)


DEFAULT_TOL = Tolerances()

ValueMap = Union[Callable[[float], float], Mapping[int, float], Sequence[float]]


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


def as_matrix(data, dim: Optional[int] = None) -> np.ndarray:
    """Validate and normalize a square complex matrix."""
    m = np.asarray(data, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise InputError(f"expected dimension {dim}, got {m.shape[0]}")
    if not np.isfinite(m.view(float)).all():
        raise InputError("matrix entries must be finite")
    return m


def max_abs(m: np.ndarray) -> float:
    return 0.0 if m.size == 0 else float(np.max(np.abs(m)))


def is_hermitian(m: np.ndarray, tol: float) -> bool:
    return max_abs(m - m.conj().T) <= tol


def require_hermitian(m: np.ndarray, tol: float) -> np.ndarray:
    if not is_hermitian(m, tol):
        raise NotHermitianError(f"matrix is not Hermitian within {tol:g}")
    return (m + m.conj().T) / 2.0


def is_projector(p: np.ndarray, tol: float) -> bool:
    return is_hermitian(p, tol) and max_abs(p @ p - p) <= tol


def projector_leq(p: np.ndarray, q: np.ndarray, tol: float) -> bool:
    """Projector order: p <= q iff q absorbs p (q p = p)."""
    return max_abs(q @ p - p) <= tol


def cluster_values(values: Sequence[float], eps: float) -> list[list[int]]:
    """Group indices whose values chain together within eps.

    Raises DegenerateClusteringError when a chain spans more than eps,
    because then the grouping would depend on processing order.
    """
    order = sorted(range(len(values)), key=lambda i: values[i])
    groups: list[list[int]] = []
    for i in order:
        if groups and values[i] - values[groups[-1][-1]] <= eps:
            groups[-1].append(i)
        else:
            groups.append([i])
    for g in groups:
        if values[g[-1]] - values[g[0]] > eps:
            raise DegenerateClusteringError(
                f"values {values[g[0]]!r}..{values[g[-1]]!r} merge only through a chain wider than {eps:g}"
            )
    return groups


class SpectralOperator:
    """A Hermitian matrix with resolved finite spectrum.

    eigenvalues are strictly increasing; projectors[i] projects onto the
    eigenspace of eigenvalues[i]; the projectors are orthogonal, resolve
    the identity and reconstruct the matrix.
    """

    __slots__ = ("matrix", "eigenvalues", "projectors", "dim")

    def __init__(
        self,
        matrix: np.ndarray,
        eigenvalues: Sequence[float],
        projectors: Sequence[np.ndarray],
        tol: Tolerances = DEFAULT_TOL,
    ):
        matrix = as_matrix(matrix)
        dim = matrix.shape[0]
        eigenvalues = tuple(float(v) for v in eigenvalues)
        projectors = tuple(_freeze(as_matrix(p, dim)) for p in projectors)
        if len(eigenvalues) != len(projectors) or not eigenvalues:
            raise InputError("need one projector per eigenvalue")
        if any(b <= a for a, b in zip(eigenvalues, eigenvalues[1:])):
            raise InputError("eigenvalues must be strictly increasing")
        if not is_hermitian(matrix, tol.tau_herm):
            raise NotHermitianError(f"operator matrix not Hermitian within {tol.tau_herm:g}")
        for p in projectors:
            if not is_projector(p, tol.tau_proj):
                raise InputError("spectral projector fails Hermitian idempotence")
            if abs(np.trace(p).real) < 0.5:
                raise InputError("zero spectral projector")
        for i, p in enumerate(projectors):
            for q in projectors[i + 1 :]:
                if max_abs(p @ q) > tol.tau_proj:
                    raise InputError("spectral projectors not mutually orthogonal")
        if max_abs(sum(projectors) - np.eye(dim)) > tol.tau_proj:
            raise InputError("spectral projectors do not resolve the identity")
        resum = sum(v * p for v, p in zip(eigenvalues, projectors))
        if max_abs(resum - matrix) > tol.tau_rec:
            raise InputError("spectral data does not reconstruct the matrix")
        self.matrix = _freeze(matrix)
        self.eigenvalues = eigenvalues
        self.projectors = projectors
        self.dim = dim

    @property
    def k(self) -> int:
        """Number of distinct eigenvalues."""
        return len(self.eigenvalues)

    def projector(self, indices) -> np.ndarray:
        """Spectral projector for a set of eigenvalue indices."""
        idx = sorted(set(indices))
        if any(i < 0 or i >= self.k for i in idx):
            raise InputError(f"eigenvalue index outside 0..{self.k - 1}")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i in idx:
            out = out + self.projectors[i]
        return out

    def eigenvalue_index(self, value: float, eps: float) -> int:
        """Index of the eigenvalue matching `value` within eps."""
        diffs = [abs(v - value) for v in self.eigenvalues]
        i = int(np.argmin(diffs))
        if diffs[i] > eps:
            raise InputError(f"no eigenvalue within {eps:g} of {value!r}")
        return i

    def __repr__(self):
        vals = ", ".join(f"{v:g}" for v in self.eigenvalues)
        return f"SpectralOperator(dim={self.dim}, eigenvalues=[{vals}])"


def decompose(m, tol: Tolerances = DEFAULT_TOL, eps_group: Optional[float] = None) -> SpectralOperator:
    """Resolve a Hermitian matrix into clustered eigenvalues and projectors.

    Raw eigenvalues within eps_group of each other merge into a single
    spectral point whose projector sums the corresponding eigenspaces.
    """
    eps = tol.eps_group if eps_group is None else eps_group
    if eps <= 0:
        raise InputError("eps_group must be positive")
    m = as_matrix(m)
    herm = require_hermitian(m, tol.tau_herm)
    raw, vecs = np.linalg.eigh(herm)
    groups = cluster_values([float(v) for v in raw], eps)
    eigenvalues = []
    projectors = []
    for g in groups:
        eigenvalues.append(float(np.mean([raw[i] for i in g])))
        cols = vecs[:, g]
        p = cols @ cols.conj().T
        projectors.append((p + p.conj().T) / 2.0)
    return SpectralOperator(m, eigenvalues, projectors, tol)


def from_spectral_data(
    eigenvalues: Sequence[float],
    projectors: Sequence[np.ndarray],
    tol: Tolerances = DEFAULT_TOL,
) -> SpectralOperator:
    """Build an operator from exact spectral data, bypassing the eigensolver."""
    matrix = sum(float(v) * as_matrix(p) for v, p in zip(eigenvalues, projectors))
    return SpectralOperator(matrix, eigenvalues, projectors, tol)


def normalize_value_map(a: SpectralOperator, f: ValueMap) -> tuple[float, ...]:
    """Resolve a value map to one real per eigenvalue index of `a`.

    Accepts a callable on eigenvalues, a mapping from index to value, or
    a sequence ordered by index; must be total.
    """
    if callable(f):
        return tuple(float(f(v)) for v in a.eigenvalues)
    if isinstance(f, Mapping):
        missing = set(range(a.k)) - set(f)
        if missing:
            raise InputError(f"value map missing indices {sorted(missing)}")
        return tuple(float(f[i]) for i in range(a.k))
    values = tuple(float(v) for v in f)
    if len(values) != a.k:
        raise InputError(f"value map must list {a.k} values")
    return values


def value_fibers(
    a: SpectralOperator, f: ValueMap, tol: Tolerances = DEFAULT_TOL
) -> tuple[Partition, tuple[float, ...]]:
    """Fiber partition of a's eigenvalue indices under f, with one label
    (the clustered function value) per block, in canonical block order."""
    values = normalize_value_map(a, f)
    groups = cluster_values(values, tol.eps_group)
    pairs = []
    for g in groups:
        label = float(np.mean([values[i] for i in g]))
        pairs.append((tuple(sorted(g)), label))
    pairs.sort(key=lambda t: t[0][0])
    return Partition.of([p[0] for p in pairs]), tuple(p[1] for p in pairs)


def apply_function(a: SpectralOperator, f: ValueMap, tol: Tolerances = DEFAULT_TOL) -> SpectralOperator:
    """The operator f(a): same eigenbasis, eigenvalues pushed through f,
    fibers of f merged into single spectral points."""
    fibers, labels = value_fibers(a, f, tol)
    order = sorted(range(len(labels)), key=lambda pos: labels[pos])
    eigenvalues = [labels[pos] for pos in order]
    projectors = [a.projector(fibers.blocks[pos]) for pos in order]
    return from_spectral_data(eigenvalues, projectors, tol)


def is_function_of(
    a: SpectralOperator, m: SpectralOperator, tol: Tolerances = DEFAULT_TOL
) -> Optional[dict[int, float]]:
    """The value map g with a = g(m), if one exists.

    a = g(m) holds iff a is constant on each eigenspace of m and carries
    no cross terms, i.e. the blockwise reconstruction matches a.
    """
    if a.dim != m.dim:
        raise InputError("operators act on different dimensions")
    values = {}
    recon = np.zeros((a.dim, a.dim), dtype=complex)
    for i, p in enumerate(m.projectors):
        rank = round(float(np.trace(p).real))
        c = float(np.trace(p @ a.matrix).real) / rank
        values[i] = c
        recon = recon + c * p
    if max_abs(recon - a.matrix) > tol.tau_rec:
        return None
    return values


def coarse_grained_projector(
    a: SpectralOperator, f: ValueMap, delta, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """Spectral projector of f(a) for the image f(delta): the sum of a's
    projectors over every index sharing an f-fiber with delta."""
    idx = set(delta)
    if any(i < 0 or i >= a.k for i in idx):
        raise InputError(f"eigenvalue index outside 0..{a.k - 1}")
    fibers, _ = value_fibers(a, f, tol)
    chosen = []
    for block in fibers.blocks:
        if idx & set(block):
            chosen.extend(block)
    return a.projector(chosen)


class QuantumState:
    """A vector, density matrix or projector used to induce valuations."""

    __slots__ = ("kind", "payload", "rank")

    def __init__(self, kind: str, payload: np.ndarray, rank: int = 1):
        self.kind = kind
        self.payload = _freeze(payload)
        self.rank = rank

    @staticmethod
    def vector(v, tol: Tolerances = DEFAULT_TOL) -> "QuantumState":
        vec = np.asarray(v, dtype=complex).reshape(-1)
        if not np.isfinite(vec.view(float)).all():
            raise InputError("vector entries must be finite")
        if np.vdot(vec, vec).real <= tol.tau_psd:
            raise ZeroNormError("state vector has zero norm")
        return QuantumState("vector", vec)

    @staticmethod
    def density(m, tol: Tolerances = DEFAULT_TOL) -> "QuantumState":
        mat = require_hermitian(as_matrix(m), tol.tau_herm)
        if abs(np.trace(mat).real - 1.0) > tol.tau_tr:
            raise InputError("density matrix must have unit trace")
        if float(np.linalg.eigvalsh(mat).min()) < -tol.tau_psd:
            raise InputError("density matrix must be positive semidefinite")
        return QuantumState("density", mat)

    @staticmethod
    def projector(m, tol: Tolerances = DEFAULT_TOL) -> "QuantumState":
        mat = as_matrix(m)
        if not is_projector(mat, tol.tau_proj):
            raise InputError("projector state must be Hermitian idempotent")
        rank = round(float(np.trace(mat).real))
        if rank < 1:
            raise InputError("projector state must be nonzero")
        return QuantumState("projector", mat, rank)

    @property
    def dim(self) -> int:
        return int(self.payload.shape[0])

    def density_matrix(self) -> np.ndarray:
        """The density matrix this state induces probabilities through."""
        if self.kind == "vector":
            v = self.payload
            return np.outer(v, v.conj()) / np.vdot(v, v).real
        if self.kind == "projector":
            return self.payload / self.rank
        return self.payload


def prob(s: QuantumState, p: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> float:
    """Probability the state assigns to a projector."""
    p = as_matrix(p, s.dim)
    if not is_projector(p, tol.tau_proj):
        raise InputError("prob expects a Hermitian idempotent")
    return float(np.trace(s.density_matrix() @ p).real)
