"""Boolean contexts and the subalgebra poset.

A Boolean context is a finite Boolean algebra of commuting projectors,
presented by its atoms.  All subalgebras of one top context form a
poset: a subalgebra's atoms are sums of top atoms over the blocks of a
partition, and inclusion runs opposite to refinement.  Elements of a
node are unions of its blocks, written as frozensets of top-atom
indices, so all poset computations are exact set arithmetic.

Truth values over a node are down-closed sets of subalgebras (further
coarsenings).  A density matrix induces such a truth value for each
projector: the set of coarsenings under which the projector's canonical
coarse-graining has probability one.
"""
from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import InputError, NotSubalgebraError, ZeroNormError
from .report import Report
from .sieves import Mode, Partition, admissible_partitions
from .spectral import (
    DEFAULT_TOL,
    QuantumState,
    Tolerances,
    as_matrix,
    is_hermitian,
    max_abs,
)

Element = frozenset[int]
ThetaMap = Union[
    Callable[[Partition, Partition, Element], Element],
    Mapping[tuple[Partition, Partition], Mapping[Element, Element]],
]


class BooleanContext:
    """A finite Boolean algebra of projectors, given by its atoms.

    Atoms must be nonzero mutually orthogonal projectors resolving the
    identity; the algebra's elements are the 2^n subset sums.
    """

    __slots__ = ("atoms", "dim", "tol")

    def __init__(self, atoms: Sequence, tol: Tolerances = DEFAULT_TOL):
        mats = [as_matrix(a) for a in atoms]
        if not mats:
            raise InputError("a Boolean context needs at least one atom")
        dim = mats[0].shape[0]
        for i, m in enumerate(mats):
            if m.shape != (dim, dim):
                raise InputError("atoms differ in dimension")
            if not is_hermitian(m, tol.tau_herm):
                raise InputError(f"atom {i} is not Hermitian")
            if max_abs(m @ m - m) > tol.tau_proj:
                raise InputError(f"atom {i} is not idempotent")
            if max_abs(m) <= tol.tau_proj:
                raise InputError(f"atom {i} is zero")
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if max_abs(mats[i] @ mats[j]) > tol.tau_proj:
                    raise InputError(f"atoms {i} and {j} are not orthogonal")
        total = sum(mats)
        if max_abs(total - np.eye(dim)) > tol.tau_proj:
            raise InputError("atoms do not sum to the identity")
        for m in mats:
            m.setflags(write=False)
        self.atoms = tuple(mats)
        self.dim = dim
        self.tol = tol

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def element(self, indices: Iterable[int]) -> np.ndarray:
        """The subset-sum projector over the given atom indices."""
        idx = set(indices)
        if any(i < 0 or i >= self.n_atoms for i in idx):
            raise InputError(f"atom index outside 0..{self.n_atoms - 1}")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i in idx:
            out = out + self.atoms[i]
        return out

    def elements(self):
        """All (index set, projector) pairs of the algebra."""
        for n in range(self.n_atoms + 1):
            for combo in itertools.combinations(range(self.n_atoms), n):
                yield frozenset(combo), self.element(combo)

    def __repr__(self):
        return f"BooleanContext(dim={self.dim}, atoms={self.n_atoms})"


def context_from_vectors(vectors: Sequence, tol: Tolerances = DEFAULT_TOL) -> BooleanContext:
    """The context whose atoms are the ray projectors of a list of
    mutually orthogonal vectors spanning the space.  Vectors need not be
    normalized."""
    mats = []
    for v in vectors:
        arr = np.asarray(v, dtype=complex).reshape(-1)
        norm2 = float(np.vdot(arr, arr).real)
        if norm2 <= tol.tau_proj:
            raise ZeroNormError("ray vector has zero norm")
        mats.append(np.outer(arr, arr.conj()) / norm2)
    return BooleanContext(mats, tol)


class SubalgebraPoset:
    """All subalgebras of one top context, ordered by inclusion.

    Nodes are partitions of the top's atom indices; a node's atoms are
    the block sums.  Node q is included in node p exactly when q
    coarsens p, so the top (discrete partition) is the greatest node.
    The mode chooses whether the trivial one-block algebra is a node.
    """

    __slots__ = ("top", "mode", "nodes", "_down")

    def __init__(self, top: BooleanContext, mode: Mode = Mode.WITH_CONSTANTS):
        self.top = top
        self.mode = mode
        self.nodes = tuple(sorted(admissible_partitions(top.n_atoms, mode)))
        self._down = {}

    def contains(self, w: Partition) -> bool:
        return w.k == self.top.n_atoms and w in self.nodes

    def _require(self, w: Partition) -> None:
        if not self.contains(w):
            raise InputError(f"partition {w} is not a node of this poset")

    def leq(self, w2: Partition, w1: Partition) -> bool:
        """Whether w2 is a subalgebra of w1."""
        self._require(w1)
        self._require(w2)
        return w2.coarsens(w1)

    def down_set(self, w: Partition) -> frozenset[Partition]:
        """All subalgebras of w, including w itself."""
        self._require(w)
        hit = self._down.get(w)
        if hit is None:
            hit = frozenset(q for q in self.nodes if q.coarsens(w))
            self._down[w] = hit
        return hit

    def elements(self, w: Partition) -> tuple[Element, ...]:
        """All elements of node w as frozensets of top-atom indices,
        in a deterministic order."""
        self._require(w)
        out = []
        for n in range(w.n_blocks + 1):
            for combo in itertools.combinations(range(w.n_blocks), n):
                out.append(frozenset(i for b in combo for i in w.blocks[b]))
        return tuple(sorted(out, key=lambda s: (len(s), sorted(s))))

    def is_element(self, w: Partition, alpha: Element) -> bool:
        self._require(w)
        if not alpha <= frozenset(range(self.top.n_atoms)):
            return False
        return all(set(b) <= alpha or not (set(b) & alpha) for b in w.blocks)

    def element_matrix(self, alpha: Element) -> np.ndarray:
        return self.top.element(alpha)

    def node_context(self, w: Partition) -> BooleanContext:
        """The node as a standalone context with block-sum atoms."""
        self._require(w)
        return BooleanContext([self.top.element(b) for b in w.blocks], self.top.tol)

    def __repr__(self):
        return f"SubalgebraPoset(atoms={self.top.n_atoms}, nodes={len(self.nodes)})"


def canonical_coarsening(
    poset: SubalgebraPoset, w1: Partition, w2: Partition, alpha: Element
) -> Element:
    """The least element of subalgebra w2 dominating alpha: the union of
    w2's blocks that meet alpha."""
    poset._require(w1)
    poset._require(w2)
    if not w2.coarsens(w1):
        raise NotSubalgebraError(f"{w2} is not a subalgebra of {w1}")
    if not poset.is_element(w1, alpha):
        raise InputError(f"{sorted(alpha)} is not an element of {w1}")
    out: set[int] = set()
    for b in w2.blocks:
        if set(b) & alpha:
            out |= set(b)
    return frozenset(out)


def _as_theta(poset: SubalgebraPoset, theta: Optional[ThetaMap]):
    if theta is None:
        return lambda w1, w2, alpha: canonical_coarsening(poset, w1, w2, alpha)
    if callable(theta):
        return theta
    table = theta
    return lambda w1, w2, alpha: table[(w1, w2)][alpha]


def check_coarsening_axioms(poset: SubalgebraPoset, theta: Optional[ThetaMap] = None) -> Report:
    """Exhaustive audit of a coarse-graining map over the whole poset:
    domination, monotonicity, retraction, and composition along chains.
    The canonical map is used when none is supplied."""
    th = _as_theta(poset, theta)
    report = Report("coarse-graining axioms")
    elements = {w: poset.elements(w) for w in poset.nodes}
    pairs = [
        (w1, w2)
        for w1 in poset.nodes
        for w2 in poset.down_set(w1)
    ]
    for w1, w2 in pairs:
        for alpha in elements[w1]:
            image = th(w1, w2, alpha)
            report.record(
                alpha <= image,
                f"domination fails: theta({sorted(alpha)}) from {w1} to {w2} loses atoms",
            )
            if poset.is_element(w2, alpha):
                report.record(
                    image == alpha,
                    f"retraction fails on {sorted(alpha)} from {w1} to {w2}",
                )
        for alpha, beta in itertools.combinations(elements[w1], 2):
            if alpha <= beta:
                report.record(
                    th(w1, w2, alpha) <= th(w1, w2, beta),
                    f"monotonicity fails for {sorted(alpha)} within {sorted(beta)} from {w1} to {w2}",
                )
    for w1, w2 in pairs:
        for w3 in poset.down_set(w2):
            for alpha in elements[w1]:
                direct = th(w1, w3, alpha)
                staged = th(w2, w3, th(w1, w2, alpha))
                report.record(
                    direct == staged,
                    f"composition fails on {sorted(alpha)} along {w1} -> {w2} -> {w3}",
                )
    return report.finish()


class SubalgebraSieve:
    """A down-closed set of subalgebras of a base node: a truth value at
    that node."""

    __slots__ = ("poset", "base", "members")

    def __init__(self, poset: SubalgebraPoset, base: Partition, members: Iterable[Partition]):
        poset._require(base)
        down = poset.down_set(base)
        mem = frozenset(members)
        for w in mem:
            if w not in down:
                raise InputError(f"{w} is not a subalgebra of the base {base}")
            for q in poset.down_set(w):
                if q not in mem:
                    raise InputError(
                        f"member set is not down-closed: {w} present, {q} missing"
                    )
        self.poset = poset
        self.base = base
        self.members = mem

    def __eq__(self, other):
        return (
            isinstance(other, SubalgebraSieve)
            and self.base == other.base
            and self.members == other.members
        )

    def __hash__(self):
        return hash((self.base, self.members))

    def __contains__(self, w: Partition) -> bool:
        return w in self.members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def leq(self, other: "SubalgebraSieve") -> bool:
        if self.base != other.base:
            raise InputError("cannot compare truth values at different nodes")
        return self.members <= other.members

    @property
    def is_true(self) -> bool:
        return self.members == self.poset.down_set(self.base)

    @property
    def is_false(self) -> bool:
        return not self.members

    def restrict(self, w2: Partition) -> "SubalgebraSieve":
        """The induced truth value at a subalgebra of the base."""
        if not self.poset.leq(w2, self.base):
            raise NotSubalgebraError(f"{w2} is not a subalgebra of {self.base}")
        return SubalgebraSieve(
            self.poset, w2, self.members & self.poset.down_set(w2)
        )

    def __repr__(self):
        return f"SubalgebraSieve(base={self.base}, members={len(self.members)})"


def true_w(poset: SubalgebraPoset, w: Partition) -> SubalgebraSieve:
    """The unit truth value at node w: every subalgebra."""
    return SubalgebraSieve(poset, w, poset.down_set(w))


def _atom_weights(rho: QuantumState, poset: SubalgebraPoset, tol: Tolerances) -> tuple[float, ...]:
    d = rho.density_matrix()
    return tuple(float(np.trace(d @ p).real) for p in poset.top.atoms)


def _sieve_from_weights(
    poset: SubalgebraPoset,
    w: Partition,
    alpha: Element,
    weights: Sequence[float],
    tol: Tolerances,
) -> SubalgebraSieve:
    members = []
    for w2 in poset.down_set(w):
        image: set[int] = set()
        for b in w2.blocks:
            if set(b) & alpha:
                image |= set(b)
        if sum(weights[i] for i in image) >= 1.0 - tol.tau_one:
            members.append(w2)
    return SubalgebraSieve(poset, w, members)


def valuation_sieve(
    rho: QuantumState,
    poset: SubalgebraPoset,
    w: Partition,
    alpha: Element,
    tol: Tolerances = DEFAULT_TOL,
) -> SubalgebraSieve:
    """The truth value a state assigns to a projector at node w: the
    subalgebras whose canonical coarse-graining of the projector has
    probability one.  States of any kind act through their density
    matrix."""
    poset._require(w)
    if not poset.is_element(w, alpha):
        raise InputError(f"{sorted(alpha)} is not an element of {w}")
    return _sieve_from_weights(poset, w, alpha, _atom_weights(rho, poset, tol), tol)


def check_local_valuation(
    poset: SubalgebraPoset,
    w: Partition,
    phi: Mapping[Element, SubalgebraSieve],
) -> Report:
    """Null, monotonicity and exclusivity of an element-to-truth-value
    map at one node, with the unit condition reported as a note."""
    report = Report("local valuation")
    elements = poset.elements(w)
    missing = [e for e in elements if e not in phi]
    if missing:
        raise InputError(f"map is not total on the node: missing {sorted(missing[0])}")
    zero = frozenset()
    unit = frozenset(range(poset.top.n_atoms))
    report.record(phi[zero].is_false, "null condition: zero element not false")
    for alpha, beta in itertools.combinations(elements, 2):
        if alpha <= beta:
            report.record(
                phi[alpha].leq(phi[beta]),
                f"monotonicity fails for {sorted(alpha)} within {sorted(beta)}",
            )
    for alpha, beta in itertools.permutations(elements, 2):
        if not (alpha & beta) and phi[alpha].is_true:
            report.record(
                not phi[beta].is_true,
                f"exclusivity fails for disjoint {sorted(alpha)} / {sorted(beta)}",
            )
    status = "holds" if phi[unit].is_true else "violated"
    report.notes.append(f"unit condition: {status}")
    report.checks += 1
    return report.finish()


def check_restriction_compatibility(
    rho: QuantumState, poset: SubalgebraPoset, tol: Tolerances = DEFAULT_TOL
) -> Report:
    """For every inclusion w2 within w1 and every element of w1, the
    truth value at w2 of the coarse-grained element must equal the
    restriction of the truth value at w1."""
    report = Report("restriction compatibility")
    weights = _atom_weights(rho, poset, tol)
    for w1 in poset.nodes:
        elements = poset.elements(w1)
        sieves = {
            alpha: _sieve_from_weights(poset, w1, alpha, weights, tol)
            for alpha in elements
        }
        for w2 in poset.down_set(w1):
            for alpha in elements:
                image = canonical_coarsening(poset, w1, w2, alpha)
                lhs = _sieve_from_weights(poset, w2, image, weights, tol)
                rhs = sieves[alpha].restrict(w2)
                report.record(
                    lhs == rhs,
                    f"mismatch at {sorted(alpha)} along {w1} -> {w2}",
                )
    return report.finish()
