"""Sieve-valued truth assignments for propositions about observables.

A proposition asserts that an observable's value lies in a subset of its
spectrum.  A generalized valuation answers with a sieve: the set of
coarse-grainings under which the weakened proposition becomes certain.
Three construction families are provided:

* from a partial valuation (a consistent pointwise value assignment on a
  function-closed set of operators): certainty means the assigned value
  survives the coarse-graining;
* from a state (vector, density matrix, or projector, the latter acting
  through its normalized density matrix): certainty means probability
  one after coarse-graining;
* thresholded on a density matrix: probability at least r suffices.

All evaluations reduce to partition combinatorics plus a vector of
per-eigenvalue weights, so results depend only on the fiber partition of
a coarse-graining and never on its labels.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import InconsistentAssignmentsError, InputError
from .report import Report
from .sieves import (
    Classification,
    CoarseGraining,
    Mode,
    Partition,
    Sieve,
    admissible_partitions,
)
from .spectral import (
    DEFAULT_TOL,
    QuantumState,
    SpectralOperator,
    Tolerances,
    ValueMap,
    apply_function,
    is_function_of,
    prob,
    value_fibers,
)


@dataclass(frozen=True)
class Proposition:
    """The assertion that an observable's value lies in a spectrum subset,
    given by eigenvalue indices."""

    operator: SpectralOperator
    indices: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "indices", frozenset(int(i) for i in self.indices))
        if any(i < 0 or i >= self.operator.k for i in self.indices):
            raise InputError(f"eigenvalue index outside 0..{self.operator.k - 1}")

    @staticmethod
    def by_values(operator: SpectralOperator, values: Iterable[float], eps: float = DEFAULT_TOL.eps_group) -> "Proposition":
        idx = frozenset(operator.eigenvalue_index(v, eps) for v in values)
        return Proposition(operator, idx)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(self.operator.eigenvalues[i] for i in sorted(self.indices))


def canonical_graining(a: SpectralOperator, p: Partition) -> CoarseGraining:
    """The coarse-graining with fiber partition p and block positions as
    labels; the canonical representative of p's isomorphism class."""
    return CoarseGraining(p, tuple(float(pos) for pos in range(p.n_blocks)), base=a)


class PartialValuation:
    """A pointwise value assignment on a function-closed set of operators.

    Either generated by one anchor operator and a chosen eigenvalue (the
    domain is everything expressible as a function of the anchor), or
    given explicitly as (operator, eigenvalue index) pairs, in which case
    the domain is the closure of the listed operators under functions.

    Explicit assignments are validated against every common
    coarse-graining of every listed pair, so values extend consistently
    to the whole domain.
    """

    def __init__(self, kind: str, members: list[tuple[SpectralOperator, int]], tol: Tolerances):
        self.kind = kind
        self.members = members
        self.tol = tol

    @staticmethod
    def maximal(anchor: SpectralOperator, index: int, tol: Tolerances = DEFAULT_TOL) -> "PartialValuation":
        if not 0 <= index < anchor.k:
            raise InputError(f"eigenvalue index outside 0..{anchor.k - 1}")
        return PartialValuation("maximal", [(anchor, index)], tol)

    @staticmethod
    def explicit(
        assignments: Sequence[tuple[SpectralOperator, int]], tol: Tolerances = DEFAULT_TOL
    ) -> "PartialValuation":
        members = []
        for op, idx in assignments:
            if not 0 <= idx < op.k:
                raise InputError(f"eigenvalue index outside 0..{op.k - 1}")
            members.append((op, int(idx)))
        pv = PartialValuation("explicit", members, tol)
        pv._validate_consistency()
        return pv

    def _validate_consistency(self) -> None:
        # Two listed operators may share a coarse-graining without either
        # being a function of the other, so check every coarse-graining of
        # every listed operator against every other listed operator.
        for (op1, a1), (op2, a2) in itertools.combinations(self.members, 2):
            if op1.dim != op2.dim:
                raise InputError("assigned operators act on different dimensions")
            for p in admissible_partitions(op1.k, Mode.WITH_CONSTANTS):
                common = apply_function(op1, [p.block_of(i) for i in range(op1.k)], self.tol)
                g = is_function_of(common, op2, self.tol)
                if g is None:
                    continue
                via1 = float(p.block_of(a1))
                via2 = g[a2]
                if abs(via1 - via2) > 1e-6:
                    raise InconsistentAssignmentsError(
                        f"assignments conflict on a common coarse-graining of "
                        f"{op1!r} and {op2!r}: {via1:g} vs {via2:g}"
                    )

    def locate(self, b: SpectralOperator) -> Optional[float]:
        """The value this valuation gives to b, or None if b is outside
        the domain."""
        for op, idx in self.members:
            if b.dim != op.dim:
                continue
            g = is_function_of(b, op, self.tol)
            if g is not None:
                return g[idx]
        return None

    def assignments(self) -> list[tuple[SpectralOperator, int]]:
        return list(self.members)


class GeneralizedValuation:
    """A sieve-valued truth assignment over a fixed sieve mode.

    The mode is part of the valuation, so sieves from different modes can
    never be compared by accident.  Results are cached per (operator,
    subset); all data is immutable.
    """

    def __init__(self, kind, mode, *, partial=None, state=None, r=1.0, tol=DEFAULT_TOL):
        self.kind = kind
        self.mode = mode
        self.partial = partial
        self.state = state
        self.r = float(r)
        self.tol = tol
        self._sieves: dict = {}
        self._weights: dict = {}
        self._partial_cells: dict = {}

    @staticmethod
    def from_partial(v: PartialValuation, mode: Mode, tol: Tolerances = DEFAULT_TOL) -> "GeneralizedValuation":
        return GeneralizedValuation("partial", mode, partial=v, tol=tol)

    @staticmethod
    def from_state(s: QuantumState, mode: Mode, tol: Tolerances = DEFAULT_TOL) -> "GeneralizedValuation":
        return GeneralizedValuation("state", mode, state=s, tol=tol)

    @staticmethod
    def threshold(s: QuantumState, r: float, mode: Mode, tol: Tolerances = DEFAULT_TOL) -> "GeneralizedValuation":
        if s.kind != "density":
            raise InputError("thresholded valuations take a density matrix state")
        if not 0.0 < r <= 1.0:
            raise InputError("threshold must lie in (0, 1]")
        return GeneralizedValuation("threshold", mode, state=s, r=r, tol=tol)

    @property
    def _cutoff(self) -> float:
        r = self.r if self.kind == "threshold" else 1.0
        return r - self.tol.tau_one

    def _state_weights(self, a: SpectralOperator) -> tuple[float, ...]:
        key = id(a)
        hit = self._weights.get(key)
        if hit is None:
            w = tuple(prob(self.state, p, self.tol) for p in a.projectors)
            hit = (a, w)
            self._weights[key] = hit
        return hit[1]

    def _partial_cell(self, a: SpectralOperator, p: Partition) -> tuple[bool, int]:
        """Whether the canonical coarse observable for (a, p) lies in the
        partial valuation's domain, and which block its value selects."""
        key = (id(a), p)
        hit = self._partial_cells.get(key)
        if hit is None:
            b = apply_function(a, [p.block_of(i) for i in range(a.k)], self.tol)
            v = self.partial.locate(b)
            if v is None:
                cell = (False, -1)
            else:
                j = round(v)
                if abs(v - j) > 1e-6 or not 0 <= j < p.n_blocks:
                    raise InputError(f"partial valuation returned a non-spectral value {v!r}")
                cell = (True, j)
            hit = (a, cell)
            self._partial_cells[key] = hit
        return hit[1]

    def _member(self, a: SpectralOperator, p: Partition, indices: frozenset[int]) -> bool:
        if self.kind == "partial":
            in_dom, j = self._partial_cell(a, p)
            return in_dom and bool(set(p.blocks[j]) & indices)
        weights = self._state_weights(a)
        mass = 0.0
        for block in p.blocks:
            if indices & set(block):
                mass += sum(weights[i] for i in block)
        return mass >= self._cutoff

    def evaluate(self, p: Proposition) -> Sieve:
        key = (id(p.operator), p.indices)
        hit = self._sieves.get(key)
        if hit is None:
            a = p.operator
            members = [
                q
                for q in admissible_partitions(a.k, self.mode)
                if self._member(a, q, p.indices)
            ]
            hit = (a, Sieve(a.k, self.mode, members))
            self._sieves[key] = hit
        return hit[1]


def evaluate(nu: GeneralizedValuation, p: Proposition) -> Sieve:
    return nu.evaluate(p)


class DisjunctionStrength(Enum):
    EQUALITY = "Equality"
    STRICT_INEQUALITY = "StrictInequality"


def check_functional_rule(
    nu: GeneralizedValuation,
    a: SpectralOperator,
    h: ValueMap,
    delta: Iterable[int],
    coarse: Optional[SpectralOperator] = None,
) -> Report:
    """Compatibility of the valuation with one coarse-graining: the sieve
    of the coarsened proposition must be the pullback of the original
    sieve.  `coarse` may pass a prebuilt h(a) to share caches."""
    report = Report("functional rule")
    fibers, labels = value_fibers(a, h, nu.tol)
    cg = CoarseGraining(fibers, labels, base=a)
    b = apply_function(a, h, nu.tol) if coarse is None else coarse
    idx = frozenset(delta)
    lhs = nu.evaluate(Proposition(b, cg.image_indices(idx)))
    rhs = nu.evaluate(Proposition(a, idx)).pullback(cg)
    report.record(
        lhs == rhs,
        f"coarsened sieve differs from pullback for map {labels} on subset {sorted(idx)}",
    )
    return report.finish()


def check_axioms(nu: GeneralizedValuation, a: SpectralOperator) -> Report:
    """Null, monotonicity and exclusivity over every subset pair of a's
    spectrum; the unit condition is a violation for state-family
    valuations and an informational note for partial-family ones."""
    report = Report("valuation axioms")
    subsets = [frozenset(c) for n in range(a.k + 1) for c in itertools.combinations(range(a.k), n)]
    sieves = {s: nu.evaluate(Proposition(a, s)) for s in subsets}

    report.record(
        sieves[frozenset()].classify() is Classification.TOTALLY_FALSE,
        "null condition: empty subset not totally false",
    )
    for d1, d2 in itertools.product(subsets, repeat=2):
        if d1 <= d2:
            report.record(
                sieves[d1].leq(sieves[d2]),
                f"monotonicity fails for {sorted(d1)} within {sorted(d2)}",
            )
        if not (d1 & d2):
            if sieves[d1].classify() is Classification.TOTALLY_TRUE:
                report.record(
                    sieves[d2].classify() is not Classification.TOTALLY_TRUE,
                    f"exclusivity fails for disjoint {sorted(d1)} / {sorted(d2)}",
                )
    unit_true = sieves[frozenset(range(a.k))].classify() is Classification.TOTALLY_TRUE
    if nu.kind == "partial":
        status = "holds" if unit_true else "violated (legal for partial-valuation families)"
        report.notes.append(f"unit condition: {status}")
        report.checks += 1
    else:
        report.record(unit_true, "unit condition: full spectrum not totally true")
    return report.finish()


def check_disjunction_strength(
    nu: GeneralizedValuation, a: SpectralOperator, d1: Iterable[int], d2: Iterable[int]
) -> DisjunctionStrength:
    """Whether the sieve of a union equals the join of the sieves, or
    strictly exceeds it."""
    s1 = frozenset(d1)
    s2 = frozenset(d2)
    union = nu.evaluate(Proposition(a, s1 | s2))
    joined = nu.evaluate(Proposition(a, s1)).join(nu.evaluate(Proposition(a, s2)))
    if not joined.leq(union):
        raise InputError("join exceeds the union sieve; monotonicity is broken")
    return DisjunctionStrength.EQUALITY if union == joined else DisjunctionStrength.STRICT_INEQUALITY


def negation(nu: GeneralizedValuation, p: Proposition) -> Sieve:
    """Heyting negation of the proposition's sieve."""
    return nu.evaluate(p).neg()


def extract_partial(
    nu: GeneralizedValuation, family: Sequence[SpectralOperator]
) -> PartialValuation:
    """The pointwise assignment a valuation induces: an operator gets the
    eigenvalue whose singleton proposition is totally true."""
    assignments = []
    for op in family:
        hits = [
            i
            for i in range(op.k)
            if nu.evaluate(Proposition(op, frozenset([i]))).classify() is Classification.TOTALLY_TRUE
        ]
        if len(hits) > 1:
            raise InconsistentAssignmentsError(
                f"valuation marks {len(hits)} distinct eigenvalues of {op!r} totally true"
            )
        if hits:
            assignments.append((op, hits[0]))
    return PartialValuation.explicit(assignments, nu.tol)


@dataclass(frozen=True)
class SieveComparison:
    direct: Sieve
    induced: Sieve

    @property
    def difference(self) -> frozenset[Partition]:
        return self.direct.partitions - self.induced.partitions

    @property
    def equal(self) -> bool:
        return self.direct == self.induced


def compare_direct_vs_induced(
    psi: QuantumState, p: Proposition, mode: Mode, tol: Tolerances = DEFAULT_TOL
) -> SieveComparison:
    """Compare the state's own sieve with the sieve of the eigenvalue
    assignment the state induces.

    The induced variant admits a coarse-graining only when the state is
    an actual eigenvector of the coarse observable, with the eigenvalue
    landing in the coarsened subset.  It always refines the direct sieve
    and coincides with it on singleton subsets.
    """
    nu = GeneralizedValuation.from_state(psi, mode, tol)
    direct = nu.evaluate(p)
    a = p.operator
    weights = nu._state_weights(a)
    members = []
    for q in admissible_partitions(a.k, mode):
        for block in q.blocks:
            if p.indices & set(block) and sum(weights[i] for i in block) >= 1.0 - tol.tau_one:
                members.append(q)
                break
    induced = Sieve(a.k, mode, members)
    if not induced.leq(direct):
        raise InputError("induced sieve escapes the direct sieve; weights are inconsistent")
    return SieveComparison(direct, induced)


def check_naturality(
    nu: GeneralizedValuation, a: SpectralOperator, f: ValueMap
) -> Report:
    """Commutation of the valuation with one coarse-graining across every
    subset (proposition square) and every eigenvalue (pointwise square
    through the singleton embedding)."""
    report = Report("naturality")
    fibers, labels = value_fibers(a, f, nu.tol)
    cg = CoarseGraining(fibers, labels, base=a)
    b = apply_function(a, f, nu.tol)
    for n in range(a.k + 1):
        for combo in itertools.combinations(range(a.k), n):
            idx = frozenset(combo)
            lhs = nu.evaluate(Proposition(b, cg.image_indices(idx)))
            rhs = nu.evaluate(Proposition(a, idx)).pullback(cg)
            report.record(
                lhs == rhs,
                f"proposition square fails on subset {sorted(idx)} for map {labels}",
            )
    for i in range(a.k):
        lhs = nu.evaluate(Proposition(b, cg.image_indices([i])))
        rhs = nu.evaluate(Proposition(a, frozenset([i]))).pullback(cg)
        report.record(
            lhs == rhs,
            f"pointwise square fails on eigenvalue index {i} for map {labels}",
        )
    return report.finish()
