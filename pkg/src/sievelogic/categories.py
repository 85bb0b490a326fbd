"""Finite coarse-graining categories over one observable, two-valued
homomorphisms on Boolean contexts, and global-section search.

The coarse-grainings of one observable form a lattice mirroring the
partition lattice of its spectrum; each node carries a representative
coarse observable with canonical labels.  A family of observables on one
Hilbert space carries auto-detected functional relations; a global
section is a choice of eigenvalue per observable consistent with every
relation, and its absence on suitable families is the contextuality
obstruction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .contexts import BooleanContext
from .errors import InputError, NotSubalgebraError
from .report import Report
from .sieves import CoarseGraining, Mode, Partition, admissible_partitions
from .spectral import (
    DEFAULT_TOL,
    SpectralOperator,
    Tolerances,
    apply_function,
    is_function_of,
    projector_leq,
)


def spectral_algebra(a: SpectralOperator, tol: Tolerances = DEFAULT_TOL) -> BooleanContext:
    """The Boolean context generated by an observable: its eigenprojectors
    are the atoms."""
    return BooleanContext(a.projectors, tol)


def coarse_value(f: CoarseGraining, index: int) -> float:
    """The value a coarse-graining takes on one eigenvalue index of its
    base: the label of the block containing the index."""
    return f.value_at(index)


class CoarseGrainingLattice:
    """All coarse-grainings of one observable, one per spectrum
    partition, each with a representative coarse observable labeled by
    block position.

    An arrow from the object at partition p to the object at a finer
    partition q exists exactly when p coarsens q; composing arrows
    corresponds to composing value maps.
    """

    __slots__ = ("top", "mode", "objects", "tol", "_ops")

    def __init__(self, top: SpectralOperator, mode: Mode = Mode.WITH_CONSTANTS, tol: Tolerances = DEFAULT_TOL):
        self.top = top
        self.mode = mode
        self.tol = tol
        self.objects = tuple(sorted(admissible_partitions(top.k, mode)))
        self._ops: dict[Partition, SpectralOperator] = {}

    def operator_at(self, p: Partition) -> SpectralOperator:
        """The representative coarse observable of one object."""
        if p not in self.objects:
            raise InputError(f"partition {p} is not an object of this lattice")
        op = self._ops.get(p)
        if op is None:
            op = apply_function(self.top, [p.block_of(i) for i in range(self.top.k)], self.tol)
            self._ops[p] = op
        return op

    def arrow(self, p: Partition) -> CoarseGraining:
        """The canonical coarse-graining from the object at p into the
        top observable."""
        if p not in self.objects:
            raise InputError(f"partition {p} is not an object of this lattice")
        return CoarseGraining(p, tuple(float(i) for i in range(p.n_blocks)), base=self.top)

    def hom_exists(self, coarse: Partition, fine: Partition) -> bool:
        """Whether the object at `coarse` receives an arrow from the
        object at `fine`."""
        return coarse.coarsens(fine)

    def arrow_between(self, coarse: Partition, fine: Partition) -> CoarseGraining:
        """The connecting coarse-graining from the representative at
        `fine` onto the representative at `coarse`."""
        if not self.hom_exists(coarse, fine):
            raise InputError(f"{coarse} does not coarsen {fine}")
        fine_op = self.operator_at(fine)
        owner = []
        for block in fine.blocks:
            pos = next(j for j, cb in enumerate(coarse.blocks) if block[0] in cb)
            owner.append(pos)
        groups: dict[int, list[int]] = {}
        for j, pos in enumerate(owner):
            groups.setdefault(pos, []).append(j)
        fibers = Partition.of(groups.values())
        labels = tuple(
            float(owner[fiber[0]]) for fiber in fibers.blocks
        )
        return CoarseGraining(fibers, labels, base=fine_op)


@dataclass(frozen=True)
class TwoValuedHom:
    """A 0/1 homomorphism on a Boolean context: one atom is valued 1 and
    an element is valued 1 exactly when it dominates that atom."""

    context: BooleanContext
    chosen_atom: int

    def __post_init__(self):
        if not 0 <= self.chosen_atom < self.context.n_atoms:
            raise InputError(f"atom index outside 0..{self.context.n_atoms - 1}")

    def value(self, atom_indices: Iterable[int]) -> int:
        return 1 if self.chosen_atom in set(atom_indices) else 0

    def value_projector(self, m, tol: Tolerances = DEFAULT_TOL) -> int:
        """Evaluate on a projector by domination of the chosen atom."""
        return 1 if projector_leq(self.context.atoms[self.chosen_atom], m, tol.tau_proj) else 0


def restrict_hom(chi: TwoValuedHom, sub: BooleanContext, tol: Tolerances = DEFAULT_TOL) -> TwoValuedHom:
    """Restrict a two-valued homomorphism to a subalgebra: the new chosen
    atom is the unique subalgebra atom dominating the old one."""
    big = chi.context
    if sub.dim != big.dim:
        raise NotSubalgebraError("contexts act on different dimensions")
    for j, q in enumerate(sub.atoms):
        covered = [p for p in big.atoms if projector_leq(p, q, tol.tau_proj)]
        delta = q - sum(covered) if covered else q
        if abs(delta).max() > tol.tau_proj:
            raise NotSubalgebraError(f"atom {j} is not a sum of the larger context's atoms")
    chosen = big.atoms[chi.chosen_atom]
    hits = [j for j, q in enumerate(sub.atoms) if projector_leq(chosen, q, tol.tau_proj)]
    if len(hits) != 1:
        raise NotSubalgebraError("chosen atom is not dominated by exactly one subalgebra atom")
    return TwoValuedHom(sub, hits[0])


def check_indicator_naturality(a: SpectralOperator, tol: Tolerances = DEFAULT_TOL) -> Report:
    """Each eigenvalue of an observable induces a two-valued hom on its
    context by indicator membership.  Verify, for every coarse-graining,
    that the hom induced by the coarsened eigenvalue agrees with the
    restriction of the original hom on every subalgebra element.

    One side is pure index bookkeeping; the other evaluates projector
    domination on matrices, so agreement is a real computation."""
    report = Report("indicator naturality")
    lattice = CoarseGrainingLattice(a, Mode.WITH_CONSTANTS, tol)
    top_context = spectral_algebra(a, tol)
    for p in lattice.objects:
        coarse_op = lattice.operator_at(p)
        sub = spectral_algebra(coarse_op, tol)
        for lam in range(a.k):
            chi = TwoValuedHom(top_context, lam)
            restricted = restrict_hom(chi, sub, tol)
            induced = TwoValuedHom(sub, p.block_of(lam))
            for n in range(p.n_blocks + 1):
                for combo in itertools.combinations(range(p.n_blocks), n):
                    element = sub.element(combo)
                    report.record(
                        induced.value(combo) == restricted.value_projector(element, tol)
                        and induced.value(combo)
                        == chi.value_projector(element, tol),
                        f"indicator square fails at partition {p}, eigenvalue index {lam}, blocks {combo}",
                    )
    return report.finish()


@dataclass(frozen=True)
class FunctionalRelation:
    """A detected relation: the target observable is a function of the
    source, with `table[i]` the target eigenvalue index at source
    eigenvalue index i."""

    source: int
    target: int
    table: tuple[int, ...]


@dataclass(frozen=True)
class SectionAssignment:
    """A choice of eigenvalue index per family member satisfying every
    recorded functional relation."""

    choices: tuple[int, ...]
    relations: tuple[FunctionalRelation, ...]

    def eigenvalue_index(self, member: int) -> int:
        return self.choices[member]

    def verify(self) -> bool:
        return all(
            self.choices[r.target] == r.table[self.choices[r.source]]
            for r in self.relations
        )


def detect_relations(
    family: Sequence[SpectralOperator], tol: Tolerances = DEFAULT_TOL
) -> tuple[FunctionalRelation, ...]:
    """All pairwise functional relations within a family, by direct
    reconstruction tests."""
    if not family:
        return ()
    dim = family[0].dim
    if any(op.dim != dim for op in family):
        raise InputError("family members act on different dimensions")
    out = []
    for i, j in itertools.permutations(range(len(family)), 2):
        g = is_function_of(family[j], family[i], tol)
        if g is None:
            continue
        table = tuple(
            family[j].eigenvalue_index(g[idx], tol.eps_group) for idx in range(family[i].k)
        )
        out.append(FunctionalRelation(i, j, table))
    return tuple(out)


def search_global_section(
    family: Sequence[SpectralOperator],
    declared: Iterable[tuple[int, int, Sequence[int]]] = (),
    tol: Tolerances = DEFAULT_TOL,
) -> Optional[SectionAssignment]:
    """Search for an eigenvalue choice per family member consistent with
    every functional relation between members.

    Relations are auto-detected; declared (source, target, table)
    triples are cross-checked against detection and rejected on
    mismatch.  The search is deterministic: members in family order,
    eigenvalue indices ascending, first witness returned.  Returns None
    when no section exists.
    """
    relations = detect_relations(family, tol)
    detected = {(r.source, r.target): r.table for r in relations}
    for src, tgt, table in declared:
        if detected.get((src, tgt)) != tuple(table):
            raise InputError(
                f"declared relation {src} -> {tgt} does not match the detected one"
            )
    if not family:
        return SectionAssignment((), relations)

    by_source: dict[int, list[FunctionalRelation]] = {}
    by_target: dict[int, list[FunctionalRelation]] = {}
    for r in relations:
        by_source.setdefault(r.source, []).append(r)
        by_target.setdefault(r.target, []).append(r)

    n = len(family)
    domains = [set(range(op.k)) for op in family]
    choices = [-1] * n

    def prune(var: int, value: int, doms: list[set[int]]) -> bool:
        # forward-check both directions of every relation touching var
        for r in by_source.get(var, ()):
            forced = r.table[value]
            if choices[r.target] >= 0:
                if choices[r.target] != forced:
                    return False
            else:
                doms[r.target] = doms[r.target] & {forced}
                if not doms[r.target]:
                    return False
        for r in by_target.get(var, ()):
            allowed = {a for a in doms[r.source] if r.table[a] == value}
            if choices[r.source] >= 0:
                if r.table[choices[r.source]] != value:
                    return False
            else:
                doms[r.source] = allowed
                if not allowed:
                    return False
        return True

    def walk(var: int, doms: list[set[int]]) -> bool:
        if var == n:
            return True
        for value in sorted(doms[var]):
            nxt = [set(d) for d in doms]
            choices[var] = value
            if prune(var, value, nxt) and walk(var + 1, nxt):
                return True
            choices[var] = -1
        return False

    if walk(0, domains):
        return SectionAssignment(tuple(choices), relations)
    return None
