"""Exhaustive search for global 0/1 valuations over families of Boolean
contexts.

A family is a list of contexts on one Hilbert space.  A witness picks
one atom per context; the atom's indicator hom then values every
subset-sum projector of that context.  The witness must give every
projector the same value in every context where it occurs, which the
search enforces by fingerprinting subset sums across contexts.  The
absence of a witness for suitable families is the contextuality
obstruction; an 18-ray, 9-context example in dimension 4 ships with the
package data.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .contexts import BooleanContext
from .errors import InputError, StillColorableError
from .spectral import DEFAULT_TOL, Tolerances
from .valuations import PartialValuation
from .spectral import from_spectral_data


def fingerprint(m: np.ndarray, grid: float = 1e-6) -> bytes:
    """A canonical byte string identifying a matrix up to Hermitian
    symmetrization and entrywise rounding to the given grid."""
    h = (m + m.conj().T) / 2.0
    snapped = np.round(h / grid) * grid + 0.0
    canon = np.ascontiguousarray(snapped, dtype=complex)
    return bytes(str(canon.shape), "ascii") + canon.tobytes()


class ContextFamily:
    """A finite list of Boolean contexts on one Hilbert space, indexed so
    that equal subset-sum projectors are recognized across contexts."""

    __slots__ = ("dim", "contexts", "tol", "index")

    def __init__(self, contexts: Sequence[BooleanContext], tol: Tolerances = DEFAULT_TOL):
        if not contexts:
            raise InputError("a context family needs at least one context")
        dim = contexts[0].dim
        if any(c.dim != dim for c in contexts):
            raise InputError("contexts act on different dimensions")
        index: dict[bytes, list[tuple[int, frozenset[int]]]] = {}
        for ci, ctx in enumerate(contexts):
            for subset, matrix in ctx.elements():
                index.setdefault(fingerprint(matrix), []).append((ci, subset))
        self.dim = dim
        self.contexts = tuple(contexts)
        self.tol = tol
        self.index = index

    def __len__(self):
        return len(self.contexts)

    def shared_projectors(self) -> dict[bytes, list[tuple[int, frozenset[int]]]]:
        """Fingerprints occurring as subset sums in at least two distinct
        contexts, with their occurrences."""
        return {
            fp: entries
            for fp, entries in self.index.items()
            if len({ci for ci, _ in entries}) >= 2
        }

    def __repr__(self):
        return f"ContextFamily(dim={self.dim}, contexts={len(self.contexts)})"


@dataclass(frozen=True)
class DualSectionWitness:
    """One chosen atom per context, consistent across shared projectors."""

    chosen: tuple[int, ...]

    def value(self, context: int, subset) -> int:
        """The 0/1 value of a subset-sum projector of one context."""
        return 1 if self.chosen[context] in set(subset) else 0

    def value_table(self, fam: ContextFamily) -> dict[bytes, int]:
        """The implied value of every projector shared between contexts."""
        out = {}
        for fp, entries in fam.shared_projectors().items():
            ci, subset = entries[0]
            out[fp] = self.value(ci, subset)
        return out

    def verify(self, fam: ContextFamily) -> bool:
        """Recheck cross-context agreement on every shared projector,
        independently of any search state."""
        if len(self.chosen) != len(fam.contexts):
            return False
        for ci, atom in enumerate(self.chosen):
            if not 0 <= atom < fam.contexts[ci].n_atoms:
                return False
        for entries in fam.index.values():
            values = {self.value(ci, subset) for ci, subset in entries}
            if len(values) > 1:
                return False
        return True


def search_dual_section(fam: ContextFamily) -> Optional[DualSectionWitness]:
    """Backtracking search for a consistent atom choice per context.

    Contexts are processed in order with atom indices ascending, and a
    branch is pruned as soon as any projector shared with an already
    assigned context would receive conflicting values, so the first
    witness found is the lexicographically least one.  Returns None when
    the family admits no witness.
    """
    shared = fam.shared_projectors()
    per_context: list[list[tuple[bytes, frozenset[int]]]] = [[] for _ in fam.contexts]
    for fp, entries in shared.items():
        for ci, subset in entries:
            per_context[ci].append((fp, subset))
    for ci in range(len(fam.contexts)):
        per_context[ci].sort(key=lambda item: (len(item[1]), sorted(item[1])))

    chosen = [-1] * len(fam.contexts)
    decided: dict[bytes, int] = {}

    def walk(ci: int) -> bool:
        if ci == len(fam.contexts):
            return True
        for atom in range(fam.contexts[ci].n_atoms):
            staged = []
            consistent = True
            for fp, subset in per_context[ci]:
                v = 1 if atom in subset else 0
                old = decided.get(fp)
                if old is None:
                    decided[fp] = v
                    staged.append(fp)
                elif old != v:
                    consistent = False
                    break
            if consistent:
                chosen[ci] = atom
                if walk(ci + 1):
                    return True
                chosen[ci] = -1
            for fp in staged:
                del decided[fp]
        return False

    if walk(0):
        return DualSectionWitness(tuple(chosen))
    return None


def minimal_uncolorable_subfamily(fam: ContextFamily) -> ContextFamily:
    """Greedy removal loop: drop contexts (in order) whose removal keeps
    the family without a witness, until every remaining context is
    needed.  Requires the input family to have no witness already."""
    if search_dual_section(fam) is not None:
        raise StillColorableError("family admits a witness; nothing to minimize")
    keep = list(fam.contexts)
    i = 0
    while i < len(keep):
        trial = keep[:i] + keep[i + 1 :]
        if trial and search_dual_section(ContextFamily(trial, fam.tol)) is None:
            keep = trial
        else:
            i += 1
    return ContextFamily(keep, fam.tol)


def context_operator(ctx: BooleanContext, tol: Tolerances = DEFAULT_TOL):
    """An observable whose eigenprojectors are the context's atoms, with
    eigenvalue i on atom i."""
    return from_spectral_data(tuple(float(i) for i in range(ctx.n_atoms)), ctx.atoms, tol)


def section_to_partial_valuation(
    w: DualSectionWitness, fam: ContextFamily, tol: Tolerances = DEFAULT_TOL
) -> PartialValuation:
    """Turn a witness into an explicit pointwise valuation: each context
    contributes one observable (eigenvalue i on atom i) assigned the
    eigenvalue of the chosen atom.  Construction revalidates consistency
    from scratch."""
    if not w.verify(fam):
        raise InputError("witness does not fit the family")
    assignments = []
    for ci, ctx in enumerate(fam.contexts):
        assignments.append((context_operator(ctx, tol), w.chosen[ci]))
    return PartialValuation.explicit(assignments, tol)
