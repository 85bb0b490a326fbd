"""Shared generators and independent oracles for the test suite.

Oracles recompute expected results from definitions, by exhaustive
enumeration where possible, without reusing the code paths under test.
"""
from __future__ import annotations

import itertools

import numpy as np

from sievelogic import (
    ContextFamily,
    Mode,
    Partition,
    Proposition,
    QuantumState,
    SectionAssignment,
    Sieve,
    SpectralOperator,
    SubalgebraPoset,
    all_partitions,
    admissible_partitions,
    decompose,
    from_spectral_data,
    is_function_of,
)
from sievelogic.ks_search import DualSectionWitness
from sievelogic.spectral import projector_leq


# -- random inputs ----------------------------------------------------

def rand_unitary(rng, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def rand_operator(rng, dim: int, k: int) -> SpectralOperator:
    """Random Hermitian operator with exactly k well-separated eigenvalues."""
    values = np.sort(rng.choice(np.arange(3 * k), size=k, replace=False)).astype(float)
    values = values + rng.uniform(-0.1, 0.1, size=k)
    mult = [1] * k
    for _ in range(dim - k):
        mult[int(rng.integers(k))] += 1
    q = rand_unitary(rng, dim)
    m = np.zeros((dim, dim), dtype=complex)
    pos = 0
    for i in range(k):
        for _ in range(mult[i]):
            m += values[i] * np.outer(q[:, pos], q[:, pos].conj())
            pos += 1
    return decompose(m)


def rand_vector_state(rng, dim: int) -> QuantumState:
    return QuantumState.vector(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def rand_density_state(rng, dim: int) -> QuantumState:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return QuantumState.density(m / np.trace(m).real)


def rand_projector_matrix(rng, dim: int, rank: int) -> np.ndarray:
    q = rand_unitary(rng, dim)
    return sum(np.outer(q[:, i], q[:, i].conj()) for i in range(rank))


def rand_value_map(rng, k: int) -> list[float]:
    """Random total value map with likely collisions."""
    return [float(rng.integers(0, max(2, k))) for _ in range(k)]


def rand_basis_context(rng, dim: int):
    from sievelogic import BooleanContext

    q = rand_unitary(rng, dim)
    return BooleanContext([np.outer(q[:, i], q[:, i].conj()) for i in range(dim)])


# -- oracles ----------------------------------------------------------

def brute_coarsenings(p: Partition) -> set[Partition]:
    return {q for q in all_partitions(p.k) if q.coarsens(p)}


def brute_up_sets(k: int, mode: Mode) -> list[frozenset[Partition]]:
    """Every up-closed subset of the admissible partition order, by
    filtering the full power set.  Only usable for small k."""
    parts = sorted(admissible_partitions(k, mode))
    out = []
    for n in range(len(parts) + 1):
        for combo in itertools.combinations(parts, n):
            chosen = frozenset(combo)
            if all(q in chosen for p in chosen for q in brute_coarsenings(p) if q in set(parts)):
                out.append(chosen)
    return out


def up_closed_sieve(k: int, mode: Mode, members: frozenset[Partition]) -> Sieve:
    return Sieve(k, mode, members)


def nu_p_definitional(P: np.ndarray, a: SpectralOperator, delta, mode: Mode) -> frozenset[Partition]:
    """Membership by projector domination: a partition is in when the
    coarse-grained spectral projector of delta dominates P."""
    delta = frozenset(delta)
    members = set()
    for part in admissible_partitions(a.k, mode):
        idx = [i for b in part.blocks if delta & set(b) for i in b]
        if projector_leq(P, a.projector(idx), 1e-9):
            members.add(part)
    return frozenset(members)


def infimum_oracle(a: SpectralOperator, f, delta) -> np.ndarray:
    """Smallest element of the coarse observable's algebra dominating the
    plain spectral projector, by scanning all subset sums."""
    from sievelogic import apply_function

    b = apply_function(a, f)
    e_delta = a.projector(delta)
    best = np.eye(a.dim, dtype=complex)
    for n in range(b.k + 1):
        for combo in itertools.combinations(range(b.k), n):
            q = b.projector(combo)
            if projector_leq(e_delta, q, 1e-9):
                best = best @ q
    return best


def least_dominating_oracle(poset: SubalgebraPoset, w2: Partition, alpha: frozenset) -> frozenset:
    """Least element of node w2 containing alpha, by scanning all
    elements of the node."""
    dominating = [beta for beta in poset.elements(w2) if alpha <= beta]
    best = dominating[0]
    for beta in dominating[1:]:
        best = best & beta
    assert best in set(poset.elements(w2))
    return best


def witness_ok_independent(fam: ContextFamily, w: DualSectionWitness) -> bool:
    """Cross-context agreement recheck by direct matrix comparison,
    without the fingerprint index."""
    items = []
    for ci, ctx in enumerate(fam.contexts):
        for subset, matrix in ctx.elements():
            items.append((ci, subset, matrix))
    for (ci, si, mi), (cj, sj, mj) in itertools.combinations(items, 2):
        if ci == cj:
            continue
        if np.abs(mi - mj).max() < 1e-6 and w.value(ci, si) != w.value(cj, sj):
            return False
    return all(0 <= w.chosen[ci] < ctx.n_atoms for ci, ctx in enumerate(fam.contexts))


def section_ok_independent(family, assignment: SectionAssignment) -> bool:
    """Recheck every functional relation from scratch."""
    for i, j in itertools.permutations(range(len(family)), 2):
        g = is_function_of(family[j], family[i])
        if g is None:
            continue
        want = family[j].eigenvalue_index(g[assignment.choices[i]], 1e-8)
        if assignment.choices[j] != want:
            return False
    return True


def ks_operator_family(fam: ContextFamily):
    """Observables encoding a context family: one per context with
    eigenvalue i on atom i, plus one 0/1 observable per distinct ray."""
    from sievelogic import context_operator, fingerprint

    ops = [context_operator(ctx) for ctx in fam.contexts]
    seen = {}
    for ctx in fam.contexts:
        for atom in ctx.atoms:
            fp = fingerprint(atom)
            if fp not in seen:
                eye = np.eye(ctx.dim, dtype=complex)
                seen[fp] = from_spectral_data((0.0, 1.0), (eye - atom, atom))
    return ops + list(seen.values())
