"""Partition lattices and the Heyting algebra of sieves.

Propositions about a finite-spectrum observable are coarse-grained by
functions of the observable.  Up to relabeling, such a function is a
partition of the spectrum: two eigenvalues are identified exactly when
they land in the same block.  A sieve collects partitions and is closed
under further coarsening; sieves over one base form a Heyting algebra,
which serves as the truth-value object of the valuation modules.

Two regimes are supported and must always be chosen explicitly:
WITH_CONSTANTS admits the one-block partition (constant functions count
as coarse-grainings), WITHOUT_CONSTANTS excludes it.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import BaseMismatchError, InputError


class Mode(Enum):
    """Whether constant coarse-grainings are admitted as morphisms."""

    WITH_CONSTANTS = "o"
    WITHOUT_CONSTANTS = "ostar"

    @classmethod
    def parse(cls, token: str) -> "Mode":
        for mode in cls:
            if token == mode.value or token == mode.name:
                return mode
        raise InputError(f"unknown mode {token!r}; expected 'o' or 'ostar'")


class Classification(Enum):
    TOTALLY_TRUE = "TotallyTrue"
    TOTALLY_FALSE = "TotallyFalse"
    MINIMALLY_TRUE = "MinimallyTrue"
    INTERMEDIATE = "Intermediate"


@dataclass(frozen=True)
class Partition:
    """A set partition of {0..k-1} in canonical form.

    blocks are internally sorted tuples, ordered by least element.  The
    canonical form makes equality, hashing and lexicographic ordering
    plain tuple operations.
    """

    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(blocks: Iterable[Iterable[int]]) -> "Partition":
        canon = tuple(sorted((tuple(sorted(set(b))) for b in blocks), key=lambda b: b[0]))
        p = Partition(canon)
        p._validate()
        return p

    @staticmethod
    def discrete(k: int) -> "Partition":
        return Partition(tuple((i,) for i in range(k)))

    @staticmethod
    def one_block(k: int) -> "Partition":
        if k < 1:
            raise InputError("partition base must be nonempty")
        return Partition((tuple(range(k)),))

    def _validate(self) -> None:
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise InputError("empty block in partition")
            if seen & set(b):
                raise InputError("overlapping blocks in partition")
            seen |= set(b)
        if not self.blocks or seen != set(range(len(seen))):
            raise InputError("blocks must cover a range {0..k-1}")

    @property
    def k(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_of(self, i: int) -> int:
        """Index (canonical position) of the block containing element i."""
        for pos, b in enumerate(self.blocks):
            if i in b:
                return pos
        raise InputError(f"element {i} outside partition base")

    def coarsens(self, other: "Partition") -> bool:
        """True when every block of `other` lies inside a block of self."""
        if self.k != other.k:
            raise BaseMismatchError("partitions over different base sizes")
        owner = {}
        for pos, b in enumerate(self.blocks):
            for i in b:
                owner[i] = pos
        return all(len({owner[i] for i in b}) == 1 for b in other.blocks)

    def refines(self, other: "Partition") -> bool:
        return other.coarsens(self)

    def merge_blocks(self, grouping: "Partition") -> "Partition":
        """Coarsen by merging blocks as grouped by a partition of the
        block-index range {0..n_blocks-1}."""
        if grouping.k != self.n_blocks:
            raise BaseMismatchError("grouping must partition the block indices")
        merged = []
        for g in grouping.blocks:
            merged.append(sorted(i for pos in g for i in self.blocks[pos]))
        return Partition.of(merged)

    def __str__(self) -> str:
        return "|".join(",".join(str(i) for i in b) for b in self.blocks)

    def format(self, values: Sequence, fmt=str) -> str:
        """Block notation with elements replaced by their labels."""
        return "|".join("{" + ",".join(fmt(values[i]) for i in b) + "}" for b in self.blocks)

    def __lt__(self, other: "Partition") -> bool:
        return self.blocks < other.blocks


@lru_cache(maxsize=None)
def all_partitions(k: int) -> tuple[Partition, ...]:
    """Every set partition of {0..k-1}, sorted canonically (Bell(k) many)."""
    if k < 1:
        raise InputError("partition base must be nonempty")
    results = []

    def grow(i: int, blocks: list[list[int]]) -> None:
        if i == k:
            results.append(Partition.of(blocks))
            return
        for b in blocks:
            b.append(i)
            grow(i + 1, blocks)
            b.pop()
        blocks.append([i])
        grow(i + 1, blocks)
        blocks.pop()

    grow(0, [])
    return tuple(sorted(results))


def bell_number(k: int) -> int:
    return len(all_partitions(k))


@lru_cache(maxsize=None)
def coarsenings_of(p: Partition) -> tuple[Partition, ...]:
    """All partitions coarser than or equal to p (one per partition of
    p's block set)."""
    return tuple(sorted(p.merge_blocks(g) for g in all_partitions(p.n_blocks)))


@lru_cache(maxsize=None)
def admissible_partitions(k: int, mode: Mode) -> frozenset[Partition]:
    parts = all_partitions(k)
    if mode is Mode.WITHOUT_CONSTANTS:
        parts = tuple(p for p in parts if p.n_blocks > 1)
    return frozenset(parts)


@dataclass(frozen=True)
class CoarseGraining:
    """A concrete coarse-graining of a base spectrum: the fiber partition
    plus one injective real label per block (the distinct function values).

    The label order fixes how blocks correspond to eigenvalue indices of
    the coarse observable: index j is the block holding the j-th smallest
    label.
    """

    partition: Partition
    labels: tuple[float, ...]
    base: object = None

    def __post_init__(self):
        if len(self.labels) != self.partition.n_blocks:
            raise InputError("need exactly one label per block")
        if len(set(self.labels)) != len(self.labels):
            raise InputError("labels must be injective on blocks")

    @property
    def codomain_size(self) -> int:
        return self.partition.n_blocks

    @property
    def index_to_block(self) -> tuple[int, ...]:
        """Block position for each codomain eigenvalue index (labels ascending)."""
        return tuple(sorted(range(len(self.labels)), key=lambda pos: self.labels[pos]))

    def value_at(self, i: int) -> float:
        """Label of the block containing base element i."""
        return self.labels[self.partition.block_of(i)]

    def image_indices(self, subset: Iterable[int]) -> frozenset[int]:
        """Codomain eigenvalue indices hit by a base index subset."""
        order = self.index_to_block
        rank = {pos: j for j, pos in enumerate(order)}
        return frozenset(rank[self.partition.block_of(i)] for i in subset)

    def composite_partition(self, grouping: Partition) -> Partition:
        """Base partition induced by a partition of the codomain indices:
        base indices are joined when their blocks fall in one group."""
        if grouping.k != self.codomain_size:
            raise BaseMismatchError("grouping must partition the codomain spectrum")
        order = self.index_to_block
        merged = []
        for g in grouping.blocks:
            merged.append(sorted(i for j in g for i in self.partition.blocks[order[j]]))
        return Partition.of(merged)


def compose(outer: "CoarseGraining", inner: "CoarseGraining") -> "CoarseGraining":
    """Composite coarse-graining: `inner` applied after `outer`.

    outer maps the base onto a codomain of size n; inner must be based on
    that codomain (inner.partition.k == n).  The result is based where
    outer is based and carries inner's labels.
    """
    if inner.partition.k != outer.codomain_size:
        raise BaseMismatchError("inner coarse-graining not based on outer's codomain")
    order = outer.index_to_block
    pairs = []
    for g, label in zip(inner.partition.blocks, inner.labels):
        members = sorted(i for j in g for i in outer.partition.blocks[order[j]])
        pairs.append((tuple(members), label))
    pairs.sort(key=lambda t: t[0][0])
    return CoarseGraining(
        Partition.of([p[0] for p in pairs]),
        tuple(p[1] for p in pairs),
        base=outer.base,
    )


class Sieve:
    """An up-closed set of partitions of a k-element spectrum.

    Membership of a partition implies membership of every admissible
    coarsening; the constructor enforces this, so every Sieve in the
    program is genuinely a sieve.
    """

    __slots__ = ("k", "mode", "partitions")

    def __init__(self, k: int, mode: Mode, partitions: Iterable[Partition]):
        parts = frozenset(partitions)
        admissible = admissible_partitions(k, mode)
        for p in parts:
            if p not in admissible:
                raise InputError(f"partition {p} not admissible at k={k} in {mode.name}")
            for q in coarsenings_of(p):
                if q in admissible and q not in parts:
                    raise InputError(f"not up-closed: {p} present but coarsening {q} missing")
        self.k = k
        self.mode = mode
        self.partitions = parts

    # -- constructors ------------------------------------------------

    @staticmethod
    def totally_true(k: int, mode: Mode) -> "Sieve":
        return Sieve(k, mode, admissible_partitions(k, mode))

    @staticmethod
    def totally_false(k: int, mode: Mode) -> "Sieve":
        return Sieve(k, mode, ())

    # -- basic protocol ----------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Sieve)
            and self.k == other.k
            and self.mode == other.mode
            and self.partitions == other.partitions
        )

    def __hash__(self):
        return hash((self.k, self.mode, self.partitions))

    def __contains__(self, p: Partition) -> bool:
        return p in self.partitions

    def __len__(self) -> int:
        return len(self.partitions)

    def __iter__(self):
        return iter(sorted(self.partitions))

    def __repr__(self):
        inner = "; ".join(str(p) for p in self)
        return f"Sieve(k={self.k}, {self.mode.name}, {{{inner}}})"

    def _check_compatible(self, other: "Sieve") -> None:
        if self.k != other.k or self.mode != other.mode:
            raise BaseMismatchError("sieves over different bases or modes")

    def leq(self, other: "Sieve") -> bool:
        self._check_compatible(other)
        return self.partitions <= other.partitions

    # -- Heyting operations ------------------------------------------

    def meet(self, other: "Sieve") -> "Sieve":
        self._check_compatible(other)
        return Sieve(self.k, self.mode, self.partitions & other.partitions)

    def join(self, other: "Sieve") -> "Sieve":
        self._check_compatible(other)
        return Sieve(self.k, self.mode, self.partitions | other.partitions)

    def implies(self, other: "Sieve") -> "Sieve":
        """Largest sieve whose meet with self lies below other."""
        self._check_compatible(other)
        admissible = admissible_partitions(self.k, self.mode)
        members = []
        for p in admissible:
            ups = [q for q in coarsenings_of(p) if q in admissible]
            if all(q not in self.partitions or q in other.partitions for q in ups):
                members.append(p)
        return Sieve(self.k, self.mode, members)

    def neg(self) -> "Sieve":
        """Pseudo-complement: partitions none of whose admissible
        coarsenings belong to self."""
        return self.implies(Sieve.totally_false(self.k, self.mode))

    # -- presheaf structure ------------------------------------------

    def pullback(self, f: CoarseGraining) -> "Sieve":
        """Sieve on f's codomain: a partition belongs iff its composite
        with f belongs here."""
        if f.partition.k != self.k:
            raise BaseMismatchError("coarse-graining not based at this sieve's base")
        members = []
        for p in admissible_partitions(f.codomain_size, self.mode):
            if f.composite_partition(p) in self.partitions:
                members.append(p)
        return Sieve(f.codomain_size, self.mode, members)

    def classify(self) -> Classification:
        if not self.partitions:
            return Classification.TOTALLY_FALSE
        if self.partitions == admissible_partitions(self.k, self.mode):
            return Classification.TOTALLY_TRUE
        if self.mode is Mode.WITH_CONSTANTS and self.partitions == {Partition.one_block(self.k)}:
            return Classification.MINIMALLY_TRUE
        return Classification.INTERMEDIATE


def up_closure(k: int, mode: Mode, seed: Iterable[Partition]) -> Sieve:
    """Smallest sieve containing the seed partitions."""
    admissible = admissible_partitions(k, mode)
    members: set[Partition] = set()
    for p in seed:
        if p.k != k:
            raise InputError(f"seed partition {p} not over a {k}-element base")
        if p not in admissible:
            raise InputError(f"seed partition {p} not admissible in {mode.name}")
        members.update(q for q in coarsenings_of(p) if q in admissible)
    return Sieve(k, mode, members)


# -- module-level aliases matching the operation vocabulary ----------

def heyting_meet(s1: Sieve, s2: Sieve) -> Sieve:
    return s1.meet(s2)


def heyting_join(s1: Sieve, s2: Sieve) -> Sieve:
    return s1.join(s2)


def heyting_implies(s1: Sieve, s2: Sieve) -> Sieve:
    return s1.implies(s2)


def heyting_neg(s: Sieve) -> Sieve:
    return s.neg()


def pullback(s: Sieve, f: CoarseGraining) -> Sieve:
    return s.pullback(f)


# -- DOT export ------------------------------------------------------

def covering_pairs(k: int, mode: Mode) -> list[tuple[Partition, Partition]]:
    """Hasse edges of the coarsening order: (finer, coarser) with the
    coarser obtained by merging exactly two blocks."""
    edges = []
    admissible = admissible_partitions(k, mode)
    for p in sorted(admissible):
        nb = p.n_blocks
        for a in range(nb):
            for b in range(a + 1, nb):
                group = [[x] for x in range(nb) if x not in (a, b)] + [[a, b]]
                q = p.merge_blocks(Partition.of(group))
                if q in admissible:
                    edges.append((p, q))
    return sorted(edges)


def lattice_dot(
    k: int,
    mode: Mode,
    sieve: Optional[Sieve] = None,
    values: Optional[Sequence] = None,
    fmt=str,
) -> str:
    """DOT text for the partition lattice, finer partitions at the bottom.

    Nodes are labeled in block notation (by eigenvalue labels when given);
    members of `sieve` are drawn filled.
    """
    if sieve is not None and (sieve.k != k or sieve.mode != mode):
        raise BaseMismatchError("sieve does not match the requested lattice")

    def label(p: Partition) -> str:
        return p.format(values, fmt) if values is not None else str(p)

    lines = ["digraph partition_lattice {", "  rankdir=BT;", '  node [shape=box];']
    for p in sorted(admissible_partitions(k, mode)):
        attrs = f'label="{label(p)}"'
        if sieve is not None and p in sieve:
            attrs += ', style=filled, fillcolor="lightblue"'
        lines.append(f'  "{p}" [{attrs}];')
    for fine, coarse in covering_pairs(k, mode):
        lines.append(f'  "{fine}" -> "{coarse}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
