"""Finite-group core: multiplication tables, subgroup embeddings, coset factorizations.

Elements are dense integer indices into precomputed tables, so all group
arithmetic is exact. Permutation groups are enumerated once into tables;
the permutation product is "apply the left factor first", i.e.
``(a * b)(x) = b(a(x))``, which is the convention the tetrahedron fixtures
in :mod:`planelift.tetra` rely on.

All types here are immutable after construction and safe to share across
threads without synchronization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FiniteGroup",
    "SubgroupEmbedding",
    "CosetDecomposition",
    "build_group",
    "subgroup_embedding",
    "named_embedding",
    "coset_decomposition",
]


# ---------------------------------------------------------------------------
# permutation helpers

def _perm_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # left factor acts first: (a * b)(x) = b(a(x))
    return tuple(b[a[x]] for x in range(len(a)))


def _perm_parity(p: tuple[int, ...]) -> int:
    seen = [False] * len(p)
    parity = 0
    for start in range(len(p)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = p[x]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def _cycle_label(p: tuple[int, ...]) -> str:
    """Canonical cycle notation, 1-based, e.g. ``(1,2,3)`` or ``(1,2)(3,4)``."""
    seen = [False] * len(p)
    cycles = []
    for start in range(len(p)):
        if seen[start] or p[start] == start:
            seen[start] = True
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x + 1)
            x = p[x]
        cycles.append(cyc)
    if not cycles:
        return "e"
    return "".join("(" + ",".join(str(x) for x in cyc) + ")" for cyc in cycles)


# ---------------------------------------------------------------------------
# core types

@dataclass(frozen=True)
class FiniteGroup:
    """A finite group stored as exact integer tables.

    Attributes
    ----------
    name : str
        Identifier such as ``"A4"`` or ``"Z3"``; ``"custom"`` for raw tables.
    mul : (n, n) int array
        ``mul[a, b]`` is the index of the product ``a * b``.
    inv : (n,) int array
        Index of each element's inverse.
    identity : int
        Index of the identity element.
    labels : tuple of str
        Human-readable element names.
    conjugacy_classes : tuple of tuple of int
        Partition of element indices, ordered by smallest member; the
        identity class comes first.
    """

    name: str
    mul: np.ndarray
    inv: np.ndarray
    identity: int
    labels: tuple[str, ...]
    conjugacy_classes: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    def element_index(self, label: str) -> int:
        return self.labels.index(label)

    def power(self, g: int, k: int) -> int:
        out = self.identity
        if k < 0:
            g, k = int(self.inv[g]), -k
        for _ in range(k):
            out = int(self.mul[out, g])
        return out

    def class_of(self, g: int) -> int:
        for idx, cls in enumerate(self.conjugacy_classes):
            if g in cls:
                return idx
        raise ValueError(f"element {g} not in any conjugacy class")

    def __repr__(self) -> str:  # keep reprs short; tables are large
        return f"FiniteGroup({self.name!r}, order={self.order})"


@dataclass(frozen=True)
class SubgroupEmbedding:
    """Injective homomorphism from ``sub`` into ``parent``."""

    sub: FiniteGroup
    parent: FiniteGroup
    embed: np.ndarray  # sub element index -> parent element index

    @property
    def index(self) -> int:
        return self.parent.order // self.sub.order


@dataclass(frozen=True)
class CosetDecomposition:
    """Left-coset data ``g * reps[i] = reps[perm[g, i]] * embed(factor[g, i])``.

    ``perm[g]`` is the permutation of coset representatives induced by left
    multiplication with ``g``; ``factor[g, i]`` is the subgroup element (as a
    sub-group index) absorbed in the process. Both identities hold exactly in
    integer arithmetic and compose: ``perm[g'] o perm[g] = perm[g'g]`` and
    ``factor[g'g, i] = factor[g', perm[g, i]] * factor[g, i]``.
    """

    embedding: SubgroupEmbedding
    reps: tuple[int, ...]
    coset_of: np.ndarray  # parent element -> coset index
    perm: np.ndarray      # (order_parent, n_cosets)
    factor: np.ndarray    # (order_parent, n_cosets), sub-group indices

    @property
    def n_cosets(self) -> int:
        return len(self.reps)


# ---------------------------------------------------------------------------
# table validation and construction

def _first_failing_triple(mul: np.ndarray) -> tuple[int, int, int] | None:
    lhs = mul[mul, :]
    rhs = mul[:, mul]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        a, b, c = (int(x) for x in bad[0])
        return a, b, c
    return None


def _finish_group(name: str, mul: np.ndarray, labels: tuple[str, ...]) -> FiniteGroup:
    n = mul.shape[0]
    if mul.shape != (n, n) or np.any(mul < 0) or np.any(mul >= n):
        raise ValueError("invalid group table: entries out of range")
    triple = _first_failing_triple(mul)
    if triple is not None:
        raise ValueError(f"invalid group table: associativity fails at triple {triple}")
    identity = None
    rng = np.arange(n)
    for e in range(n):
        if np.array_equal(mul[e], rng) and np.array_equal(mul[:, e], rng):
            identity = e
            break
    if identity is None:
        raise ValueError("invalid group table: no identity element")
    inv = np.full(n, -1, dtype=np.int64)
    for g in range(n):
        hits = np.nonzero(mul[g] == identity)[0]
        if len(hits) != 1 or mul[hits[0], g] != identity:
            raise ValueError(f"invalid group table: element {g} has no two-sided inverse")
        inv[g] = hits[0]
    classes = _conjugacy_classes(mul, inv)
    mul = np.ascontiguousarray(mul, dtype=np.int64)
    mul.setflags(write=False)
    inv.setflags(write=False)
    return FiniteGroup(name, mul, inv, int(identity), labels, classes)


def _conjugacy_classes(mul: np.ndarray, inv: np.ndarray) -> tuple[tuple[int, ...], ...]:
    n = mul.shape[0]
    remaining = set(range(n))
    classes = []
    while remaining:
        x = min(remaining)
        orbit = {int(mul[mul[inv[a], x], a]) for a in range(n)}
        classes.append(tuple(sorted(orbit)))
        remaining -= orbit
    classes.sort(key=lambda c: c[0])
    return tuple(classes)


def _cyclic(n: int) -> FiniteGroup:
    mul = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    labels = tuple("e" if k == 0 else ("g" if k == 1 else f"g^{k}") for k in range(n))
    return _finish_group(f"Z{n}", mul.astype(np.int64), labels)


def _perm_group(name: str, elements: list[tuple[int, ...]]) -> FiniteGroup:
    elements = sorted(elements)
    index = {p: i for i, p in enumerate(elements)}
    n = len(elements)
    mul = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            mul[i, j] = index[_perm_mul(a, b)]
    labels = tuple(_cycle_label(p) for p in elements)
    return _finish_group(name, mul, labels)


def _symmetric(n: int) -> FiniteGroup:
    return _perm_group(f"S{n}", [p for p in itertools.permutations(range(n))])


def _alternating(n: int) -> FiniteGroup:
    elems = [p for p in itertools.permutations(range(n)) if _perm_parity(p) == 0]
    return _perm_group(f"A{n}", elems)


_MAX_ORDER = 120


def build_group(spec: str | np.ndarray) -> FiniteGroup:
    """Build a named group or validate an explicit multiplication table.

    Named groups: ``Zn`` (cyclic), ``A4``, ``A5``, ``S3``, ``S4``, ``S5`` and
    ``trivial`` (alias for ``Z1``), all capped at order 120 so exhaustive
    invariant checks stay instant.
    """
    if isinstance(spec, str):
        name = spec.strip()
        if name == "trivial":
            return _cyclic(1)
        if name.startswith("Z") and name[1:].isdigit():
            n = int(name[1:])
            if not 1 <= n <= _MAX_ORDER:
                raise ValueError(f"unsupported group {name!r}: order must be in [1, {_MAX_ORDER}]")
            return _cyclic(n)
        if name in ("A4", "A5"):
            return _alternating(int(name[1]))
        if name in ("S3", "S4", "S5"):
            return _symmetric(int(name[1]))
        raise ValueError(f"unknown group name {name!r}")
    table = np.asarray(spec, dtype=np.int64)
    labels = tuple(f"x{i}" for i in range(table.shape[0]))
    return _finish_group("custom", table, labels)


def subgroup_embedding(sub: FiniteGroup, parent: FiniteGroup,
                       embed: list[int] | np.ndarray) -> SubgroupEmbedding:
    """Wrap and validate an injective homomorphism ``sub -> parent``."""
    embed = np.asarray(embed, dtype=np.int64)
    if embed.shape != (sub.order,):
        raise ValueError("embedding must map every subgroup element")
    if len(set(embed.tolist())) != sub.order:
        raise ValueError("embedding is not injective")
    if embed[sub.identity] != parent.identity:
        raise ValueError("embedding does not preserve the identity")
    for a in range(sub.order):
        for b in range(sub.order):
            if embed[sub.mul[a, b]] != parent.mul[embed[a], embed[b]]:
                raise ValueError(f"embedding is not a homomorphism at pair ({a}, {b})")
    if parent.order % sub.order != 0:
        raise ValueError("subgroup order does not divide parent order")
    embed = embed.copy()
    embed.setflags(write=False)
    return SubgroupEmbedding(sub, parent, embed)


_GENERATOR_LABEL = {("Z3", "A4"): "(1,2,3)", ("Z5", "A5"): "(1,2,3,4,5)"}


def named_embedding(sub_name: str, parent_name: str) -> SubgroupEmbedding:
    """Canonical embedding between named groups.

    Supported: any group into itself, the trivial group into anything,
    ``Zm`` into ``Zn`` when ``m`` divides ``n``, ``Z3`` into ``A4`` and
    ``Z5`` into ``A5`` (generated by a single rotation cycle).
    """
    parent = build_group(parent_name)
    if sub_name == parent_name:
        return subgroup_embedding(parent, parent, np.arange(parent.order))
    sub = build_group(sub_name)
    if sub.order == 1:
        return subgroup_embedding(sub, parent, [parent.identity])
    key = (sub_name, parent_name)
    if key in _GENERATOR_LABEL:
        gen = parent.element_index(_GENERATOR_LABEL[key])
        embed = [parent.power(gen, k) for k in range(sub.order)]
        return subgroup_embedding(sub, parent, embed)
    if sub_name.startswith("Z") and parent_name.startswith("Z") \
            and parent.order % sub.order == 0:
        step = parent.order // sub.order
        return subgroup_embedding(sub, parent, [(k * step) % parent.order for k in range(sub.order)])
    raise ValueError(f"no canonical embedding of {sub_name!r} into {parent_name!r}")


def coset_decomposition(embedding: SubgroupEmbedding,
                        reps: list[int] | None = None) -> CosetDecomposition:
    """Decompose the parent group into left cosets of the embedded subgroup.

    Representatives default to the smallest element index in each coset,
    which makes the output deterministic; an explicit ``reps`` list (one
    element per coset) overrides that choice, e.g. to pin a fixture.
    """
    sub, parent = embedding.sub, embedding.parent
    image = embedding.embed
    n, m = parent.order, embedding.index
    back = {int(p): s for s, p in enumerate(image)}

    coset_of = np.full(n, -1, dtype=np.int64)
    auto_reps = []
    for g in range(n):
        if coset_of[g] >= 0:
            continue
        members = parent.mul[g, image]
        coset_of[members] = len(auto_reps)
        auto_reps.append(int(members.min()))
    if reps is None:
        chosen = auto_reps
    else:
        if sorted(int(coset_of[r]) for r in reps) != list(range(m)):
            raise ValueError("explicit representatives must cover each coset exactly once")
        chosen = [int(r) for r in reps]
        # renumber cosets to follow the supplied representative order
        relabel = np.empty(m, dtype=np.int64)
        for new, r in enumerate(chosen):
            relabel[coset_of[r]] = new
        coset_of = relabel[coset_of]

    perm = np.empty((n, m), dtype=np.int64)
    factor = np.empty((n, m), dtype=np.int64)
    for g in range(n):
        for i in range(m):
            t = parent.mul[g, chosen[i]]
            j = int(coset_of[t])
            h_parent = int(parent.mul[parent.inv[chosen[j]], t])
            perm[g, i] = j
            factor[g, i] = back[h_parent]

    coset_of.setflags(write=False)
    perm.setflags(write=False)
    factor.setflags(write=False)
    return CosetDecomposition(embedding, tuple(chosen), coset_of, perm, factor)
