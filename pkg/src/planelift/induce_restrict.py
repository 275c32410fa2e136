"""Restriction, block-construction induction, branching/induction tables.

Induction uses the coset factorization ``g * g_i = g_{j} * h`` directly: the
matrix of ``g`` places the subgroup block for ``h`` at block position
``(j, i)`` and zeros elsewhere. Branching tables are computed by decomposing
restrictions, induction tables by decomposing inductions, so comparing the
two via transposition is a genuine cross-validation rather than a tautology.

All operations are pure functions over immutable inputs; table construction
is trivially parallelizable across irreps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import CosetDecomposition, SubgroupEmbedding, coset_decomposition
from .reps import (
    Decomposition,
    IrrepTable,
    Representation,
    decompose,
    irrep_table,
    regular_representation,
)

__all__ = [
    "BranchingTable",
    "InductionTable",
    "restrict",
    "induce",
    "branching_table",
    "induction_table",
    "check_frobenius",
    "completeness_check",
    "boundary_compatibility",
]


@dataclass(frozen=True)
class BranchingTable:
    """Rows: parent-group irreps; columns: subgroup irreps; integer entries."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    entries: np.ndarray  # (len(rows), len(cols)) int

    def __getitem__(self, key: tuple[str, str]) -> int:
        r, c = key
        return int(self.entries[self.rows.index(r), self.cols.index(c)])


@dataclass(frozen=True)
class InductionTable:
    """Rows: subgroup irreps; columns: parent-group irreps; integer entries."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    entries: np.ndarray

    def __getitem__(self, key: tuple[str, str]) -> int:
        r, c = key
        return int(self.entries[self.rows.index(r), self.cols.index(c)])


def restrict(rep: Representation, embedding: SubgroupEmbedding) -> Representation:
    """Evaluate a parent-group representation on the embedded subgroup."""
    if rep.group.name != embedding.parent.name:
        raise ValueError("representation is not defined on the embedding's parent group")
    return Representation(embedding.sub, rep.matrices[embedding.embed],
                          f"Res({rep.label})")


def induce(rep: Representation, cosets: CosetDecomposition) -> Representation:
    """Induce a subgroup representation up to the parent group.

    The induced space is one copy of the representation space per left
    coset; ``g`` maps copy ``i`` onto copy ``perm[g, i]`` through the
    subgroup matrix of ``factor[g, i]``. Output dimension is the coset
    index times the input dimension.
    """
    if rep.group.name != cosets.embedding.sub.name:
        raise ValueError("representation is not defined on the embedding's subgroup")
    m = cosets.n_cosets
    d = rep.dim
    parent = cosets.embedding.parent
    mats = np.zeros((parent.order, m * d, m * d), dtype=np.complex128)
    for g in range(parent.order):
        for i in range(m):
            j = cosets.perm[g, i]
            h = cosets.factor[g, i]
            mats[g, j * d:(j + 1) * d, i * d:(i + 1) * d] = rep.matrices[h]
    return Representation(parent, mats, f"Ind({rep.label})")


def branching_table(embedding: SubgroupEmbedding,
                    parent_table: IrrepTable | None = None,
                    sub_table: IrrepTable | None = None) -> BranchingTable:
    """Multiplicity of each subgroup irrep inside each restricted parent irrep."""
    parent_table = parent_table or irrep_table(embedding.parent)
    sub_table = sub_table or irrep_table(embedding.sub)
    rows = parent_table.labels()
    cols = sub_table.labels()
    entries = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, sigma in enumerate(parent_table.irreps):
        dec = decompose(restrict(sigma, embedding), sub_table)
        for c, lbl in enumerate(cols):
            entries[r, c] = dec.multiplicities.get(lbl, 0)
    return BranchingTable(rows, cols, entries)


def induction_table(cosets: CosetDecomposition,
                    parent_table: IrrepTable | None = None,
                    sub_table: IrrepTable | None = None) -> InductionTable:
    """Multiplicity of each parent irrep inside each induced subgroup irrep."""
    emb = cosets.embedding
    parent_table = parent_table or irrep_table(emb.parent)
    sub_table = sub_table or irrep_table(emb.sub)
    rows = sub_table.labels()
    cols = parent_table.labels()
    entries = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, rho in enumerate(sub_table.irreps):
        dec = decompose(induce(rho, cosets), parent_table)
        for c, lbl in enumerate(cols):
            entries[r, c] = dec.multiplicities.get(lbl, 0)
    return InductionTable(rows, cols, entries)


def check_frobenius(branching: BranchingTable,
                    induction: InductionTable) -> tuple[bool, tuple[str, str] | None]:
    """True iff the branching table is the transpose of the induction table.

    Returns the first mismatching (parent irrep, subgroup irrep) pair
    otherwise.
    """
    if branching.rows != induction.cols or branching.cols != induction.rows:
        raise ValueError("tables are not over the same pair of irrep sets")
    diff = branching.entries != induction.entries.T
    if diff.any():
        r, c = np.argwhere(diff)[0]
        return False, (branching.rows[r], branching.cols[c])
    return True, None


def completeness_check(embedding: SubgroupEmbedding,
                       cosets: CosetDecomposition | None = None) -> bool:
    """Inducing the subgroup's regular representation yields the parent's.

    Verified at the level of irreducible decompositions, which determine
    representations completely.
    """
    cosets = cosets or coset_decomposition(embedding)
    parent_table = irrep_table(embedding.parent)
    lifted = induce(regular_representation(embedding.sub), cosets)
    lhs = decompose(lifted, parent_table)
    rhs = decompose(regular_representation(embedding.parent), parent_table)
    return lhs == rhs


def boundary_compatibility(h_layer: Decomposition, g_layer: Decomposition,
                           branching: BranchingTable) -> int:
    """Dimension of the intertwiner space between an H-typed layer and the
    restriction of a G-typed layer.

    Equals ``sum_rho m_rho * sum_sigma n_sigma * B[sigma, rho]``; by
    reciprocity the same number counts intertwiners from the induced H-layer
    into the G-layer, so this is the weight-space dimension available at the
    boundary where a network switches groups.
    """
    total = 0
    for rho, m in h_layer.multiplicities.items():
        for sigma, nmult in g_layer.multiplicities.items():
            total += m * nmult * branching[sigma, rho]
    return total
