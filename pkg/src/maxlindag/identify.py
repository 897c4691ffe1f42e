"""Recovering coefficient matrices from tail dependence information.

The standardized coefficient matrix bbar is never identifiable from the
tail dependence matrix chi alone (chi is symmetric, bbar is not), but it
becomes identifiable once the reachability relation, a causal ordering, or
(for max-weighted models) the initial nodes are known.  Each recovery runs
the same row recursion

    bbar_ji = chi(j, i) - sum_{k earlier} min(bbar_ki, bbar_kj)

over rows taken in an order compatible with the extra information.  On top
of the recoveries sit two enumerators that output the standardized
coefficient matrices of every model, or every max-weighted model,
compatible with a given chi.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EnumerationCapError,
    NotRealizableError,
    PatternMismatchError,
    ValidationError,
)
from .graph import CausalOrdering, Dag, is_reachability_matrix
from .mlcm import is_mlcm, is_rmwm_mlcm, minimum_ml_dag
from .taildep import (
    _positive_mask,
    clique_initial_filter,
    maximum_chi_cliques,
    tdm_from_std_mlcm,
    validate_tdm,
)
from .tolerance import DEFAULT_TOL, ZERO_TOL, max_rel_residual


def _partial_row(chi: np.ndarray, bbar: np.ndarray, placed: Sequence[int], node: int) -> np.ndarray:
    # Row of `node` given the rows already placed; 1-based node, full width.
    row = chi[node - 1].copy()
    if placed:
        idx = [p - 1 for p in placed]
        prior = bbar[idx, :]
        at_node = bbar[idx, node - 1]
        row -= np.minimum(prior, at_node[:, None]).sum(axis=0)
    return row


def _settle_row(row: np.ndarray, zero_cols: Sequence[int], node: int, tol: float) -> np.ndarray:
    # Zero forced columns and reject genuinely negative values.  Entries
    # within tol of zero snap to exact zero: they are cancellation residue
    # of the recursion, and a stray 1e-16 would corrupt the support
    # pattern that downstream validity checks read off the matrix.
    for c in zero_cols:
        row[c - 1] = 0.0
    worst = row.min()
    if worst < -tol:
        col = int(np.argmin(row)) + 1
        raise NotRealizableError(
            f"row recursion for node {node} produced {worst!r} at column {col}; "
            "the matrix is not realizable with this structure"
        )
    row[np.abs(row) <= tol] = 0.0
    return row


def recover_from_ordering(
    chi: np.ndarray,
    ordering: CausalOrdering | Sequence[int],
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Standardized coefficient matrix from chi and a causal ordering.

    Rows are filled in ordering position; entries at earlier-placed columns
    are zero.  When the ordering is a causal ordering of a DAG generating
    ``chi``, the output is that model's standardized coefficient matrix.
    Raises :class:`NotRealizableError` when the recursion turns negative
    beyond ``tol``.
    """
    chi = validate_tdm(chi)
    if not isinstance(ordering, CausalOrdering):
        ordering = CausalOrdering(tuple(ordering))
    d = chi.shape[0]
    if len(ordering) != d:
        raise ValidationError(f"ordering has length {len(ordering)}, matrix is {d}x{d}")
    bbar = np.zeros((d, d))
    placed: list[int] = []
    for node in ordering.node_order:
        row = _partial_row(chi, bbar, placed, node)
        bbar[node - 1] = _settle_row(row, placed, node, tol)
        placed.append(node)
    return bbar


def _reach_gate(chi: np.ndarray, reach: np.ndarray, zero_tol: float) -> np.ndarray:
    reach = np.asarray(reach)
    if not is_reachability_matrix(reach):
        raise ValidationError("reachability input is not a reachability matrix of a DAG")
    if reach.shape != chi.shape:
        raise ValidationError(f"dimension mismatch: chi {chi.shape} vs reach {reach.shape}")
    reach = reach.astype(np.int64)
    common = (reach.T @ reach) > 0
    if (_positive_mask(chi, zero_tol) != common).any():
        raise PatternMismatchError(
            "zero pattern of the tail dependence matrix does not match the "
            "common-ancestor pattern of the reachability matrix"
        )
    return reach


def recover_from_reachability(
    chi: np.ndarray,
    reach: np.ndarray,
    tol: float = DEFAULT_TOL,
    zero_tol: float = ZERO_TOL,
) -> np.ndarray:
    """Standardized coefficient matrix from chi and the reachability matrix.

    Exact inverse of the tail dependence computation given the true
    reachability: rows are filled in increasing ancestor count, supported on
    De(j) only.  Raises :class:`PatternMismatchError` when the zero patterns
    disagree and :class:`NotRealizableError` on negative recursion values.
    """
    chi = validate_tdm(chi)
    reach = _reach_gate(chi, reach, zero_tol)
    d = chi.shape[0]
    n_anc = reach.sum(axis=0) - 1
    order = sorted(range(1, d + 1), key=lambda j: (n_anc[j - 1], j))
    bbar = np.zeros((d, d))
    placed: list[int] = []
    for node in order:
        row = _partial_row(chi, bbar, placed, node)
        outside = [i for i in range(1, d + 1) if not reach[node - 1, i - 1]]
        bbar[node - 1] = _settle_row(row, outside, node, tol)
        placed.append(node)
    return bbar


def recover_from_reachability_rmwm(
    chi: np.ndarray,
    reach: np.ndarray,
    tol: float = DEFAULT_TOL,
    zero_tol: float = ZERO_TOL,
) -> np.ndarray:
    """Max-weighted shortcut for :func:`recover_from_reachability`.

    Uses ``bbar_jj = 1 - sum_{k in an(j)} bbar_kj`` followed by
    ``bbar_ji = bbar_jj * chi(j, i)`` on the descendants; agrees with the
    general recovery whenever the underlying model is max-weighted.
    """
    chi = validate_tdm(chi)
    reach = _reach_gate(chi, reach, zero_tol)
    d = chi.shape[0]
    n_anc = reach.sum(axis=0) - 1
    order = sorted(range(1, d + 1), key=lambda j: (n_anc[j - 1], j))
    bbar = np.zeros((d, d))
    for node in order:
        j = node - 1
        diag = 1.0 - bbar[:, j].sum()
        if diag < -tol:
            raise NotRealizableError(
                f"diagonal recursion for node {node} produced {diag!r}"
            )
        diag = max(diag, 0.0)
        row = np.where(reach[j], diag * chi[j], 0.0)
        row[j] = diag
        bbar[j] = row
    return bbar


def ordering_from_initials(
    chi: np.ndarray,
    initials: Sequence[int],
    zero_tol: float = ZERO_TOL,
) -> CausalOrdering:
    """Causal ordering implied by chi and a candidate initial node set.

    Nodes are layered by how many initial nodes they depend on, and sorted
    within a layer by their largest tail dependence on an initial node
    (descending, ties by node index).  For any max-weighted model whose DAG
    has initial nodes ``initials`` and tail dependence ``chi``, the result
    is a valid causal ordering of that DAG.
    """
    chi = validate_tdm(chi)
    positive = _positive_mask(chi, zero_tol)
    d = chi.shape[0]
    w = sorted({int(v) for v in initials})
    if not w or w[0] < 1 or w[-1] > d:
        raise ValidationError(f"initial nodes {initials} outside node range 1..{d}")
    for a in w:
        for b in w:
            if a < b and positive[a - 1, b - 1]:
                raise ValidationError(f"nodes {a} and {b} have positive tail dependence")
    widx = [v - 1 for v in w]
    counts = positive[widx, :].sum(axis=0)
    if (counts == 0).any():
        node = int(np.flatnonzero(counts == 0)[0]) + 1
        raise ValidationError(
            f"node {node} has zero tail dependence on every candidate initial node; "
            "the set cannot be a maximum clique"
        )
    strongest = chi[widx, :].max(axis=0)
    ranked = sorted(range(1, d + 1), key=lambda j: (counts[j - 1], -strongest[j - 1], j))
    return CausalOrdering.from_node_order(ranked)


def recover_rmwm_from_initials(
    chi: np.ndarray,
    initials: Sequence[int],
    tol: float = DEFAULT_TOL,
    zero_tol: float = ZERO_TOL,
) -> np.ndarray:
    """Standardized coefficient matrix of a max-weighted model from chi and V0.

    Composition of :func:`ordering_from_initials` and
    :func:`recover_from_ordering`; unique for max-weighted models.  Outside
    that class the result need not reproduce the generating matrix.
    """
    ordering = ordering_from_initials(chi, initials, zero_tol)
    return recover_from_ordering(chi, ordering, tol)


def initial_bijection(
    chi: np.ndarray,
    initials: Sequence[int],
    other_initials: Sequence[int],
    zero_tol: float = ZERO_TOL,
) -> dict[int, int]:
    """The unique dependence-preserving bijection between two initial sets.

    Maps each node of ``initials`` to the single node of ``other_initials``
    it has positive tail dependence with.  Raises
    :class:`NotRealizableError` when a match is missing, ambiguous, or the
    map fails to be a bijection; the two sets then cannot be initial node
    sets of models sharing ``chi``.
    """
    chi = validate_tdm(chi)
    positive = _positive_mask(chi, zero_tol)
    v0 = sorted({int(v) for v in initials})
    v0t = sorted({int(v) for v in other_initials})
    if len(v0) != len(v0t):
        raise ValidationError(f"initial sets have different sizes: {len(v0)} vs {len(v0t)}")
    phi: dict[int, int] = {}
    for j in v0:
        matches = [i for i in v0t if positive[j - 1, i - 1]]
        if len(matches) != 1:
            raise NotRealizableError(
                f"initial node {j} has {len(matches)} positive matches in {v0t}; expected one"
            )
        phi[j] = matches[0]
    if len(set(phi.values())) != len(v0):
        raise NotRealizableError(f"matching {phi} is not a bijection")
    return phi


@dataclass(frozen=True, eq=False)
class IdentifiedModel:
    """One standardized coefficient matrix compatible with a given chi."""

    std_mlcm: np.ndarray
    min_ml_dag: Dag
    initial_nodes: tuple[int, ...]
    ordering_used: CausalOrdering
    max_weighted: bool


def _quantized_key(bbar: np.ndarray, tol: float) -> bytes:
    # support pattern plus values quantized at the tolerance
    pattern = (bbar > 0).astype(np.int8).tobytes()
    return pattern + np.round(bbar / max(tol, 1e-15)).astype(np.int64).tobytes()


def _ordering_fits_pattern(ordering: CausalOrdering, pattern: np.ndarray) -> bool:
    # Is this a causal ordering of the DAG with the given reachability?
    pos = np.asarray(ordering.positions)
    violation = (pattern > 0) & (pos[:, None] >= pos[None, :])
    np.fill_diagonal(violation, False)
    return not violation.any()


def _sorted_models(models: list[IdentifiedModel], tol: float) -> list[IdentifiedModel]:
    return sorted(
        models,
        key=lambda m: (m.initial_nodes, _quantized_key(m.std_mlcm, tol)),
    )


def enumerate_all(
    chi: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_d: int = 10,
    zero_tol: float = ZERO_TOL,
) -> list[IdentifiedModel]:
    """All standardized coefficient matrices whose models have this chi.

    For every maximum chi-clique surviving the initial-set filter, the
    candidate causal orderings (clique first, remaining nodes grouped by how
    many clique members they depend on) are explored depth-first; a prefix
    is abandoned as soon as its row recursion turns negative, and orderings
    of an already-found reachability pattern are skipped since they would
    reproduce the same matrix.  Each surviving matrix must pass the full
    coefficient-matrix validity check and reproduce ``chi``.  An empty list
    means no recursive max-linear model has this tail dependence matrix.

    The search is capped at ``max_d`` nodes (default 10) because its worst
    case is factorial; larger inputs raise :class:`EnumerationCapError`.
    """
    chi = validate_tdm(chi)
    d = chi.shape[0]
    if d > max_d:
        raise EnumerationCapError(
            f"enumeration over {d} nodes exceeds the cap of {max_d}; "
            "raise max_d explicitly to proceed"
        )
    positive = _positive_mask(chi, zero_tol)
    found: list[IdentifiedModel] = []
    found_patterns: list[np.ndarray] = []
    seen: set[bytes] = set()

    for clique in maximum_chi_cliques(chi, zero_tol):
        if not clique_initial_filter(chi, clique, tol, zero_tol):
            continue
        widx = [v - 1 for v in clique]
        counts = positive[widx, :].sum(axis=0)
        if any(counts[j - 1] == 0 for j in range(1, d + 1) if j not in clique):
            continue
        layers = []
        for level in range(1, len(clique) + 1):
            layer = [j for j in range(1, d + 1) if j not in clique and counts[j - 1] == level]
            if layer:
                layers.append(layer)

        # Clique members are pinned to the first positions in ascending
        # order: their internal order never changes the recovered matrix,
        # and their rows cannot go negative (pairwise zero dependence).
        bbar = np.zeros((d, d))
        placed: list[int] = []
        for node in clique:
            row = _partial_row(chi, bbar, placed, node)
            for c in placed:
                row[c - 1] = 0.0
            row[np.abs(row) <= tol] = 0.0
            bbar[node - 1] = row
            placed.append(node)

        def on_leaf() -> None:
            ordering = CausalOrdering.from_node_order(placed)
            if any(_ordering_fits_pattern(ordering, p) for p in found_patterns):
                return
            candidate = bbar.copy()
            if not is_mlcm(candidate, tol):
                return
            if max_rel_residual(tdm_from_std_mlcm(candidate), chi) > tol:
                return
            key = _quantized_key(candidate, tol)
            if key in seen:
                return
            seen.add(key)
            found.append(
                IdentifiedModel(
                    std_mlcm=candidate,
                    min_ml_dag=minimum_ml_dag(candidate, tol),
                    initial_nodes=tuple(clique),
                    ordering_used=ordering,
                    max_weighted=bool(is_rmwm_mlcm(candidate, tol)),
                )
            )
            found_patterns.append((candidate > 0).astype(np.int64))

        def descend(level: int, remaining: list[int]) -> None:
            if not remaining:
                if level + 1 >= len(layers):
                    on_leaf()
                else:
                    descend(level + 1, list(layers[level + 1]))
                return
            for node in list(remaining):
                row = _partial_row(chi, bbar, placed, node)
                for c in placed:
                    row[c - 1] = 0.0
                if row.min() < -tol:
                    continue
                row[np.abs(row) <= tol] = 0.0
                if row[node - 1] <= 0.0:
                    continue
                bbar[node - 1] = row
                placed.append(node)
                remaining.remove(node)
                descend(level, remaining)
                remaining.append(node)
                placed.pop()
                bbar[node - 1] = 0.0

        descend(0, list(layers[0]) if layers else [])

    return _sorted_models(found, tol)


def enumerate_all_rmwm(
    chi: np.ndarray,
    tol: float = DEFAULT_TOL,
    zero_tol: float = ZERO_TOL,
) -> list[IdentifiedModel]:
    """All standardized coefficient matrices of max-weighted models with this chi.

    One candidate per surviving maximum chi-clique: recover through the
    implied causal ordering, then accept iff the support pattern is a
    reachability matrix and the max-weighted path identities hold.  Runtime
    is bounded by the clique count, no permutation search is involved.
    """
    chi = validate_tdm(chi)
    found: list[IdentifiedModel] = []
    for clique in maximum_chi_cliques(chi, zero_tol):
        if not clique_initial_filter(chi, clique, tol, zero_tol):
            continue
        ordering = ordering_from_initials(chi, clique, zero_tol)
        try:
            bbar = recover_from_ordering(chi, ordering, tol)
        except NotRealizableError:
            continue
        if not is_reachability_matrix((bbar > 0).astype(np.int64)):
            continue
        if not is_rmwm_mlcm(bbar, tol):
            continue
        try:
            if max_rel_residual(tdm_from_std_mlcm(bbar), chi) > tol:
                continue
        except ValidationError:
            continue
        found.append(
            IdentifiedModel(
                std_mlcm=bbar,
                min_ml_dag=minimum_ml_dag(bbar, tol),
                initial_nodes=tuple(clique),
                ordering_used=ordering,
                max_weighted=True,
            )
        )
    return _sorted_models(found, tol)


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    """Constraint check between two candidate max-weighted models.

    ``bijection`` maps the first initial set onto the second; ``moved``
    lists the nodes the bijection does not fix.  ``violations`` is empty iff
    every moved node maps to a terminal node of the first DAG and every
    transitive-reduction path to its image appears reversed in the second
    model's transitive reduction (derived from chi and the second initial
    set, exposed as ``alt_transitive_reduction``).
    """

    bijection: dict[int, int]
    moved: tuple[int, ...]
    violations: tuple[str, ...]
    alt_transitive_reduction: Dag | None

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _all_paths(dag: Dag, start: int, goal: int) -> list[tuple[int, ...]]:
    paths: list[tuple[int, ...]] = []
    stack: list[tuple[int, tuple[int, ...]]] = [(start, (start,))]
    while stack:
        node, path = stack.pop()
        if node == goal:
            paths.append(path)
            continue
        for child in sorted(dag.children(node)):
            stack.append((child, path + (child,)))
    return paths


def rmwm_equivalence_constraints(
    chi: np.ndarray,
    initials: Sequence[int],
    other_initials: Sequence[int],
    transitive_reduction: Dag,
    tol: float = DEFAULT_TOL,
    zero_tol: float = ZERO_TOL,
) -> EquivalenceReport:
    """Check the structural constraints between chi-equivalent max-weighted models.

    Given the transitive reduction of the first model's DAG and two initial
    node sets, verifies that (a) every initial node moved by the bijection
    maps to a terminal node of the first DAG, and (b) every
    transitive-reduction path from a moved node to its image appears
    reversed in the transitive reduction of the second model, which is
    derived from ``chi`` and ``other_initials``.
    """
    chi = validate_tdm(chi)
    phi = initial_bijection(chi, initials, other_initials, zero_tol)
    moved = tuple(j for j in sorted(phi) if phi[j] != j)
    violations: list[str] = []

    terminals = transitive_reduction.terminal_nodes()
    for j in moved:
        if phi[j] not in terminals:
            violations.append(
                f"(a) moved initial node {j} maps to {phi[j]}, "
                "which is not a terminal node of the first DAG"
            )

    alt: Dag | None = None
    try:
        bbar = recover_rmwm_from_initials(chi, other_initials, tol, zero_tol)
        if is_reachability_matrix((bbar > 0).astype(np.int64)) and is_rmwm_mlcm(bbar, tol):
            alt = minimum_ml_dag(bbar, tol)
        else:
            violations.append(
                "(b) no max-weighted model with the alternative initial nodes exists"
            )
    except (NotRealizableError, ValidationError):
        violations.append(
            "(b) no max-weighted model with the alternative initial nodes exists"
        )

    if alt is not None:
        for j in moved:
            for path in _all_paths(transitive_reduction, j, phi[j]):
                missing = [
                    (b, a) for a, b in zip(path, path[1:]) if (b, a) not in alt.edges
                ]
                if missing:
                    violations.append(
                        f"(b) path {'->'.join(map(str, path))} is not reversed in the "
                        f"alternative transitive reduction (missing {missing})"
                    )

    return EquivalenceReport(
        bijection=phi,
        moved=moved,
        violations=tuple(violations),
        alt_transitive_reduction=alt,
    )
