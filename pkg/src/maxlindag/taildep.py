"""Tail dependence matrices and their graph structure.

The tail dependence coefficient between two components of a recursive
max-linear model is the sum of pairwise minima of the corresponding columns
of the standardized coefficient matrix,

    chi(i, j) = sum_{k in An(i) & An(j)} min(bbar_ki, bbar_kj),

so chi(i, j) vanishes exactly when i and j share no ancestor.  That zero
pattern drives everything here: the complement of the chi-graph, whose
maximum cliques are the candidate initial node sets, a necessary filter for
those candidates, coefficient representations of bbar entries purely in
terms of chi, and the full characterization of which matrices are tail
dependence matrices of a max-weighted model on a given DAG.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import IllConditionedError, ValidationError
from .graph import Dag, reachability_matrix
from .tolerance import DEFAULT_TOL, ZERO_TOL


def validate_tdm(chi: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Check symmetry, unit diagonal, and [0, 1] range; return as float array."""
    chi = np.asarray(chi, dtype=float)
    if chi.ndim != 2 or chi.shape[0] != chi.shape[1]:
        raise ValidationError(f"tail dependence matrix must be square, got shape {chi.shape}")
    asym = np.abs(chi - chi.T)
    if asym.max(initial=0.0) > tol:
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        raise ValidationError(
            f"matrix is asymmetric at entry ({i + 1},{j + 1}): "
            f"{chi[i, j]!r} vs {chi[j, i]!r}"
        )
    diag_off = np.abs(np.diag(chi) - 1.0)
    if diag_off.max(initial=0.0) > tol:
        i = int(np.argmax(diag_off))
        raise ValidationError(f"diagonal entry ({i + 1},{i + 1}) is {chi[i, i]!r}, expected 1")
    out_of_range = (chi < -tol) | (chi > 1.0 + tol)
    if out_of_range.any():
        i, j = map(int, np.argwhere(out_of_range)[0])
        raise ValidationError(f"entry ({i + 1},{j + 1}) = {chi[i, j]!r} outside [0, 1]")
    return chi


def tdm_from_std_mlcm(bbar: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Tail dependence matrix of a standardized coefficient matrix.

    Column sums of ``bbar`` must be one within ``tol``; the output is
    symmetric with unit diagonal by construction.
    """
    bbar = np.asarray(bbar, dtype=float)
    if bbar.ndim != 2 or bbar.shape[0] != bbar.shape[1]:
        raise ValidationError(f"coefficient matrix must be square, got shape {bbar.shape}")
    if (bbar < 0).any() or (np.diag(bbar) <= 0).any():
        raise ValidationError("matrix must be nonnegative with positive diagonal")
    colsums = bbar.sum(axis=0)
    if np.abs(colsums - 1.0).max() > max(tol, 1e-8):
        j = int(np.argmax(np.abs(colsums - 1.0)))
        raise ValidationError(f"column {j + 1} sums to {colsums[j]!r}, expected 1")
    d = bbar.shape[0]
    chi = np.empty((d, d))
    for j in range(d):
        chi[: j + 1, j] = np.minimum(bbar[:, : j + 1], bbar[:, j : j + 1]).sum(axis=0)
        chi[j, : j + 1] = chi[: j + 1, j]
    return chi


def _positive_mask(chi: np.ndarray, zero_tol: float = ZERO_TOL) -> np.ndarray:
    """Classify entries as positive (True) or zero (False).

    Entries strictly between zero and ``zero_tol`` are neither: they raise
    :class:`IllConditionedError` instead of being classified silently.
    """
    chi = np.asarray(chi, dtype=float)
    band = (chi > 0.0) & (chi < zero_tol)
    if band.any():
        i, j = map(int, np.argwhere(band)[0])
        raise IllConditionedError(
            f"entry ({i + 1},{j + 1}) = {chi[i, j]!r} lies in (0, {zero_tol}); "
            "refusing to classify it as zero or positive"
        )
    return chi >= zero_tol


def independence_pattern_check(chi: np.ndarray, reach: np.ndarray,
                               zero_tol: float = ZERO_TOL) -> bool:
    """True iff the zero pattern of chi matches sgn(R^T R).

    The (i, j) entry of R^T R counts common ancestors, so this verifies
    that chi vanishes exactly on pairs with disjoint ancestor sets.
    """
    chi = np.asarray(chi, dtype=float)
    reach = np.asarray(reach)
    if chi.shape != reach.shape or chi.ndim != 2:
        raise ValidationError(f"dimension mismatch: chi {chi.shape} vs reach {reach.shape}")
    common = (reach.astype(np.int64).T @ reach.astype(np.int64)) > 0
    return bool((_positive_mask(chi, zero_tol) == common).all())


def chi_complement_graph(chi: np.ndarray, zero_tol: float = ZERO_TOL) -> dict[int, frozenset[int]]:
    """Adjacency of the complement of the chi-graph.

    Nodes i != j are adjacent iff chi(i, j) is zero, i.e. iff the
    corresponding components are independent.
    """
    chi = validate_tdm(chi)
    positive = _positive_mask(chi, zero_tol)
    d = chi.shape[0]
    return {
        i: frozenset(j for j in range(1, d + 1) if j != i and not positive[i - 1, j - 1])
        for i in range(1, d + 1)
    }


def maximum_chi_cliques(chi: np.ndarray, zero_tol: float = ZERO_TOL) -> list[tuple[int, ...]]:
    """All maximum cliques of the chi-complement graph.

    Every initial node set of a DAG generating ``chi`` appears among them.
    Cliques are returned sorted ascending, the list lexicographically.
    """
    adjacency = chi_complement_graph(chi, zero_tol)
    cliques: list[frozenset[int]] = []
    _bron_kerbosch(adjacency, frozenset(), set(adjacency), set(), cliques)
    best = max(len(c) for c in cliques)
    return sorted(tuple(sorted(c)) for c in cliques if len(c) == best)


def _bron_kerbosch(
    adjacency: dict[int, frozenset[int]],
    clique: frozenset[int],
    candidates: set[int],
    excluded: set[int],
    out: list[frozenset[int]],
) -> None:
    # Pivoted Bron-Kerbosch over all maximal cliques.
    if not candidates and not excluded:
        out.append(clique)
        return
    pivot = max(candidates | excluded, key=lambda v: len(adjacency[v] & candidates))
    for v in sorted(candidates - adjacency[pivot]):
        _bron_kerbosch(
            adjacency, clique | {v}, candidates & adjacency[v], excluded & adjacency[v], out
        )
        candidates.remove(v)
        excluded.add(v)


def clique_initial_filter(
    chi: np.ndarray,
    clique: Sequence[int],
    tol: float = DEFAULT_TOL,
    zero_tol: float = ZERO_TOL,
) -> bool:
    """Necessary condition for a maximum chi-clique to be an initial node set.

    Were the clique W the initial nodes of a generating DAG, every pair
    outside W would satisfy ``chi(i, j) >= sum_{k in W} min(chi(k, i),
    chi(k, j))``.  A False return certifies that no compatible model has
    initial nodes W; True keeps W as a candidate.
    """
    chi = validate_tdm(chi)
    positive = _positive_mask(chi, zero_tol)
    d = chi.shape[0]
    w = sorted({int(v) for v in clique})
    if not w or w[0] < 1 or w[-1] > d:
        raise ValidationError(f"clique {clique} outside node range 1..{d}")
    for a in w:
        for b in w:
            if a < b and positive[a - 1, b - 1]:
                raise ValidationError(f"nodes {a} and {b} have positive tail dependence")
    rest = [v for v in range(1, d + 1) if v not in set(w)]
    widx = [v - 1 for v in w]
    for i in rest:
        for j in rest:
            if j < i:
                continue
            bound = np.minimum(chi[widx, i - 1], chi[widx, j - 1]).sum()
            if chi[i - 1, j - 1] < bound - tol:
                return False
    return True


def lambda_coefficients(dag: Dag, j: int) -> dict[int, float]:
    """Coefficients lambda_jk over the ancestors of ``j``.

    Defined by the recursion ``lambda_jk = 1 - sum_{l in de(k) & an(j)}
    lambda_jl``; transitive-reduction parents of ``j`` get coefficient one.
    Values may be zero or negative by design.
    """
    ancestors = dag.ancestors(j)
    coeffs: dict[int, float] = {}
    for k in reversed(dag.topological_order()):
        if k not in ancestors:
            continue
        coeffs[k] = 1.0 - sum(coeffs[l] for l in dag.descendants(k) & ancestors)
    return coeffs


def lambda_representation(dag: Dag, chi: np.ndarray, j: int, i: int) -> float:
    """Coefficient ``bbar_ji`` expressed purely through tail dependencies.

    For a max-weighted model consistent with ``chi``,

        bbar_ji = chi(j, i) - sum_{k in an(j)} lambda_jk * chi(k, i).

    Requires ``j`` in An(i); with j == i this yields the diagonal entry.
    """
    chi = validate_tdm(chi)
    if chi.shape[0] != dag.d:
        raise ValidationError(f"matrix is {chi.shape[0]}x{chi.shape[0]}, DAG has {dag.d} nodes")
    if j != i and j not in dag.ancestors(i):
        raise ValidationError(f"node {j} is not in An({i})")
    coeffs = lambda_coefficients(dag, j)
    return float(chi[j - 1, i - 1] - sum(c * chi[k - 1, i - 1] for k, c in coeffs.items()))


def lowest_common_ancestors(dag: Dag, i: int, j: int) -> frozenset[int]:
    """Common ancestors of i and j without a path to another common ancestor."""
    common = dag.ancestors_closed(i) & dag.ancestors_closed(j)
    return frozenset(k for k in common if not (dag.descendants(k) & common))


def mu_coefficients(dag: Dag, i: int, j: int) -> dict[int, float]:
    """Coefficients mu_ij,k over the common ancestors of ``i`` and ``j``.

    Recursion ``mu_ij,k = 1 - sum_{l in de(k) & An(i) & An(j)} mu_ij,l``;
    lowest common ancestors get coefficient one.
    """
    common = dag.ancestors_closed(i) & dag.ancestors_closed(j)
    coeffs: dict[int, float] = {}
    for k in reversed(dag.topological_order()):
        if k not in common:
            continue
        coeffs[k] = 1.0 - sum(coeffs[l] for l in dag.descendants(k) & common)
    return coeffs


class MuRepresentation(NamedTuple):
    """Tail dependence of a pair as a combination of minima with ancestors."""

    value: float
    coefficients: dict[int, float]
    lca: frozenset[int]


def mu_representation(dag: Dag, chi: np.ndarray, i: int, j: int) -> MuRepresentation:
    """Evaluate ``chi(i, j)`` as ``sum_k mu_ij,k * min(chi(k, i), chi(k, j))``.

    For a max-weighted model consistent with ``chi`` the value reproduces
    the input entry; the coefficients and the lowest common ancestors are
    returned alongside it.
    """
    chi = validate_tdm(chi)
    if chi.shape[0] != dag.d:
        raise ValidationError(f"matrix is {chi.shape[0]}x{chi.shape[0]}, DAG has {dag.d} nodes")
    dag._check_node(i)
    dag._check_node(j)
    coeffs = mu_coefficients(dag, i, j)
    value = sum(
        c * min(chi[k - 1, i - 1], chi[k - 1, j - 1]) for k, c in coeffs.items()
    )
    return MuRepresentation(float(value), coeffs, lowest_common_ancestors(dag, i, j))


@dataclass(frozen=True)
class RmwmTdmCheck:
    """Outcome of the max-weighted tail dependence characterization.

    ``diag`` holds the recursively computed diagonal entries bbar_ii.  On
    success ``std_mlcm`` is the full standardized coefficient matrix implied
    by the input; ``failures`` lists every violated condition.
    """

    ok: bool
    diag: np.ndarray
    std_mlcm: np.ndarray | None
    failures: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _chi_close(a: float, b: float, tol: float) -> bool:
    # chi entries live in [0, 1]: flooring the scale at one makes the
    # comparison absolute there, so sub-tolerance perturbations of any
    # entry, however small, never flip a verdict.
    return abs(a - b) <= tol * max(abs(a), abs(b), 1.0)


def check_rmwm_tdm(dag: Dag, chi: np.ndarray, tol: float = DEFAULT_TOL) -> RmwmTdmCheck:
    """Is ``chi`` the tail dependence matrix of a max-weighted model on ``dag``?

    Verifies the four characterizing conditions:

    (a) the zero pattern of chi matches sgn(R^T R) of the DAG;
    (b) the recursively defined diagonal entries
        ``bbar_ii = 1 - sum_{k in an(i)} bbar_kk * chi(k, i)`` stay positive;
    (c) ``chi(j, i) = chi(j, k) * chi(k, i)`` for every node i, ancestor j,
        and intermediate parent k of i;
    (d) for incomparable pairs with common ancestors,
        ``chi(i, j) = sum_k bbar_kk * min(chi(k, i), chi(k, j))``.

    Zero classification in (a) and the equality comparisons in (c), (d)
    treat ``tol`` absolutely on the [0, 1] scale, so perturbations below
    the tolerance never flip the verdict.
    """
    chi = validate_tdm(chi, tol)
    if chi.shape[0] != dag.d:
        raise ValidationError(f"matrix is {chi.shape[0]}x{chi.shape[0]}, DAG has {dag.d} nodes")
    d = dag.d
    failures: list[str] = []

    reach = reachability_matrix(dag)
    common_counts = reach.T @ reach
    positive = chi > tol
    np.fill_diagonal(positive, True)
    mismatch = positive != (common_counts > 0)
    if mismatch.any():
        a, b = map(int, np.argwhere(mismatch)[0])
        failures.append(
            f"(a) zero pattern: entry ({a + 1},{b + 1}) disagrees with common-ancestor pattern"
        )

    diag = np.zeros(d)
    for i in dag.topological_order():
        acc = sum(diag[k - 1] * chi[k - 1, i - 1] for k in dag.ancestors(i))
        diag[i - 1] = 1.0 - acc
    bad = [i + 1 for i in range(d) if diag[i] <= 0.0]
    if bad:
        failures.append(f"(b) nonpositive diagonal at nodes {bad}")

    for i in range(1, d + 1):
        parents = dag.parents(i)
        for j in dag.ancestors(i):
            for k in dag.descendants(j) & parents:
                lhs = chi[j - 1, i - 1]
                rhs = chi[j - 1, k - 1] * chi[k - 1, i - 1]
                if not _chi_close(lhs, rhs, tol):
                    failures.append(
                        f"(c) chain ({j},{k},{i}): chi={lhs!r} vs product={rhs!r}"
                    )

    for i in range(1, d + 1):
        an_i = dag.ancestors_closed(i)
        for j in range(i + 1, d + 1):
            if j in an_i or i in dag.ancestors_closed(j):
                continue
            shared = an_i & dag.ancestors_closed(j)
            if not shared:
                continue
            rhs = sum(
                diag[k - 1] * min(chi[k - 1, i - 1], chi[k - 1, j - 1]) for k in shared
            )
            if not _chi_close(chi[i - 1, j - 1], rhs, tol):
                failures.append(
                    f"(d) pair ({i},{j}): chi={chi[i - 1, j - 1]!r} vs combination={rhs!r}"
                )

    if failures:
        return RmwmTdmCheck(False, diag, None, tuple(failures))

    bbar = np.zeros((d, d))
    for i in range(1, d + 1):
        bbar[i - 1, i - 1] = diag[i - 1]
        for j in dag.ancestors(i):
            bbar[j - 1, i - 1] = diag[j - 1] * chi[j - 1, i - 1]
    return RmwmTdmCheck(True, diag, bbar, ())
