"""Restricted master problem over cluster columns.

The master LP selects nonnegative weights for "cluster" columns (vertex
subsets that may survive deletion as one of the k required pairwise
non-adjacent groups) together with per-vertex deletion variables.  Rows:

* one *count* row      -- at least k clusters are selected (exactly k in
                          the equality variant),
* one *cover* row per vertex -- every vertex is deleted or covered by a
                          selected cluster,
* one row per clique of an edge-covering clique family -- at most one
  selected cluster may touch any clique; since every edge lies inside
  some family clique, integral solutions cannot pick two clusters joined
  by an edge,
* optionally a *connectivity* row forcing the deletion cost up to the
  weighted vertex connectivity of the graph.

Deletion variables are binary in the full model; the LP relaxation keeps
them without an upper bound on purpose (the cover rows already cap them
at optimality, and the pricing theory relies on this shape).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from . import lp
from .flow import weighted_vertex_connectivity
from .graph import Graph
from .instance import Instance

log = logging.getLogger(__name__)

COVER = "cover"
PARTITION = "partition"
EDGES = "edges"
FAMILY_MODES = (COVER, PARTITION, EDGES)

#: duals with magnitude below this are treated as exactly zero
DUAL_ZERO_TOL = 1e-9

#: a clique row is considered violated when its activity exceeds 1 + this
CLIQUE_VIOLATION_TOL = 1e-6

#: the connectivity row applies automatically only up to this many parts
CONNECTIVITY_MAX_K = 15


# ---------------------------------------------------------------------------
# clique families


@dataclass
class CliqueFamily:
    """An ordered, edge-covering family of cliques.

    ``member_of[v]`` lists the indices of the cliques containing ``v``;
    it is the index the pricing network and the column builder both use.
    """

    mode: str
    cliques: list[tuple[int, ...]]
    member_of: list[list[int]]

    @classmethod
    def from_cliques(
        cls, n: int, mode: str, cliques: Sequence[Sequence[int]]
    ) -> "CliqueFamily":
        member_of: list[list[int]] = [[] for _ in range(n)]
        stored = []
        for i, cl in enumerate(cliques):
            tup = tuple(sorted(cl))
            stored.append(tup)
            for v in tup:
                member_of[v].append(i)
        return cls(mode, stored, member_of)

    def add(self, clique: Sequence[int]) -> int:
        """Append one clique (used by root separation); returns its index."""
        i = len(self.cliques)
        tup = tuple(sorted(clique))
        self.cliques.append(tup)
        for v in tup:
            self.member_of[v].append(i)
        return i

    def touched_by(self, subset: Sequence[int]) -> list[int]:
        """Indices of family cliques meeting the subset."""
        seen: set[int] = set()
        for v in subset:
            seen.update(self.member_of[v])
        return sorted(seen)


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def build_clique_family(g: Graph, mode: str = COVER) -> CliqueFamily:
    """Greedy edge-covering clique family.

    ``cover``: scan edges in input order; every still-uncovered edge seeds
    a clique that is grown maximal by scanning vertices in index order.
    ``partition``: same scan, but a vertex may join only along uncovered
    edges, so every edge ends up in exactly one clique.
    ``edges``: the edge set itself, one 2-clique per edge.

    Vertices no edge reaches (degree zero) get a singleton clique so that
    every vertex is capped by some clique row.  Without the cap, a cluster
    made of such vertices could take unbounded weight and satisfy the
    cluster-count row for free, which breaks the relaxation.
    """
    if mode not in FAMILY_MODES:
        raise ValueError(f"unknown clique family mode {mode!r}")
    isolated = [(v,) for v in range(g.n) if g.degree(v) == 0]
    if mode == EDGES:
        return CliqueFamily.from_cliques(
            g.n, mode, [_edge_key(u, v) for u, v in g.edges] + isolated
        )
    covered: set[tuple[int, int]] = set()
    cliques: list[tuple[int, ...]] = []
    for u, v in g.edges:
        if _edge_key(u, v) in covered:
            continue
        members = {u, v}
        for w in range(g.n):
            if w in members:
                continue
            if mode == COVER:
                ok = all(g.has_edge(w, x) for x in members)
            else:
                ok = all(
                    g.has_edge(w, x) and _edge_key(w, x) not in covered
                    for x in members
                )
            if ok:
                members.add(w)
        clique = tuple(sorted(members))
        cliques.append(clique)
        for i in range(len(clique)):
            for j in range(i + 1, len(clique)):
                covered.add((clique[i], clique[j]))
    return CliqueFamily.from_cliques(g.n, mode, cliques + isolated)


# ---------------------------------------------------------------------------
# the restricted master itself


@dataclass
class Column:
    """One cluster column: its vertices, the cliques it touches, its LP id."""

    subset: tuple[int, ...]
    touched: tuple[int, ...]
    var: int


@dataclass
class DualPrices:
    """Row prices the pricing network is built from.

    ``count_price`` belongs to the cluster-count row, ``cover_price[v]``
    to vertex v's cover row, and ``clique_price[i]`` to family clique i
    (stored with its sign flipped so that it is nonnegative).  With the
    default inequality rows all values are nonnegative; the equality
    variant can legitimately produce negative count/cover prices.
    """

    count_price: float
    cover_price: list[float]
    clique_price: list[float]


class Rmp:
    """Mutable restricted master: LP model plus the column pool.

    One instance per solve; the branch-and-price engine mutates variable
    bounds in place when it moves between tree nodes.
    """

    def __init__(
        self,
        inst: Instance,
        fam: CliqueFamily,
        *,
        equality_rows: bool = False,
        connectivity_cut: str = "auto",
    ):
        g = inst.graph
        self.inst = inst
        self.fam = fam
        self.equality_rows = equality_rows
        self.model = lp.LinearProgram()
        sense = lp.EQUAL if equality_rows else lp.GREATER

        self.count_row = self.model.add_row(sense, float(inst.k), [])
        self.cover_rows = [
            self.model.add_row(sense, 1.0, []) for _ in range(g.n)
        ]
        self.clique_rows = [
            self.model.add_row(lp.LESS, 1.0, []) for _ in fam.cliques
        ]
        self.x_vars = [
            self.model.add_variable(
                g.costs[v], 0.0, lp.INF, [(self.cover_rows[v], 1.0)]
            )
            for v in range(g.n)
        ]

        self.connectivity_row: Optional[int] = None
        self.connectivity_rhs: Optional[float] = None
        if connectivity_cut not in ("auto", "on", "off"):
            raise ValueError(f"bad connectivity_cut {connectivity_cut!r}")
        want_row = connectivity_cut == "on" or (
            connectivity_cut == "auto" and inst.k <= CONNECTIVITY_MAX_K
        )
        if want_row:
            conn = weighted_vertex_connectivity(g)
            if not conn.unbreakable:
                self.connectivity_rhs = conn.cost
                self.connectivity_row = self.model.add_row(
                    lp.GREATER,
                    conn.cost,
                    [(self.x_vars[v], g.costs[v]) for v in range(g.n)],
                )

        # Big-M columns keep every node LP feasible, so that genuine node
        # infeasibility shows up as a positive artificial level instead of
        # a solver failure.  The count row needs one because singleton
        # clusters can all be deactivated by cut-fixings; each cover row
        # needs one because a keep-fixed vertex whose pooled clusters are
        # all deactivated by *other* keep-fixings would otherwise leave no
        # way to satisfy its row (x is bounded to 0 there).  M strictly
        # dominates any real cost, so positive artificials at convergence
        # certify infeasibility.
        self.big_m = 10.0 * g.total_cost() + 1.0
        self.artificials = [
            self.model.add_variable(self.big_m, 0.0, lp.INF, [(self.count_row, 1.0)])
        ]
        self.artificials += [
            self.model.add_variable(
                self.big_m, 0.0, lp.INF, [(self.cover_rows[v], 1.0)]
            )
            for v in range(g.n)
        ]

        self.columns: list[Column] = []
        self._pool: dict[tuple[int, ...], int] = {}
        for v in range(g.n):
            self.add_column((v,))

    # -- column management --------------------------------------------------

    def add_column(self, subset: Sequence[int]) -> bool:
        """Add a cluster column; returns False when it is already pooled."""
        key = tuple(sorted(set(subset)))
        if not key:
            raise ValueError("empty cluster")
        if key in self._pool:
            return False
        touched = self.fam.touched_by(key)
        entries = [(self.count_row, 1.0)]
        entries += [(self.cover_rows[v], 1.0) for v in key]
        entries += [(self.clique_rows[i], 1.0) for i in touched]
        var = self.model.add_variable(0.0, 0.0, lp.INF, entries)
        self._pool[key] = len(self.columns)
        self.columns.append(Column(key, tuple(touched), var))
        return True

    def column_values(self, result: lp.LpResult) -> list[float]:
        return [float(result.x[col.var]) for col in self.columns]

    # -- per-node state -------------------------------------------------------

    def set_vertex_fixed(self, v: int, value: Optional[int]):
        """Pin x_v for the current node: 1, 0, or None to release."""
        if value is None:
            self.model.set_bounds(self.x_vars[v], 0.0, lp.INF)
        elif value == 1:
            self.model.set_bounds(self.x_vars[v], 1.0, 1.0)
        elif value == 0:
            self.model.set_bounds(self.x_vars[v], 0.0, 0.0)
        else:
            raise ValueError(f"bad fixing {value!r}")

    def set_column_active(self, index: int, active: bool):
        var = self.columns[index].var
        self.model.set_bounds(var, 0.0, lp.INF if active else 0.0)

    # -- results ----------------------------------------------------------------

    def extract_duals(self, result: lp.LpResult) -> DualPrices:
        """Row prices for pricing; tiny noise zeroed, signs normalised."""
        if result.status != lp.OPTIMAL:
            raise ValueError(f"duals need an optimal LP, got {result.status}")
        clamp = not self.equality_rows

        def clean(value: float, nonneg: bool) -> float:
            if abs(value) < DUAL_ZERO_TOL:
                return 0.0
            return max(0.0, value) if nonneg else float(value)

        y = result.duals
        return DualPrices(
            count_price=clean(float(y[self.count_row]), clamp),
            cover_price=[
                clean(float(y[r]), clamp) for r in self.cover_rows
            ],
            clique_price=[
                clean(-float(y[r]), True) for r in self.clique_rows
            ],
        )

    def artificial_level(self, result: lp.LpResult) -> float:
        """Largest artificial value; positive at convergence = infeasible."""
        return max(float(result.x[a]) for a in self.artificials)

    # -- row generation ---------------------------------------------------------

    def add_clique_row(self, clique: Sequence[int]) -> int:
        """Install one more clique row, backfilling pooled columns."""
        g = self.inst.graph
        members = sorted(clique)
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if not g.has_edge(members[i], members[j]):
                    raise ValueError("separating set is not a clique")
        index = self.fam.add(members)
        mset = set(members)
        entries = []
        for pos, col in enumerate(self.columns):
            if mset.intersection(col.subset):
                entries.append((col.var, 1.0))
                self.columns[pos] = Column(
                    col.subset, col.touched + (index,), col.var
                )
        row = self.model.add_row(lp.LESS, 1.0, entries)
        self.clique_rows.append(row)
        return row


def init_rmp(
    inst: Instance,
    fam: CliqueFamily,
    *,
    equality_rows: bool = False,
    connectivity_cut: str = "auto",
) -> Rmp:
    return Rmp(
        inst,
        fam,
        equality_rows=equality_rows,
        connectivity_cut=connectivity_cut,
    )


# ---------------------------------------------------------------------------
# root separation of additional clique rows


def _maximal_cliques(g: Graph, limit: int) -> tuple[list[tuple[int, ...]], bool]:
    """All maximal cliques (pivoting search); flag is False when truncated."""
    out: list[tuple[int, ...]] = []
    complete = True

    def expand(r: list[int], p: set[int], x: set[int]) -> bool:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return len(out) < limit
        pivot_pool = p | x
        pivot = max(
            sorted(pivot_pool), key=lambda u: len(g.adj_set[u] & p)
        )
        for v in sorted(p - g.adj_set[pivot]):
            if not expand(r + [v], p & g.adj_set[v], x & g.adj_set[v]):
                return False
            p.remove(v)
            x.add(v)
        return True

    complete = expand([], set(range(g.n)), set())
    return out, complete


def separate_clique_cut(
    g: Graph,
    columns: Sequence[Column],
    values: Sequence[float],
    *,
    max_cliques: int = 200_000,
) -> Optional[list[int]]:
    """Most violated 'one cluster per clique' row, or None.

    Scores every maximal clique by the total weight of the clusters it
    meets.  Because the weights are nonnegative the score only grows when
    a clique is extended, so searching maximal cliques alone is exact.
    Isolated vertices can never appear (their singleton 'cliques' meet at
    most one cluster of weight <= 1).
    """
    active = [
        (frozenset(col.subset), float(val))
        for col, val in zip(columns, values)
        if val > DUAL_ZERO_TOL
    ]
    if not active:
        return None
    cliques, complete = _maximal_cliques(g, max_cliques)
    if not complete:
        log.warning(
            "clique separation stopped after %d maximal cliques; skipping",
            max_cliques,
        )
        return None
    best_score = 0.0
    best: Optional[tuple[int, ...]] = None
    for clique in cliques:
        cset = frozenset(clique)
        score = sum(val for sub, val in active if sub & cset)
        if score > best_score + DUAL_ZERO_TOL or (
            best is not None
            and abs(score - best_score) <= DUAL_ZERO_TOL
            and clique < best
        ):
            best_score = score
            best = clique
    if best is not None and best_score > 1.0 + CLIQUE_VIOLATION_TOL:
        return list(best)
    return None
