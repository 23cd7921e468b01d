"""Root LP-bound laboratory for three formulations of the same problem.

Computes, per instance, the root relaxation value of (a) the column
formulation the solver branches on (any clique family, via the same
master/pricing code the engine uses), (b) the natural vertex-variable
model with its exponential family of forest rows, solved by separation,
and (c) the compact cluster-assignment model.  The known strength
relations between the three are what the test suite checks; this module
only produces the numbers.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

from . import lp
from .graph import Graph
from .instance import Instance
from .master import COVER, build_clique_family, init_rmp
from .pricing import BranchState, price

#: a forest row is added only when violated by more than this
SEPARATION_TOL = 1e-6
#: matches the master's certificate for an infeasible relaxation
ARTIFICIAL_TOL = 1e-7
MAX_SEPARATION_ROUNDS = 10_000


@dataclass
class FormulationBound:
    value: float
    seconds: float
    iterations: int
    columns: Optional[int] = None  # column formulation only
    cuts: Optional[int] = None  # separation loop only
    gap: Optional[float] = None  # 100 (z* - value) / z* when z* is known


@dataclass
class BoundReport:
    instance: str
    n: int
    m: int
    k: int
    bounds: dict[str, FormulationBound] = field(default_factory=dict)


def _with_gap(bound: FormulationBound, optimum: Optional[float]) -> FormulationBound:
    if optimum is not None and optimum > 1e-9 and math.isfinite(bound.value):
        bound.gap = 100.0 * (optimum - bound.value) / optimum
    return bound


def lp_bound_extended(
    inst: Instance,
    family: str = COVER,
    optimum: Optional[float] = None,
) -> FormulationBound:
    """Root value of the column formulation under the given clique family.

    Runs column generation to convergence with the same master and
    pricing code the search tree uses — no connectivity row and no
    branching restrictions, so the value is the plain relaxation.
    Returns ``inf`` when the relaxation itself is infeasible (only the
    big-M columns can carry it), which certifies an infeasible instance.
    """
    start = time.monotonic()
    fam = build_clique_family(inst.graph, family)
    rmp = init_rmp(inst, fam, connectivity_cut="off")
    state = BranchState()
    iterations = 0
    basis = None
    while True:
        res = rmp.model.solve(warm=basis)
        if res.status != lp.OPTIMAL:
            raise ArithmeticError(f"root LP ended with {res.status}")
        iterations += res.iterations
        basis = res.basis
        outcome = price(inst.graph, fam, rmp.extract_duals(res), state)
        added = sum(rmp.add_column(col.subset) for col in outcome.columns)
        if not outcome.columns or added == 0:
            break
    value = math.inf if rmp.artificial_level(res) > ARTIFICIAL_TOL else res.objective
    return _with_gap(
        FormulationBound(
            value,
            time.monotonic() - start,
            iterations,
            columns=len(rmp.columns),
        ),
        optimum,
    )


def max_weight_forest(g: Graph, weights: list[float]) -> list[int]:
    """Greedy maximum-weight forest over positive-weight edges.

    Returns edge indices.  Greedy on edges sorted by decreasing weight is
    exact here because forests form a matroid.  Ties break on the edge's
    endpoints so separation is deterministic.
    """
    order = sorted(
        (i for i in range(len(g.edges)) if weights[i] > 0.0),
        key=lambda i: (-weights[i], g.edges[i]),
    )
    parent = list(range(g.n))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    chosen = []
    for i in order:
        u, v = g.edges[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append(i)
    return chosen


def lp_bound_natural(
    inst: Instance, optimum: Optional[float] = None
) -> FormulationBound:
    """Root value of the vertex-variable model with forest rows.

    Every forest F yields the valid row
    ``sum_v (deg_F(v) - 1) x_v >= k - n + |F|`` (delete enough vertices
    that the surviving forest splits into k pieces).  The most violated
    row for a given x is found exactly by a maximum-weight forest with
    edge weights ``1 - x_u - x_v``; rows are added until none is
    violated.
    """
    start = time.monotonic()
    g, k = inst.graph, inst.k
    model = lp.LinearProgram()
    xcols = [model.add_variable(g.costs[v], 0.0, 1.0) for v in range(g.n)]
    iterations = 0
    cuts = 0
    basis = None
    for _ in range(MAX_SEPARATION_ROUNDS):
        res = model.solve(warm=basis)
        if res.status == lp.INFEASIBLE:
            # accumulated rows can contradict the box bounds outright
            # (small graphs with k close to n); the instance is infeasible
            return _with_gap(
                FormulationBound(
                    math.inf,
                    time.monotonic() - start,
                    iterations + res.iterations,
                    cuts=cuts,
                ),
                optimum,
            )
        if res.status != lp.OPTIMAL:
            raise ArithmeticError(f"bound LP ended with {res.status}")
        iterations += res.iterations
        basis = res.basis
        xv = [float(res.x[c]) for c in xcols]
        weights = [1.0 - xv[u] - xv[v] for u, v in g.edges]
        forest = max_weight_forest(g, weights)
        rhs = k - g.n + len(forest)
        deg = [0] * g.n
        for i in forest:
            u, v = g.edges[i]
            deg[u] += 1
            deg[v] += 1
        lhs = sum((deg[v] - 1) * xv[v] for v in range(g.n))
        if lhs >= rhs - SEPARATION_TOL:
            break
        model.add_row(
            lp.GREATER,
            float(rhs),
            [(xcols[v], float(deg[v] - 1)) for v in range(g.n) if deg[v] != 1],
        )
        cuts += 1
    return _with_gap(
        FormulationBound(
            res.objective, time.monotonic() - start, iterations, cuts=cuts
        ),
        optimum,
    )


def lp_bound_compact(
    inst: Instance, optimum: Optional[float] = None
) -> FormulationBound:
    """Root value of the compact cluster-assignment model.

    Variables y[i][v] assign vertex v to one of k clusters; the model
    maximizes the assigned weight, so the deletion bound is the total
    cost minus the LP value.  Adjacent vertices may not sit in distinct
    clusters, each vertex takes at most one cluster, and no cluster may
    be empty.
    """
    start = time.monotonic()
    g, k = inst.graph, inst.k
    model = lp.LinearProgram()
    # minimize -(assigned weight); bound = total cost + min value
    y = [
        [model.add_variable(-g.costs[v], 0.0, 1.0) for v in range(g.n)]
        for _ in range(k)
    ]
    for v in range(g.n):
        model.add_row(lp.LESS, 1.0, [(y[i][v], 1.0) for i in range(k)])
    for u, v in g.edges:
        for i in range(k):
            for a, b in ((u, v), (v, u)):
                entries = [(y[i][a], 1.0)]
                entries += [(y[j][b], 1.0) for j in range(k) if j != i]
                model.add_row(lp.LESS, 1.0, entries)
    for i in range(k):
        model.add_row(lp.GREATER, 1.0, [(y[i][v], 1.0) for v in range(g.n)])
    res = model.solve()
    if res.status == lp.INFEASIBLE:
        value = math.inf
        iterations = res.iterations
    elif res.status == lp.OPTIMAL:
        value = g.total_cost() + res.objective
        iterations = res.iterations
    else:
        raise ArithmeticError(f"assignment LP ended with {res.status}")
    return _with_gap(
        FormulationBound(value, time.monotonic() - start, iterations), optimum
    )


def bound_report(
    inst: Instance,
    families: tuple[str, ...] = ("cover", "partition", "edges"),
    optimum: Optional[float] = None,
) -> BoundReport:
    """All formulation bounds for one instance, keyed by formulation name."""
    report = BoundReport(inst.name, inst.graph.n, inst.graph.m, inst.k)
    for family in families:
        report.bounds[f"extended-{family}"] = lp_bound_extended(
            inst, family, optimum
        )
    report.bounds["natural"] = lp_bound_natural(inst, optimum)
    report.bounds["compact"] = lp_bound_compact(inst, optimum)
    return report
