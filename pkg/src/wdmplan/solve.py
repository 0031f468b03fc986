"""Solvers for the two-layer design model.

Three layers of machinery:

* `check_feasibility` verifies a full variable assignment row by row.
* `solve_exact` runs depth-first branch-and-bound over the circuit counts
  y_(path, speed). Fibers and node modules are not branched: for fixed
  circuit counts the cheapest fiber counts are forced (channels per link,
  rounded up to whole fibers) and the cheapest sufficient modules follow per
  node, so only circuits span the search tree. Routability of the demands
  for a candidate capacity vector is decided by an exact phase-1 simplex
  over the virtual layer (rational arithmetic, Bland's rule), memoized per
  capacity vector. The bounding function adds the cost of everything already
  forced (circuits, fibers, modules) to a completion term: every Gbps of
  demand still lacking virtual capacity costs at least the cheapest circuit
  cost per Gbps.
* `solve_heuristic` builds a solution demand by demand (largest first) on a
  grooming graph: routing over existing spare circuit capacity is free,
  opening new circuits pays circuit + fiber + module marginal cost. A local
  search then prunes idle circuits, swaps circuits to cheaper physical
  paths, re-optimizes the per-pair speed mix, and re-routes whole demands.
  All tie-breaks are ordered; the seed only shuffles equal-value demands.

Everything is exact `Fraction` arithmetic; no external solver is involved.
"""

from __future__ import annotations

import heapq
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Iterable

from .costcat import LambdaType, PhysicalNodeModule, VirtualNodeModule
from .milp import BINARY, CONTINUOUS, INTEGER, Model, ModelError, Solution
from .netmodel import Instance, node_demand
from .pathgen import PathCatalog, PhysPath

CONTINUOUS_TOLERANCE = Fraction(1, 10**6)

OPTIMAL = "optimal"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNKNOWN = "unknown"


@dataclass
class Limits:
    """Resource guards; exceeding max_nodes yields status `unknown`."""

    max_nodes: int = 10_000_000
    improve_rounds: int = 8


@dataclass
class SolveReport:
    status: str
    solution: Solution | None
    bound: Fraction
    nodes_explored: int = 0
    iterations: int = 0
    wall_time_s: float = 0.0


def check_feasibility(model: Model, solution: Solution | dict) -> list[str]:
    """All constraint/bound/integrality violations of a full assignment.

    Rows containing continuous variables are checked with absolute tolerance
    1e-6; pure-integer rows are checked exactly.
    """
    values = solution.values if isinstance(solution, Solution) else solution
    violations = []
    for name, var in model.variables.items():
        if name not in values:
            violations.append(f"{name}: no value")
            continue
        v = values[name]
        if var.integrality == CONTINUOUS:
            if v < -CONTINUOUS_TOLERANCE:
                violations.append(f"{name}: negative value {float(v)}")
        else:
            if v != int(v) or v < 0:
                violations.append(f"{name}: not a non-negative integer: {v}")
            elif var.integrality == BINARY and v > 1:
                violations.append(f"{name}: binary variable set to {v}")
    if violations:
        return violations
    for c in model.constraints:
        lhs = Fraction(0)
        has_continuous = False
        for var, coef in c.coeffs.items():
            lhs += coef * values[var]
            if model.variables[var].integrality == CONTINUOUS:
                has_continuous = True
        tol = CONTINUOUS_TOLERANCE if has_continuous else Fraction(0)
        bad = ((c.sense == "<=" and lhs > c.rhs + tol)
               or (c.sense == ">=" and lhs < c.rhs - tol)
               or (c.sense == "=" and abs(lhs - c.rhs) > tol))
        if bad:
            violations.append(
                f"{c.name} ({c.kind}): {float(lhs)} {c.sense} {float(c.rhs)} violated")
    return violations


# --------------------------------------------------------------------------
# exact phase-1 simplex for virtual-layer routability


def _phase1_simplex(n_vars: int, eq_rows: list, ub_rows: list) -> dict[int, Fraction] | None:
    """Feasible point of {x >= 0, eq rows hold, ub rows hold} or None.

    Rows are (coeffs: dict col->Fraction, rhs). Dense tableau, Bland's rule,
    exact rationals. Sized for the virtual layer of desk-scale instances.
    """
    slacks = len(ub_rows)
    n_total = n_vars + slacks
    rows = []
    for coeffs, rhs in eq_rows:
        row = [Fraction(0)] * n_total
        for col, coef in coeffs.items():
            row[col] = coef
        rows.append((row, rhs))
    for k, (coeffs, rhs) in enumerate(ub_rows):
        row = [Fraction(0)] * n_total
        for col, coef in coeffs.items():
            row[col] = coef
        row[n_vars + k] = Fraction(1)
        rows.append((row, rhs))

    m = len(rows)
    width = n_total + m + 1
    tab = []
    basis = []
    for r, (row, rhs) in enumerate(rows):
        if rhs < 0:
            row = [-a for a in row]
            rhs = -rhs
        full = row + [Fraction(0)] * m + [rhs]
        full[n_total + r] = Fraction(1)
        tab.append(full)
        basis.append(n_total + r)
    # objective: minimize the sum of artificials; keep its reduced-cost row
    z = [Fraction(0)] * width
    for row in tab:
        for j in range(width):
            z[j] -= row[j]
    for r in range(m):
        z[n_total + r] = Fraction(0)

    while True:
        enter = -1
        for j in range(n_total):  # Bland: smallest improving index
            if z[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = None
        for r in range(m):
            a = tab[r][enter]
            if a > 0:
                ratio = tab[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave < 0:
            return None  # phase-1 is bounded; defensive only
        piv = tab[leave][enter]
        tab[leave] = [a / piv for a in tab[leave]]
        for r in range(m):
            if r != leave and tab[r][enter]:
                f = tab[r][enter]
                tab[r] = [a - f * b for a, b in zip(tab[r], tab[leave])]
        if z[enter]:
            f = z[enter]
            z = [a - f * b for a, b in zip(z, tab[leave])]
        basis[leave] = enter

    if -z[-1] != 0:  # artificial mass left: infeasible
        return None
    values: dict[int, Fraction] = {}
    for r, b in enumerate(basis):
        if b < n_vars:
            values[b] = tab[r][-1]
    return values


def route_flows(model: Model, pair_capacity: dict) -> dict[str, Fraction] | None:
    """Feasible virtual flows under per-pair capacities, or None.

    Returns {flow variable name: value} for the model's commodities. Cheap
    necessary conditions (total capacity, per-node incident capacity) run
    before the simplex.
    """
    if not model.commodities:
        return {}
    instance = model.instance
    pops = sorted(instance.pops)
    total = instance.total_demand()
    if sum(pair_capacity.values(), Fraction(0)) < total:
        return None
    d_i = node_demand(instance)
    for i in pops:
        incident = sum((cap for pair, cap in pair_capacity.items() if i in pair),
                       Fraction(0))
        if incident < d_i[i]:
            return None

    col = {}
    n = 0
    for key, _origin, _sinks in model.commodities:
        for i in pops:
            for j in pops:
                if i != j:
                    col[(key, i, j)] = n
                    n += 1
    eq_rows = []
    for key, origin, sinks in model.commodities:
        supply = sum(sinks.values())
        for i in pops:
            coeffs = {}
            for j in pops:
                if j == i:
                    continue
                coeffs[col[(key, i, j)]] = Fraction(1)
                coeffs[col[(key, j, i)]] = Fraction(-1)
            rhs = Fraction(supply) if i == origin else Fraction(-sinks.get(i, 0))
            eq_rows.append((coeffs, rhs))
    ub_rows = []
    for (i, j), cap in sorted(pair_capacity.items()):
        coeffs = {}
        for key, _origin, _sinks in model.commodities:
            coeffs[col[(key, i, j)]] = Fraction(1)
            coeffs[col[(key, j, i)]] = Fraction(1)
        ub_rows.append((coeffs, cap))

    point = _phase1_simplex(n, eq_rows, ub_rows)
    if point is None:
        return None
    flows = {}
    for key, _origin, _sinks in model.commodities:
        arc = {(i, j): point.get(col[(key, i, j)], Fraction(0))
               for i in pops for j in pops if i != j}
        _cancel_cycles(arc)
        for (i, j), v in arc.items():
            flows[model.flow_vars[(key, i, j)]] = v
    return flows


def _cancel_cycles(arc: dict) -> None:
    """Strip circulation from one commodity's flow, in place.

    Basic feasible points of the phase-1 program may carry flow around
    cycles (including i->j->i back-and-forth); conservation and pair
    capacities survive the cancellation, and the remaining flow decomposes
    into origin-to-sink paths only, which keeps transit metrics meaningful.
    """
    for (i, j), v in list(arc.items()):
        if i < j and v and arc[(j, i)]:
            back = min(v, arc[(j, i)])
            arc[(i, j)] -= back
            arc[(j, i)] -= back
    while True:
        succ = {}
        for (i, j), v in arc.items():
            if v:
                succ.setdefault(i, []).append(j)
        cycle = _find_cycle(succ)
        if cycle is None:
            return
        slack = min(arc[(cycle[k], cycle[k + 1])] for k in range(len(cycle) - 1))
        for k in range(len(cycle) - 1):
            arc[(cycle[k], cycle[k + 1])] -= slack


def _find_cycle(succ: dict) -> list | None:
    """Any directed cycle as a node list [v0, ..., v0], or None."""
    colors = {}
    for start in succ:
        if colors.get(start):
            continue
        stack = [(start, iter(succ.get(start, ())))]
        colors[start] = "active"
        path = [start]
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if colors.get(nxt) == "active":
                    return path[path.index(nxt):] + [nxt]
                if colors.get(nxt) is None:
                    colors[nxt] = "active"
                    path.append(nxt)
                    stack.append((nxt, iter(succ.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                colors[node] = "done"
                path.pop()
                stack.pop()
    return None


# --------------------------------------------------------------------------
# module selection


def cheapest_virtual_module(modules: Iterable[VirtualNodeModule], capacity,
                            slot_units: int) -> VirtualNodeModule | None:
    """Cheapest router covering a switching capacity and slot-unit load."""
    best = None
    for vm in modules:
        if (vm.switching_capacity >= capacity
                and vm.slot_capacity * LambdaType.SLOT_UNITS >= slot_units
                and (best is None or vm.cost < best.cost)):
            best = vm
    return best


def cheapest_physical_module(modules: Iterable[PhysicalNodeModule], fibers: int,
                             drops: int) -> PhysicalNodeModule | None:
    """Cheapest optical node covering a fiber count and add-drop load."""
    best = None
    for pm in modules:
        if (pm.fiber_capacity >= fibers and pm.add_drop_ports >= drops
                and (best is None or pm.cost < best.cost)):
            best = pm
    return best


# --------------------------------------------------------------------------
# design state: circuit placement with incrementally tracked derived costs


class DesignState:
    """Mutable circuit placement.

    Fiber counts and node modules are derived, not chosen: fibers are the
    channel count rounded up, modules the cheapest sufficient catalog entry.
    Their costs are maintained incrementally so branch-and-bound can bound in
    O(path length) per step. `broken` holds nodes whose requirement exceeds
    every catalog module; requirements grow monotonically with circuits, so
    a broken node proves the whole subtree infeasible.
    """

    def __init__(self, model: Model):
        self.model = model
        self.instance = model.instance
        self.catalog = model.catalog
        self.cc = model.cost_catalog
        self.lt = {lt.speed: lt for lt in self.cc.lambda_types}
        self.y: dict[tuple[int, int], int] = {}        # (path id, speed) -> count
        self.channels: dict[str, int] = {}             # edge id -> circuits
        self.pair_capacity: dict[tuple, Fraction] = {
            pair: Fraction(0) for pair in self.catalog.pair_paths}
        self.node_switch: dict[str, Fraction] = {}     # PoP -> terminating A' load
        self.node_slot_units: dict[str, int] = {}      # PoP -> slot units
        self.node_drops: dict[str, int] = {}           # node -> terminations
        self.circuit_cost = Fraction(0)
        self.fiber_cost = Fraction(0)
        self.vmod: dict[str, tuple] = {}               # PoP -> (cost, module idx)
        self.pmod: dict[str, tuple] = {}               # node -> (cost, module idx)
        self.vmod_total = Fraction(0)
        self.pmod_total = Fraction(0)
        self.broken: set[str] = set()
        self._vmemo: dict[tuple, tuple | None] = {}
        self._pmemo: dict[tuple, tuple | None] = {}
        self._d_i = node_demand(self.instance)
        for i in self.instance.pops:
            self._update_vmod(i)

    def clone(self) -> "DesignState":
        c = DesignState.__new__(DesignState)
        c.model, c.instance, c.catalog, c.cc, c.lt = \
            self.model, self.instance, self.catalog, self.cc, self.lt
        c.y = dict(self.y)
        c.channels = dict(self.channels)
        c.pair_capacity = dict(self.pair_capacity)
        c.node_switch = dict(self.node_switch)
        c.node_slot_units = dict(self.node_slot_units)
        c.node_drops = dict(self.node_drops)
        c.circuit_cost = self.circuit_cost
        c.fiber_cost = self.fiber_cost
        c.vmod = dict(self.vmod)
        c.pmod = dict(self.pmod)
        c.vmod_total = self.vmod_total
        c.pmod_total = self.pmod_total
        c.broken = set(self.broken)
        c._vmemo = self._vmemo  # memoization is shared, content is state-free
        c._pmemo = self._pmemo
        c._d_i = self._d_i
        return c

    # module requirement lookups, memoized on the requirement itself

    def _vmod_for(self, capacity: Fraction, units: int) -> tuple | None:
        key = (capacity, units)
        if key not in self._vmemo:
            best = None
            for midx, vm in enumerate(self.cc.virtual_modules):
                if (vm.switching_capacity >= capacity
                        and vm.slot_capacity * LambdaType.SLOT_UNITS >= units
                        and (best is None or vm.cost < best[0])):
                    best = (vm.cost, midx)
            self._vmemo[key] = best
        return self._vmemo[key]

    def _pmod_for(self, fibers: int, drops: int) -> tuple | None:
        key = (fibers, drops)
        if key not in self._pmemo:
            best = None
            for midx, pm in enumerate(self.cc.physical_modules):
                if (pm.fiber_capacity >= fibers and pm.add_drop_ports >= drops
                        and (best is None or pm.cost < best[0])):
                    best = (pm.cost, midx)
            self._pmemo[key] = best
        return self._pmemo[key]

    def _update_vmod(self, node: str) -> None:
        cap = self._d_i[node] + self.node_switch.get(node, Fraction(0))
        units = self.node_slot_units.get(node, 0)
        old = self.vmod.get(node)
        if not cap and not units:
            new = None
            self.broken.discard(node)
        else:
            new = self._vmod_for(cap, units)
            if new is None:
                self.broken.add(node)
            else:
                self.broken.discard(node)
        self.vmod_total += (new[0] if new else Fraction(0)) - (old[0] if old else Fraction(0))
        if new is None:
            self.vmod.pop(node, None)
        else:
            self.vmod[node] = new

    def _update_pmod(self, node: str) -> None:
        fibers = self.node_fibers(node)
        drops = self.node_drops.get(node, 0)
        old = self.pmod.get(node)
        if not fibers and not drops:
            new = None
            self.broken.discard("o:" + node)
        else:
            new = self._pmod_for(fibers, drops)
            if new is None:
                self.broken.add("o:" + node)
            else:
                self.broken.discard("o:" + node)
        self.pmod_total += (new[0] if new else Fraction(0)) - (old[0] if old else Fraction(0))
        if new is None:
            self.pmod.pop(node, None)
        else:
            self.pmod[node] = new

    def fibers(self, edge_id: str) -> int:
        ch = self.channels.get(edge_id, 0)
        return ceil(ch / self.instance.channels_per_fiber) if ch else 0

    def node_fibers(self, node: str) -> int:
        return sum(self.fibers(e.id) for e in self.instance.graph.incident(node))

    def add_circuits(self, pid: int, speed: int, count: int) -> None:
        """Add (or with negative `count`, remove) circuits on a path."""
        if count == 0:
            return
        p = self.catalog.paths[pid]
        lt = self.lt[speed]
        new_y = self.y.get((pid, speed), 0) + count
        if new_y < 0:
            raise ValueError("negative circuit count")
        if new_y:
            self.y[(pid, speed)] = new_y
        else:
            self.y.pop((pid, speed), None)
        self.circuit_cost += lt.cost * count
        touched_pmod = set(p.ends)
        for eid in p.edges:
            old_f = self.fibers(eid)
            self.channels[eid] = self.channels.get(eid, 0) + count
            if not self.channels[eid]:
                del self.channels[eid]
            new_f = self.fibers(eid)
            if new_f != old_f:
                self.fiber_cost += self.cc.fiber_cost[eid] * (new_f - old_f)
                e = self.instance.graph.edge(eid)
                touched_pmod.add(e.u)
                touched_pmod.add(e.v)
        pair = tuple(sorted(p.ends))
        self.pair_capacity[pair] += lt.routing_capacity * count
        for n in p.ends:
            self.node_switch[n] = self.node_switch.get(n, Fraction(0)) \
                + lt.switching_capacity * count
            self.node_slot_units[n] = self.node_slot_units.get(n, 0) + lt.slot_units * count
            self.node_drops[n] = self.node_drops.get(n, 0) + count
            self._update_vmod(n)
        for n in touched_pmod:
            self._update_pmod(n)

    def total_cost(self) -> Fraction | None:
        """Circuit + fiber + module cost; None while any node is broken."""
        if self.broken:
            return None
        total = self.circuit_cost + self.fiber_cost + self.pmod_total
        if not self.model.transparent:
            total += self.vmod_total
        return total

    def lower_bound(self, remaining_demand: Fraction, min_cost_per_gbps: Fraction) -> Fraction:
        lb = self.circuit_cost + self.fiber_cost + self.pmod_total
        if not self.model.transparent:
            lb += self.vmod_total
        if remaining_demand > 0:
            lb += remaining_demand * min_cost_per_gbps
        return lb

    def to_solution(self, flow_values: dict[str, Fraction] | None = None) -> Solution | None:
        """Assemble full variable values; None if modules do not fit."""
        if self.broken:
            return None
        m = self.model
        values = {name: Fraction(0) for name in m.variables}
        for (pid, speed), count in self.y.items():
            values[m.path_vars[(pid, speed)]] = Fraction(count)
        for e in self.instance.graph.edges:
            values[m.fiber_vars[e.id]] = Fraction(self.fibers(e.id))
        for node, (_cost, midx) in self.vmod.items():
            values[m.vmod_vars[(node, midx)]] = Fraction(1)
        for node, (_cost, midx) in self.pmod.items():
            values[m.pmod_vars[(node, midx)]] = Fraction(1)
        if flow_values:
            values.update(flow_values)
        return Solution(values)


# --------------------------------------------------------------------------
# exact branch-and-bound


def solve_exact(model: Model, limits: Limits | None = None) -> SolveReport:
    """Optimal solution by depth-first search over circuit counts.

    The per-variable ranges provably contain an optimum: a virtual link
    never needs more capacity than the total demand plus one circuit (any
    solution richer than that stays feasible after dropping a circuit, at
    lower cost), and in the transparent variant each pair needs exactly its
    own demand covered. Exhausting the search proves optimality or
    infeasibility; hitting the node limit returns `unknown` with the
    incumbent and a trivial bound.
    """
    limits = limits or Limits()
    t0 = time.perf_counter()
    inst = model.instance
    cat = model.catalog
    cc = model.cost_catalog
    total = inst.total_demand()

    if total == 0:
        sol = model.zero_solution()
        sol.objective = Fraction(0)
        return SolveReport(OPTIMAL, sol, Fraction(0), nodes_explored=1,
                           wall_time_s=time.perf_counter() - t0)

    if capacity_infeasible(model) is not None:
        return SolveReport(INFEASIBLE, None, trivial_bound(model),
                           wall_time_s=time.perf_counter() - t0)

    demand_by_pair = {d.pair: d.value for d in inst.demands}
    # branch order: pairs in catalog order, paths within pair, speeds ascending
    branch: list[tuple[tuple, int, int, int]] = []  # (pair, path id, speed, ub)
    for pair, plist in cat.pair_paths.items():
        for p in plist:
            pid = cat.index(p)
            for lt in cc.lambda_types:
                if model.transparent:
                    ub = ceil(Fraction(demand_by_pair.get(pair, 0)) / lt.routing_capacity)
                else:
                    ub = ceil(Fraction(total) / lt.routing_capacity)
                if ub:
                    branch.append((pair, pid, lt.speed, ub))

    min_cost_per_gbps = min(lt.cost / lt.routing_capacity for lt in cc.lambda_types)

    incumbent: Solution | None = None
    incumbent_cost: Fraction | None = None
    seeded = solve_heuristic(model, seed=0,
                             limits=Limits(improve_rounds=limits.improve_rounds))
    if seeded.solution is not None:
        incumbent, incumbent_cost = seeded.solution, seeded.solution.objective

    flow_cache: dict[tuple, dict | None] = {}
    pair_order = sorted(cat.pair_paths)
    state = DesignState(model)
    nodes = 0
    limit_hit = False

    last_var_of_pair = {pair: idx for idx, (pair, _, _, _) in enumerate(branch)}

    def leaf(st: DesignState) -> tuple[Fraction, Solution] | None:
        cost = st.total_cost()
        if cost is None:
            return None
        if model.transparent:
            flows = {}
        else:
            capkey = tuple(st.pair_capacity[pair] for pair in pair_order)
            if capkey not in flow_cache:
                flow_cache[capkey] = route_flows(model, st.pair_capacity)
            flows = flow_cache[capkey]
            if flows is None:
                return None
        sol = st.to_solution(flows)
        if sol is None:
            return None
        sol.objective = cost
        return cost, sol

    def dfs(idx: int) -> None:
        nonlocal incumbent, incumbent_cost, nodes, limit_hit
        if limit_hit:
            return
        if idx == len(branch):
            res = leaf(state)
            if res is not None:
                cost, sol = res
                if incumbent_cost is None or cost < incumbent_cost:
                    incumbent, incumbent_cost = sol, cost
            return
        pair, pid, speed, ub = branch[idx]
        cap_a = state.lt[speed].routing_capacity
        for value in range(0, ub + 1):
            nodes += 1
            if nodes > limits.max_nodes:
                limit_hit = True
                return
            if value:
                state.add_circuits(pid, speed, value)
            prune_rest = False
            descend = True
            if state.broken:
                # requirements only grow with value: the rest is broken too
                descend = False
                prune_rest = value > 0
            elif value and not model.transparent \
                    and state.pair_capacity[pair] - cap_a >= total:
                # dominated: dropping one circuit keeps every flow feasible
                descend = False
                prune_rest = True
            if descend and model.transparent and idx == last_var_of_pair[pair] \
                    and state.pair_capacity[pair] < demand_by_pair.get(pair, 0):
                descend = False  # later values may still fix this pair
            if descend:
                if model.transparent:
                    remaining = sum(
                        (max(Fraction(0), Fraction(dv) - state.pair_capacity[pr])
                         for pr, dv in demand_by_pair.items()), Fraction(0))
                else:
                    assigned = sum(state.pair_capacity.values(), Fraction(0))
                    remaining = Fraction(total) - assigned
                lb = state.lower_bound(remaining, min_cost_per_gbps)
                if incumbent_cost is not None and lb >= incumbent_cost:
                    descend = False
                    prune_rest = True  # the bound is monotone in value
            if descend:
                dfs(idx + 1)
            if value:
                state.add_circuits(pid, speed, -value)
            if limit_hit or prune_rest:
                return

    dfs(0)
    wall = time.perf_counter() - t0

    if limit_hit:
        return SolveReport(UNKNOWN, incumbent, Fraction(0), nodes_explored=nodes,
                           wall_time_s=wall)
    if incumbent is None:
        return SolveReport(INFEASIBLE, None, Fraction(0), nodes_explored=nodes,
                           wall_time_s=wall)
    return SolveReport(OPTIMAL, incumbent, incumbent_cost, nodes_explored=nodes,
                       wall_time_s=wall)


# --------------------------------------------------------------------------
# constructive heuristic with local search


def _mix_options(demand: Fraction, lambda_types: list[LambdaType]) -> list[dict[int, int]]:
    """Candidate circuit-count mixes covering `demand` Gbps."""
    options = []
    for lt in lambda_types:
        options.append({lt.speed: ceil(demand / lt.routing_capacity)})
    if len(lambda_types) == 2:
        lo, hi = lambda_types[0], lambda_types[-1]
        full = int(demand // hi.routing_capacity)
        for n_hi in range(full + 1):
            rest = demand - n_hi * hi.routing_capacity
            opt = {hi.speed: n_hi, lo.speed: ceil(max(rest, Fraction(0)) / lo.routing_capacity)}
            if opt not in options:
                options.append(opt)
    return options


class _Heuristic:
    def __init__(self, model: Model, seed: int, limits: Limits):
        self.model = model
        self.inst = model.instance
        self.cat = model.catalog
        self.cc = model.cost_catalog
        self.limits = limits
        self.rng = random.Random(seed)
        self.state = DesignState(model)
        self.pair_flow: dict[tuple, Fraction] = {
            pair: Fraction(0) for pair in self.cat.pair_paths}
        self.routes: dict[int, list[str]] = {}  # demand index -> PoP sequence
        self.demand_order: list[int] = []
        self.moves = 0
        # commodity key lookup for assembling flow variable values
        self.key_by_origin: dict[str, str] = {}
        self.key_by_pair: dict[tuple, str] = {}
        for key, origin, sinks in model.commodities:
            self.key_by_origin[origin] = key
            for sink in sinks:
                self.key_by_pair[(origin, sink)] = key

    # ---- marginal costs --------------------------------------------------

    def place_cost(self, path: PhysPath, mix: dict[int, int]) -> Fraction | None:
        """Marginal cost of adding a circuit mix on a physical path."""
        count = sum(mix.values())
        if count == 0:
            return Fraction(0)
        st = self.state
        cost = Fraction(0)
        for speed, n in mix.items():
            cost += st.lt[speed].cost * n
        fiber_delta: dict[str, int] = {}
        for eid in path.edges:
            old = st.fibers(eid)
            new = ceil((st.channels.get(eid, 0) + count) / self.inst.channels_per_fiber)
            if new != old:
                cost += self.cc.fiber_cost[eid] * (new - old)
                fiber_delta[eid] = new - old
        sw = sum(st.lt[s].switching_capacity * n for s, n in mix.items())
        units = sum(st.lt[s].slot_units * n for s, n in mix.items())
        for node in path.ends:
            cap = st._d_i[node] + st.node_switch.get(node, Fraction(0))
            u = st.node_slot_units.get(node, 0)
            after = st._vmod_for(cap + sw, u + units)
            if after is None:
                return None
            if not self.model.transparent:
                before = st.vmod.get(node)
                cost += after[0] - (before[0] if before else Fraction(0))
        for node in path.nodes:
            extra_f = 0
            for eid, delta in fiber_delta.items():
                e = self.inst.graph.edge(eid)
                if node in (e.u, e.v):
                    extra_f += delta
            extra_d = count if node in path.ends else 0
            if not extra_f and not extra_d:
                continue
            after = st._pmod_for(st.node_fibers(node) + extra_f,
                                 st.node_drops.get(node, 0) + extra_d)
            if after is None:
                return None
            before = st.pmod.get(node)
            cost += after[0] - (before[0] if before else Fraction(0))
        return cost

    def best_placement(self, pair: tuple, need: Fraction):
        """Cheapest (path, mix) providing >= `need` extra Gbps on a pair."""
        plist = self.cat.pair_paths.get(pair, ())
        best = None
        for p in plist:
            for mix in _mix_options(need, list(self.cc.lambda_types)):
                c = self.place_cost(p, mix)
                if c is None:
                    continue
                key = (c, p.length_km, self.cat.index(p))
                if best is None or key < best[0]:
                    best = (key, p, mix)
        if best is None:
            return None
        return best[0][0], best[1], best[2]

    # ---- construct ---------------------------------------------------------

    def hop_cost(self, i: str, j: str, amount: Fraction) -> Fraction | None:
        pair = (i, j) if i < j else (j, i)
        spare = self.state.pair_capacity[pair] - self.pair_flow[pair]
        need = amount - spare
        if need <= 0:
            return Fraction(0)
        placed = self.best_placement(pair, need)
        return None if placed is None else placed[0]

    def route_demand(self, u: str, v: str, amount: Fraction) -> list[str] | None:
        """Cheapest virtual route by best-first search on marginal hop costs."""
        pops = sorted(self.inst.pops)
        heap = [(Fraction(0), 0, (u,))]
        done = set()
        while heap:
            cost, hops, seq = heapq.heappop(heap)
            at = seq[-1]
            if at == v:
                return list(seq)
            if at in done:
                continue
            done.add(at)
            for w in pops:
                if w in seq or w in done:
                    continue
                hc = self.hop_cost(at, w, amount)
                if hc is None:
                    continue
                heapq.heappush(heap, (cost + hc, hops + 1, seq + (w,)))
        return None

    def apply_route(self, seq: list[str], amount: Fraction) -> bool:
        for i, j in zip(seq, seq[1:]):
            pair = (i, j) if i < j else (j, i)
            spare = self.state.pair_capacity[pair] - self.pair_flow[pair]
            need = amount - spare
            if need > 0:
                placed = self.best_placement(pair, need)
                if placed is None:
                    return False
                _, path, mix = placed
                for speed, n in mix.items():
                    if n:
                        self.state.add_circuits(self.cat.index(path), speed, n)
            self.pair_flow[pair] += amount
        return True

    def unroute(self, seq: list[str], amount: Fraction) -> None:
        for i, j in zip(seq, seq[1:]):
            pair = (i, j) if i < j else (j, i)
            self.pair_flow[pair] -= amount

    def construct(self) -> bool:
        groups: dict[int, list] = {}
        for idx, d in enumerate(self.inst.demands):
            groups.setdefault(d.value, []).append((idx, d))
        order = []
        for value in sorted(groups, reverse=True):
            block = groups[value]
            self.rng.shuffle(block)  # seed affects only equal-value ordering
            order.extend(block)
        for idx, d in order:
            seq = self.route_demand(d.u, d.v, Fraction(d.value))
            if seq is None or not self.apply_route(seq, Fraction(d.value)):
                return False
            self.routes[idx] = seq
            self.demand_order.append(idx)
        return True

    # ---- improve -----------------------------------------------------------

    def prune_idle(self) -> bool:
        """Drop circuits whose capacity is not needed by the pair flow."""
        improved = False
        for (pid, speed) in sorted(self.state.y):
            p = self.cat.paths[pid]
            pair = tuple(sorted(p.ends))
            lt = self.state.lt[speed]
            while self.state.y.get((pid, speed), 0) > 0 and \
                    self.state.pair_capacity[pair] - lt.routing_capacity >= self.pair_flow[pair]:
                self.state.add_circuits(pid, speed, -1)
                improved = True
                self.moves += 1
        return improved

    def swap_paths(self) -> bool:
        """Move all circuits of one (path, speed) to a cheaper parallel path."""
        improved = False
        for (pid, speed) in sorted(self.state.y):
            count = self.state.y.get((pid, speed), 0)
            if not count:
                continue
            p = self.cat.paths[pid]
            pair = tuple(sorted(p.ends))
            before = self.state.total_cost()
            if before is None:
                continue
            for q in self.cat.pair_paths[pair]:
                qid = self.cat.index(q)
                if qid == pid:
                    continue
                self.state.add_circuits(pid, speed, -count)
                self.state.add_circuits(qid, speed, count)
                after = self.state.total_cost()
                if after is not None and after < before:
                    improved = True
                    self.moves += 1
                    before = after
                    pid = qid
                    p = q
                else:
                    self.state.add_circuits(qid, speed, -count)
                    self.state.add_circuits(pid, speed, count)
        return improved

    def remix_pairs(self) -> bool:
        """Re-optimize the circuit mix of one pair from scratch."""
        improved = False
        for pair in sorted(self.cat.pair_paths):
            flow = self.pair_flow[pair]
            placed = [(pid, speed) for (pid, speed) in sorted(self.state.y)
                      if tuple(sorted(self.cat.paths[pid].ends)) == pair]
            if not placed or flow == 0:
                continue
            before = self.state.total_cost()
            if before is None:
                continue
            saved = self.state.clone()
            for (pid, speed) in placed:
                self.state.add_circuits(pid, speed, -self.state.y[(pid, speed)])
            repl = self.best_placement(pair, flow)
            if repl is not None:
                _, path, mix = repl
                for speed, n in mix.items():
                    if n:
                        self.state.add_circuits(self.cat.index(path), speed, n)
                after = self.state.total_cost()
                if after is not None and after < before:
                    improved = True
                    self.moves += 1
                    continue
            self.state = saved
        return improved

    def reroute_demands(self) -> bool:
        """Take a demand out, prune idle circuits, re-route; keep if cheaper."""
        improved = False
        for idx in list(self.demand_order):
            d = self.inst.demands[idx]
            amount = Fraction(d.value)
            before = self.state.total_cost()
            if before is None:
                continue
            saved_state = self.state.clone()
            saved_flow = dict(self.pair_flow)
            saved_route = self.routes[idx]
            self.unroute(saved_route, amount)
            self.prune_idle()
            seq = self.route_demand(d.u, d.v, amount)
            ok = seq is not None and self.apply_route(seq, amount)
            after = self.state.total_cost() if ok else None
            if ok and after is not None and after < before:
                self.routes[idx] = seq
                improved = True
                self.moves += 1
            else:
                self.state = saved_state
                self.pair_flow = saved_flow
                self.routes[idx] = saved_route
        return improved

    def improve(self) -> None:
        for _ in range(self.limits.improve_rounds):
            changed = False
            changed |= self.prune_idle()
            changed |= self.swap_paths()
            changed |= self.remix_pairs()
            changed |= self.reroute_demands()
            if not changed:
                break

    # ---- final assembly ------------------------------------------------------

    def flow_values(self) -> dict[str, Fraction]:
        flows: dict[str, Fraction] = {}
        for idx, seq in self.routes.items():
            d = self.inst.demands[idx]
            key = self.key_by_pair.get((d.u, d.v), self.key_by_origin.get(d.u))
            for i, j in zip(seq, seq[1:]):
                name = self.model.flow_vars[(key, i, j)]
                flows[name] = flows.get(name, Fraction(0)) + d.value
        return flows


def trivial_bound(model: Model) -> Fraction:
    """Cheapest-conceivable cost: every demand Gbps on one circuit hop."""
    total = model.instance.total_demand()
    if not total:
        return Fraction(0)
    per_gbps = min(lt.cost / lt.routing_capacity for lt in model.cost_catalog.lambda_types)
    return total * per_gbps


def capacity_infeasible(model: Model) -> str | None:
    """A proof that no design can fit, if one is visible from node totals.

    Any feasible design terminates at least d(i) Gbps of virtual flow at PoP
    i, so i needs at least ceil(d(i) / fastest circuit) add-drop ports and a
    router switching at least d(i). The transparent variant allows the
    tighter per-pair argument instead.
    """
    if model.transparent:
        return transparent_lower_infeasible(model)
    inst = model.instance
    cc = model.cost_catalog
    max_drop = max(pm.add_drop_ports for pm in cc.physical_modules)
    max_switch = max(vm.switching_capacity for vm in cc.virtual_modules)
    max_rate = max(lt.routing_capacity for lt in cc.lambda_types)
    d_i = node_demand(inst)
    for n in sorted(inst.pops):
        circuits = ceil(Fraction(d_i[n]) / max_rate)
        if circuits > max_drop:
            return (f"node {n} must terminate >= {circuits} circuits, "
                    f"above the largest add-drop capacity {max_drop}")
        if d_i[n] > max_switch:
            return (f"node {n} demand {d_i[n]} Gbps exceeds the largest "
                    f"router capacity {max_switch}")
    return None


def transparent_lower_infeasible(model: Model) -> str | None:
    """A proof that the transparent variant cannot fit, if one is visible.

    With flows fixed to direct hops, each pair forces a minimum number of
    circuit terminations at both endpoints; if that already exceeds the
    largest optical module's add-drop capacity (or a node demand exceeds the
    largest router), no assignment can work.
    """
    if not model.transparent:
        return None
    inst = model.instance
    cc = model.cost_catalog
    max_drop = max(pm.add_drop_ports for pm in cc.physical_modules)
    max_switch = max(vm.switching_capacity for vm in cc.virtual_modules)
    min_circuits: dict[str, int] = {}
    d_i = node_demand(inst)
    for d in inst.demands:
        best = min(sum(mix.values()) for mix in _mix_options(Fraction(d.value),
                                                             list(cc.lambda_types)))
        for n in d.pair:
            min_circuits[n] = min_circuits.get(n, 0) + best
    for n, circuits in sorted(min_circuits.items()):
        if circuits > max_drop:
            return (f"node {n} must terminate >= {circuits} circuits, "
                    f"above the largest add-drop capacity {max_drop}")
    for n in sorted(inst.pops):
        if d_i[n] > max_switch:
            return (f"node {n} demand {d_i[n]} Gbps exceeds the largest "
                    f"router capacity {max_switch}")
    return None


def solve_heuristic(model: Model, instance: Instance | None = None,
                    catalog: PathCatalog | None = None, seed: int = 0,
                    limits: Limits | None = None) -> SolveReport:
    """Construct + local search; deterministic for a fixed seed.

    The report's bound is the trivial circuit-cost bound, so `optimal` is
    only claimed when that bound is actually attained (e.g. zero demands).
    Failure to construct a solution yields `unknown` unless the transparent
    infeasibility proof applies.
    """
    limits = limits or Limits()
    t0 = time.perf_counter()
    if instance is not None and instance is not model.instance:
        raise ModelError("instance does not belong to this model")
    if catalog is not None and catalog is not model.catalog:
        raise ModelError("catalog does not belong to this model")
    bound = trivial_bound(model)

    proof = capacity_infeasible(model)
    if proof is not None:
        return SolveReport(INFEASIBLE, None, bound,
                           wall_time_s=time.perf_counter() - t0)

    h = _Heuristic(model, seed, limits)
    if model.transparent:
        ok = True
        for d in model.instance.demands:
            h.pair_flow[d.pair] += d.value
            placed = h.best_placement(d.pair, Fraction(d.value))
            if placed is None:
                ok = False
                break
            _, path, mix = placed
            for speed, n in mix.items():
                if n:
                    h.state.add_circuits(h.cat.index(path), speed, n)
        if ok:
            h.prune_idle()
            h.remix_pairs()
    else:
        ok = h.construct()
        if ok:
            h.improve()
    if not ok or h.state.total_cost() is None:
        return SolveReport(UNKNOWN, None, bound, iterations=h.moves,
                           wall_time_s=time.perf_counter() - t0)

    sol = h.state.to_solution(h.flow_values() if not model.transparent else None)
    if sol is None:
        return SolveReport(UNKNOWN, None, bound, iterations=h.moves,
                           wall_time_s=time.perf_counter() - t0)
    cost = h.state.total_cost()
    sol.objective = cost
    violations = check_feasibility(model, sol)
    if violations:
        raise AssertionError(f"heuristic produced an infeasible design: {violations[:3]}")
    status = OPTIMAL if cost == bound else FEASIBLE
    return SolveReport(status, sol, bound, iterations=h.moves,
                       wall_time_s=time.perf_counter() - t0)
