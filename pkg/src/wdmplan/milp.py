"""Mixed-integer model of the two-layer design problem.

Variables
  f  continuous >= 0   virtual-layer flow, aggregated per demand source,
                       indexed (source, from-node, to-node)
  yp integer >= 0      circuits (light paths) per admissible physical path
                       and speed
  ye integer >= 0      fibers per physical link
  xn binary            router configuration per PoP (at most one)
  xo binary            optical node configuration per site (at most one)

Constraint kinds
  flow-conservation        per (source, PoP): net outflow = demand balance
  virtual-link-capacity    per PoP pair: flow <= circuit capacity
  physical-link-capacity   per link: channels <= fibers * channels-per-fiber
  module-uniqueness        per node: at most one module of each layer
  virtual-node-capacity    per PoP: local demand + terminating circuit
                           switching load <= router capacity
  slot                     per PoP: router slots consumed by circuits
  fiber                    per site: attached fibers <= node fiber capacity
  add-drop                 per site: terminating circuits <= add-drop ports

The slot rows are stored scaled by LambdaType.SLOT_UNITS so every
coefficient is an integer (a 10G circuit occupies 1/14 slot, which has no
finite decimal form). The objective is the sum of circuit, fiber, router and
optical-node module costs; interface costs at the network edge are a
separate report (see metrics), never folded into the objective.

Variable and constraint names use only [A-Za-z0-9_] and positional indices
(nodes and edges in sorted-id order, paths in catalog order), so exported
LP files are stable across runs. The mapping back to instance objects lives
in the Model's lookup tables.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import IO

from .costcat import SLOT_SURCHARGE_10G, CostCatalog, LambdaType
from .netmodel import Instance, node_demand
from .pathgen import PathCatalog

CONTINUOUS = "continuous"
INTEGER = "integer"
BINARY = "binary"

SNAP_TOLERANCE = Fraction(1, 10**6)


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str
    integrality: str
    obj: Fraction
    meta: tuple


@dataclass(frozen=True)
class Constraint:
    name: str
    kind: str
    coeffs: dict  # varname -> Fraction, only declared variables
    sense: str  # "<=", ">=", "="
    rhs: Fraction


@dataclass
class Solution:
    """Variable assignment; `objective` caches the evaluated cost."""

    values: dict
    objective: Fraction | None = None

    def value(self, name: str) -> Fraction:
        try:
            return self.values[name]
        except KeyError:
            raise ModelError(f"missing variable value: {name}") from None


class Model:
    """Variable/constraint tables plus lookup indexes into the instance."""

    def __init__(self, instance: Instance, catalog: PathCatalog,
                 cost_catalog: CostCatalog, transparent: bool = False):
        self.instance = instance
        self.catalog = catalog
        self.cost_catalog = cost_catalog
        self.transparent = transparent
        self.variables: dict[str, Variable] = {}
        self.constraints: list[Constraint] = []
        self.commodities: list[tuple] = []         # (key, origin, {sink: Gbps})
        self.aggregation: str | None = None
        # structured name lookups
        self.flow_vars: dict[tuple, str] = {}      # (commodity key, i, j) -> name
        self.path_vars: dict[tuple, str] = {}      # (path index, speed) -> name
        self.fiber_vars: dict[str, str] = {}       # edge id -> name
        self.vmod_vars: dict[tuple, str] = {}      # (node, module index) -> name
        self.pmod_vars: dict[tuple, str] = {}      # (node, module index) -> name
        self.fixed_pair_flow: dict[tuple, Fraction] = {}  # transparent only

    def add_var(self, name: str, kind: str, integrality: str, obj: Fraction,
                meta: tuple) -> str:
        if name in self.variables:
            raise ModelError(f"duplicate variable {name}")
        self.variables[name] = Variable(name, kind, integrality, obj, meta)
        return name

    def add_constr(self, name: str, kind: str, coeffs: dict, sense: str,
                   rhs: Fraction) -> None:
        for var in coeffs:
            if var not in self.variables:
                raise ModelError(f"constraint {name} references unknown {var}")
        self.constraints.append(Constraint(name, kind, dict(coeffs), sense, rhs))

    def vars_of_kind(self, kind: str) -> list[Variable]:
        return [v for v in self.variables.values() if v.kind == kind]

    def zero_solution(self) -> Solution:
        return Solution({name: Fraction(0) for name in self.variables})


def _indexers(instance: Instance):
    nidx = {n: i for i, n in enumerate(sorted(instance.graph.node_ids()))}
    eidx = {e: i for i, e in enumerate(sorted(e.id for e in instance.graph.edges))}
    return nidx, eidx


def build_model(instance: Instance, catalog: PathCatalog,
                cost_catalog: CostCatalog, aggregation: str = "source") -> Model:
    """Construct the optimized-architecture model.

    `aggregation` is "source" (flow variables shared by demands with the same
    source endpoint) or "none" (one commodity per demand; only used to
    validate that aggregation preserves optima).
    """
    if aggregation not in ("source", "none"):
        raise ModelError(f"unknown aggregation {aggregation!r}")
    for d in instance.demands:
        if not catalog.pair_paths.get(d.pair):
            raise ModelError(f"no admissible path for demand pair {d.u}-{d.v}")

    m = Model(instance, catalog, cost_catalog)
    nidx, eidx = _indexers(instance)
    pops = sorted(instance.pops)

    # commodities: (key, origin, {sink: amount})
    commodities = []
    if aggregation == "source":
        by_source: dict[str, dict[str, int]] = {}
        for d in instance.demands:
            by_source.setdefault(d.u, {})[d.v] = d.value
        for s in sorted(by_source):
            commodities.append((f"{nidx[s]}", s, by_source[s]))
    else:
        for ki, d in enumerate(sorted(instance.demands)):
            commodities.append((f"k{ki}", d.u, {d.v: d.value}))
    m.commodities = commodities
    m.aggregation = aggregation

    for key, _origin, _sinks in commodities:
        for i in pops:
            for j in pops:
                if i != j:
                    m.flow_vars[(key, i, j)] = m.add_var(
                        f"f_{key}_{nidx[i]}_{nidx[j]}", "flow", CONTINUOUS,
                        Fraction(0), ("flow", key, i, j))
    _add_design_vars(m, nidx, eidx)

    # flow conservation at every PoP for every commodity
    for key, origin, sinks in commodities:
        supply = sum(sinks.values())
        for i in pops:
            coeffs = {}
            for j in pops:
                if j == i:
                    continue
                coeffs[m.flow_vars[(key, i, j)]] = Fraction(1)
                coeffs[m.flow_vars[(key, j, i)]] = Fraction(-1)
            if i == origin:
                rhs = Fraction(supply)
            else:
                rhs = Fraction(-sinks.get(i, 0))
            m.add_constr(f"conserve_{key}_{nidx[i]}", "flow-conservation",
                         coeffs, "=", rhs)

    # virtual link capacity per unordered PoP pair
    for (i, j), plist in m.catalog.pair_paths.items():
        coeffs = {}
        for key, _origin, _sinks in commodities:
            coeffs[m.flow_vars[(key, i, j)]] = Fraction(1)
            coeffs[m.flow_vars[(key, j, i)]] = Fraction(1)
        for p in plist:
            for lt in cost_catalog.lambda_types:
                name = m.path_vars[(m.catalog.index(p), lt.speed)]
                coeffs[name] = Fraction(-lt.routing_capacity)
        if coeffs:
            m.add_constr(f"vcap_{nidx[i]}_{nidx[j]}", "virtual-link-capacity",
                         coeffs, "<=", Fraction(0))

    _add_design_constraints(m, nidx, eidx)
    return m


def build_transparent_variant(instance: Instance, catalog: PathCatalog,
                              cost_catalog: CostCatalog) -> Model:
    """Transparent-core variant: no IP transit, routers free of charge.

    Router configurations stay installable at zero cost (circuits still
    terminate on routers, consuming capacity and slots), each pair keeps only
    its shortest admissible path, and the virtual flow is pinned to the
    direct hop of each demand, so flow variables disappear from the model and
    each demand's value becomes a constant lower bound on the capacity of its
    own virtual link.
    """
    for d in instance.demands:
        if not catalog.pair_paths.get(d.pair):
            raise ModelError(f"transparent infeasible: unreachable pair {d.u}-{d.v}")

    shortest = {pair: plist[:1] for pair, plist in catalog.pair_paths.items()}
    sub_catalog = PathCatalog(shortest)
    m = Model(instance, sub_catalog, cost_catalog, transparent=True)
    nidx, eidx = _indexers(instance)

    _add_design_vars(m, nidx, eidx, router_cost_zero=True)

    demand_by_pair = {d.pair: Fraction(d.value) for d in instance.demands}
    for (i, j), plist in m.catalog.pair_paths.items():
        fixed = demand_by_pair.get((i, j), Fraction(0))
        m.fixed_pair_flow[(i, j)] = fixed
        coeffs = {}
        for p in plist:
            for lt in cost_catalog.lambda_types:
                name = m.path_vars[(m.catalog.index(p), lt.speed)]
                coeffs[name] = Fraction(lt.routing_capacity)
        if coeffs:
            m.add_constr(f"vcap_{nidx[i]}_{nidx[j]}", "virtual-link-capacity",
                         coeffs, ">=", fixed)

    _add_design_constraints(m, nidx, eidx)
    return m


def _add_design_vars(m: Model, nidx: dict, eidx: dict,
                     router_cost_zero: bool = False) -> None:
    """Circuit, fiber and module variables shared by both architectures."""
    inst, cc = m.instance, m.cost_catalog
    for pid, p in enumerate(m.catalog.paths):
        for lt in cc.lambda_types:
            m.path_vars[(pid, lt.speed)] = m.add_var(
                f"yp_{pid}_{lt.speed}", "lightpath", INTEGER, lt.cost,
                ("lightpath", pid, lt.speed))
    for e in sorted(inst.graph.edges, key=lambda e: e.id):
        m.fiber_vars[e.id] = m.add_var(
            f"ye_{eidx[e.id]}", "fiber", INTEGER, cc.fiber_cost[e.id],
            ("fiber", e.id))
    for i in sorted(inst.pops):
        for midx, vm in enumerate(cc.virtual_modules):
            cost = Fraction(0) if router_cost_zero else vm.cost
            m.vmod_vars[(i, midx)] = m.add_var(
                f"xn_{nidx[i]}_{midx}", "virtual-module", BINARY, cost,
                ("virtual-module", i, midx))
    for i in sorted(inst.graph.node_ids()):
        for midx, pm in enumerate(cc.physical_modules):
            m.pmod_vars[(i, midx)] = m.add_var(
                f"xo_{nidx[i]}_{midx}", "physical-module", BINARY, pm.cost,
                ("physical-module", i, midx))


def _add_design_constraints(m: Model, nidx: dict, eidx: dict) -> None:
    """Rows common to both architectures (everything except flow rows)."""
    inst, cc = m.instance, m.cost_catalog
    cat = m.catalog
    d_i = node_demand(inst)
    slot_units = cc.lambda_types[0].SLOT_UNITS

    # channels on each physical link fit into activated fibers
    for e in sorted(inst.graph.edges, key=lambda e: e.id):
        coeffs = {}
        for p in cat.paths_on_edge(e.id):
            for lt in cc.lambda_types:
                coeffs[m.path_vars[(cat.index(p), lt.speed)]] = Fraction(1)
        coeffs[m.fiber_vars[e.id]] = Fraction(-inst.channels_per_fiber)
        m.add_constr(f"pcap_{eidx[e.id]}", "physical-link-capacity",
                     coeffs, "<=", Fraction(0))

    # at most one module per node and layer
    for i in sorted(inst.pops):
        coeffs = {m.vmod_vars[(i, midx)]: Fraction(1)
                  for midx in range(len(cc.virtual_modules))}
        m.add_constr(f"one_router_{nidx[i]}", "module-uniqueness",
                     coeffs, "<=", Fraction(1))
    for i in sorted(inst.graph.node_ids()):
        coeffs = {m.pmod_vars[(i, midx)]: Fraction(1)
                  for midx in range(len(cc.physical_modules))}
        m.add_constr(f"one_oxc_{nidx[i]}", "module-uniqueness",
                     coeffs, "<=", Fraction(1))

    # router capacity and slots at each PoP
    for i in sorted(inst.pops):
        cap = {}
        slots = {}
        for p in cat.endpoint_paths(i):
            for lt in cc.lambda_types:
                name = m.path_vars[(cat.index(p), lt.speed)]
                cap[name] = cap.get(name, Fraction(0)) + lt.switching_capacity
                slots[name] = slots.get(name, Fraction(0)) + lt.slot_units
        for midx, vm in enumerate(cc.virtual_modules):
            cap[m.vmod_vars[(i, midx)]] = Fraction(-vm.switching_capacity)
            slots[m.vmod_vars[(i, midx)]] = Fraction(-vm.slot_capacity * slot_units)
        m.add_constr(f"ncap_{nidx[i]}", "virtual-node-capacity",
                     cap, "<=", Fraction(-d_i[i]))
        m.add_constr(f"slots_{nidx[i]}", "slot", slots, "<=", Fraction(0))

    # fibers and terminating circuits at each optical site
    for i in sorted(inst.graph.node_ids()):
        fib = {}
        for e in inst.graph.incident(i):
            fib[m.fiber_vars[e.id]] = fib.get(m.fiber_vars[e.id], Fraction(0)) + 1
        drop = {}
        for p in cat.endpoint_paths(i):
            for lt in cc.lambda_types:
                name = m.path_vars[(cat.index(p), lt.speed)]
                drop[name] = drop.get(name, Fraction(0)) + 1
        for midx, pm in enumerate(cc.physical_modules):
            fib[m.pmod_vars[(i, midx)]] = Fraction(-pm.fiber_capacity)
            drop[m.pmod_vars[(i, midx)]] = Fraction(-pm.add_drop_ports)
        m.add_constr(f"fibers_{nidx[i]}", "fiber", fib, "<=", Fraction(0))
        m.add_constr(f"adddrop_{nidx[i]}", "add-drop", drop, "<=", Fraction(0))


def evaluate_cost(model: Model, solution: Solution | dict, final_cost: bool = False) -> Fraction:
    """Objective value of a solution: module/circuit/fiber cost dot product.

    With `final_cost` the 10G slot surcharge is added: each router pays 3
    cost units per slot actually occupied by 10G cards (circuit count / 14,
    rounded up per node). Interface costs at the network edge are never part
    of this value; see metrics.edge_cost.
    """
    values = solution.values if isinstance(solution, Solution) else solution
    total = Fraction(0)
    for name, var in model.variables.items():
        if name not in values:
            raise ModelError(f"missing variable value: {name}")
        if var.obj:
            total += var.obj * values[name]
    if final_cost:
        total += slot_surcharge(model, values)
    return total


def slot_surcharge(model: Model, values: dict) -> Fraction:
    """Post-processing cost of 3 per router slot occupied by 10G cards."""
    if 10 not in {lt.speed for lt in model.cost_catalog.lambda_types}:
        return Fraction(0)
    total = Fraction(0)
    cat = model.catalog
    for i in sorted(model.instance.pops):
        circuits = Fraction(0)
        for p in cat.endpoint_paths(i):
            circuits += values[model.path_vars[(cat.index(p), 10)]]
        if circuits:
            slots_10g = ceil(circuits / LambdaType.SLOT_UNITS)
            total += SLOT_SURCHARGE_10G * slots_10g
    return total


def _frac_decimal(x: Fraction) -> str:
    """Exact plain-decimal rendering; errors if the denominator is not 2^a 5^b."""
    num, den = x.numerator, x.denominator
    if den == 1:
        return str(num)
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        raise ModelError(f"coefficient {x} has no finite decimal form")
    k = max(twos, fives)
    digits = num * 10**k // den
    sign = "-" if digits < 0 else ""
    digits = abs(digits)
    whole, frac = divmod(digits, 10**k)
    return f"{sign}{whole}.{str(frac).rjust(k, '0')}"


def _lp_terms(coeffs: dict) -> str:
    parts = []
    for name, coef in coeffs.items():
        if coef == 0:
            continue
        mag = _frac_decimal(abs(coef))
        op = "-" if coef < 0 else "+"
        if not parts and op == "+":
            parts.append(f"{mag} {name}" if mag != "1" else name)
        else:
            parts.append(f"{op} {mag} {name}" if mag != "1" else f"{op} {name}")
    if not parts:
        raise ModelError("empty expression in LP export")
    return " ".join(parts)


def export_model(model: Model, out: IO[str]) -> None:
    """Write the model as a CPLEX LP format text file.

    Deterministic: same model -> byte-identical file. All variables keep the
    LP-format default lower bound 0; integrality goes to General/Binary
    sections.
    """
    out.write("\\ two-layer network design model\n")
    out.write(f"\\ architecture: {'transparent-core' if model.transparent else 'optimized'}\n")
    obj = {name: v.obj for name, v in model.variables.items() if v.obj}
    out.write("Minimize\n")
    out.write(f" obj: {_lp_terms(obj) if obj else '0 ' + next(iter(model.variables))}\n")
    out.write("Subject To\n")
    for c in model.constraints:
        sense = {"<=": "<=", ">=": ">=", "=": "="}[c.sense]
        out.write(f" {c.name}: {_lp_terms(c.coeffs)} {sense} {_frac_decimal(c.rhs)}\n")
    generals = [n for n, v in model.variables.items() if v.integrality == INTEGER]
    binaries = [n for n, v in model.variables.items() if v.integrality == BINARY]
    if generals:
        out.write("Generals\n")
        for n in generals:
            out.write(f" {n}\n")
    if binaries:
        out.write("Binaries\n")
        for n in binaries:
            out.write(f" {n}\n")
    out.write("End\n")


def import_solution(model: Model, inp: IO[str] | str) -> Solution:
    """Read a solver solution: either `<varname> <value>` lines (with `#`
    comments) or the XML layout mainstream solvers emit (variable name/value
    attributes).

    Unlisted variables default to 0. Integer/binary variables are snapped to
    the nearest integer when within 1e-6 (solver float noise), else rejected.
    """
    text = inp if isinstance(inp, str) else inp.read()
    raw: dict[str, Fraction] = {}
    stripped = text.lstrip()
    if stripped.startswith("<"):
        root = ET.fromstring(text)
        for var in root.iter("variable"):
            raw[var.attrib["name"]] = Fraction(str(var.attrib["value"]))
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ModelError(f"solution line {lineno}: expected '<name> <value>'")
            raw[parts[0]] = Fraction(parts[1]) if "/" in parts[1] else Fraction(str(float(parts[1])))

    values = {}
    for name, var in model.variables.items():
        v = raw.pop(name, Fraction(0))
        if var.integrality in (INTEGER, BINARY):
            nearest = Fraction(round(v))
            if abs(v - nearest) > SNAP_TOLERANCE:
                raise ModelError(f"{name}: fractional value {float(v)} for integer variable")
            v = nearest
        values[name] = v
    if raw:
        unknown = sorted(raw)[:5]
        raise ModelError(f"solution names unknown to the model: {unknown}")
    return Solution(values)
