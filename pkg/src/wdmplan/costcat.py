"""Equipment catalog and capex rules for the two-layer network design problem.

All monetary values are unitless cost units normalized to the price of a 10G
long-haul transponder (1.0). They are kept as `fractions.Fraction` so that
catalog arithmetic and objective evaluation are exact; convert with `float()`
for display.

The catalog covers:

* wavelength circuit types (10G / 100G), with routing capacity, switching
  capacity, router slot share and per-circuit cost,
* preconfigured IP router configurations (a small 11-slot chassis and a big
  16-slot chassis with a multichassis option),
* optical cross-connect / ROADM node configurations,
* length-dependent per-fiber link cost (line amplifiers, gain equalizers,
  dispersion compensation).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import IO, Iterable

# Circuit (transponder) unit costs and the gray short-reach interface costs,
# per end.  A circuit needs one transponder and one SR plug at each end; for
# 100G the SR plug is accounted in the router slot price instead.
TRANSPONDER_COST = {10: Fraction(1), 100: Fraction(8)}
SR_TRANSCEIVER_COST = {10: Fraction(1, 2), 100: Fraction(2)}

SUPPORTED_SPEEDS = (10, 100)

# Optical line equipment: one amplifier every 80 km (minus the terminal
# sites), a gain equalizer at every fourth amplifier site, and dispersion
# compensating fiber priced per km.
AMPLIFIER_COST = Fraction("1.92")
AMPLIFIER_SPACING_KM = 80
EQUALIZER_COST = Fraction("2.17")
EQUALIZER_EVERY_N_AMPLIFIERS = 4
DISPERSION_COST_PER_KM = Fraction("0.0072")

# Router families.  The big router (type1) supports multichassis stacking in
# 16-slot chassis up to 64 slots at a one-off interconnect charge; densities
# up to 10 slots are always served by the small router (type2).
TYPE2_BASE_COST = Fraction(12)
TYPE2_SLOT_COST = Fraction(16)
TYPE2_SLOT_CAPACITY_GBPS = 120
TYPE2_MAX_SLOTS = 11

TYPE1_BASE_COST = Fraction("27.25")
TYPE1_SLOT_COST = Fraction(22)
TYPE1_SLOT_CAPACITY_GBPS = 140
TYPE1_CHASSIS_SLOTS = 16
TYPE1_MIN_SLOTS = 11
TYPE1_MAX_SLOTS = 64
MULTICHASSIS_COST = Fraction(50)

# A preconfigured slot is priced without the 10G short-reach plugs and, for
# 10G line cards, 3 cost units below the real card price.  The difference is
# charged per occupied slot in a post-processing step on final solutions.
SLOT_SURCHARGE_10G = Fraction(3)


def _frac(value) -> Fraction:
    """Exact rational from int/str/Fraction, or the decimal reading of a float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(str(value))


@dataclass(frozen=True)
class LambdaType:
    """One wavelength circuit type.

    `routing_capacity` is the bit rate offered to IP flow, while
    `switching_capacity` is what terminating the circuit consumes at the two
    end routers (for 100G the card switches 120 Gbps although it routes 100).
    `slot_share` is the fraction of a router slot one circuit occupies at
    each end node.
    """

    speed: int
    routing_capacity: int
    switching_capacity: int
    slot_share: Fraction
    cost: Fraction

    # Slot constraints are kept in integer units of 1/SLOT_UNITS slot to stay
    # exact; 14 circuits of 10G fill one slot, one 100G circuit fills a slot.
    SLOT_UNITS = 14

    @property
    def slot_units(self) -> int:
        return int(self.slot_share * self.SLOT_UNITS)


def lambda_type(speed: int, transponder_scale=1) -> LambdaType:
    """Return the circuit type for `speed` Gbps with scaled transponder cost.

    `transponder_scale` multiplies the transponder unit price only (the SR
    plugs keep their price), which is how circuit-cost sweeps are expressed.
    """
    if speed not in SUPPORTED_SPEEDS:
        raise ValueError(f"unknown circuit speed {speed!r}, supported: {SUPPORTED_SPEEDS}")
    scale = _frac(transponder_scale)
    if scale < 1:
        raise ValueError(f"transponder scale must be >= 1, got {transponder_scale}")
    if speed == 10:
        # two transponders plus two gray short-reach plugs
        cost = 2 * TRANSPONDER_COST[10] * scale + 2 * SR_TRANSCEIVER_COST[10]
        return LambdaType(10, routing_capacity=10, switching_capacity=10,
                          slot_share=Fraction(1, 14), cost=cost)
    # 100G: the SR plug is included in the preconfigured slot price
    cost = 2 * TRANSPONDER_COST[100] * scale
    return LambdaType(100, routing_capacity=100, switching_capacity=120,
                      slot_share=Fraction(1), cost=cost)


@dataclass(frozen=True)
class VirtualNodeModule:
    """A preconfigured IP router: chassis plus a number of equipped slots."""

    router_type: str
    chassis: int
    slots: int
    switching_capacity: int
    slot_capacity: int
    cost: Fraction

    @property
    def name(self) -> str:
        return f"{self.router_type}-{self.slots}slot"


def enumerate_virtual_modules(speeds: int | Iterable[int] = SUPPORTED_SPEEDS) -> list[VirtualNodeModule]:
    """Enumerate all installable router configurations, ascending by capacity.

    The configuration list does not depend on the circuit speed (slot prices
    are speed-neutral; the 10G slot surcharge is a post-processing cost), so
    `speeds` is validated only.
    """
    if isinstance(speeds, int):
        speeds = (speeds,)
    for s in speeds:
        if s not in SUPPORTED_SPEEDS:
            raise ValueError(f"unknown circuit speed {s!r}")
    modules = []
    for slots in range(1, TYPE2_MAX_SLOTS + 1):
        modules.append(VirtualNodeModule(
            router_type="type2",
            chassis=1,
            slots=slots,
            switching_capacity=TYPE2_SLOT_CAPACITY_GBPS * slots,
            slot_capacity=slots,
            cost=TYPE2_BASE_COST + TYPE2_SLOT_COST * slots,
        ))
    for slots in range(TYPE1_MIN_SLOTS, TYPE1_MAX_SLOTS + 1):
        chassis = ceil(slots / TYPE1_CHASSIS_SLOTS)
        cost = TYPE1_BASE_COST * chassis + TYPE1_SLOT_COST * slots
        if slots > TYPE1_CHASSIS_SLOTS:
            cost += MULTICHASSIS_COST
        modules.append(VirtualNodeModule(
            router_type="type1",
            chassis=chassis,
            slots=slots,
            switching_capacity=TYPE1_SLOT_CAPACITY_GBPS * slots,
            slot_capacity=slots,
            cost=cost,
        ))
    modules.sort(key=lambda m: m.switching_capacity)
    return modules


@dataclass(frozen=True)
class PhysicalNodeModule:
    """An optical node configuration: ROADM or optical cross-connect."""

    name: str
    fiber_capacity: int
    add_drop_ports: int
    cost: Fraction


def physical_modules() -> list[PhysicalNodeModule]:
    """The ten installable optical node configurations."""
    modules = [
        PhysicalNodeModule("roadm-50", 2, 40, Fraction("11.67")),
        PhysicalNodeModule("roadm-100", 2, 80, Fraction("17.5")),
    ]
    for degree in range(3, 6):
        modules.append(PhysicalNodeModule(
            f"oxc-{degree}", degree, 40 * degree,
            Fraction("2.5") + degree * Fraction("8.33")))
    for degree in range(6, 11):
        modules.append(PhysicalNodeModule(
            f"oxc-{degree}", degree, 40 * degree,
            Fraction("2.75") + degree * Fraction("8.99")))
    return modules


def amplifier_count(length_km) -> int:
    """Number of in-line amplifiers on a fiber of the given length."""
    length = _frac(length_km)
    return max(0, ceil(length / AMPLIFIER_SPACING_KM) - 1)


def equalizer_count(length_km) -> int:
    """Number of dynamic gain equalizers on a fiber of the given length."""
    n_ola = amplifier_count(length_km)
    return max(0, ceil(Fraction(n_ola, EQUALIZER_EVERY_N_AMPLIFIERS)) - 1)


def fiber_link_cost(length_km) -> Fraction:
    """Cost of operating one fiber on a link of `length_km` km.

    Sum of amplifier, gain-equalizer and dispersion-compensation cost; the
    counts clamp to zero on short links.
    """
    length = _frac(length_km)
    if length <= 0:
        raise ValueError(f"link length must be positive, got {length_km}")
    return (amplifier_count(length) * AMPLIFIER_COST
            + equalizer_count(length) * EQUALIZER_COST
            + DISPERSION_COST_PER_KM * length)


@dataclass(frozen=True)
class CostCatalog:
    """Bundle of everything the model builder needs to price a design."""

    lambda_types: tuple[LambdaType, ...]
    virtual_modules: tuple[VirtualNodeModule, ...]
    physical_modules: tuple[PhysicalNodeModule, ...]
    fiber_cost: dict  # edge id -> Fraction

    def lambda_by_speed(self, speed: int) -> LambdaType:
        for lt in self.lambda_types:
            if lt.speed == speed:
                return lt
        raise KeyError(f"no {speed}G circuit type in catalog")


def build_cost_catalog(instance) -> CostCatalog:
    """Price catalog for an instance (its speeds, transponder scale, links)."""
    lts = tuple(lambda_type(s, instance.transponder_scale) for s in sorted(instance.speeds))
    return CostCatalog(
        lambda_types=lts,
        virtual_modules=tuple(enumerate_virtual_modules(instance.speeds)),
        physical_modules=tuple(physical_modules()),
        fiber_cost={e.id: fiber_link_cost(e.length_km) for e in instance.graph.edges},
    )


def dump_catalog_csv(out: IO[str], speeds: Iterable[int] = SUPPORTED_SPEEDS,
                     transponder_scale=1) -> None:
    """Write the full catalog as CSV for auditing.

    Columns: kind, name, capacity_gbps, slots_or_fibers, ports, cost.
    Circuit rows carry routing capacity in capacity_gbps and the slot share
    (as a fraction string) in slots_or_fibers.
    """
    writer = csv.writer(out)
    writer.writerow(["kind", "name", "capacity_gbps", "slots_or_fibers", "ports", "cost"])
    for s in sorted(set(speeds)):
        lt = lambda_type(s, transponder_scale)
        writer.writerow(["circuit", f"{s}G", lt.routing_capacity,
                         str(lt.slot_share), "", float(lt.cost)])
    for vm in enumerate_virtual_modules(tuple(speeds)):
        writer.writerow(["router", vm.name, vm.switching_capacity,
                         vm.slot_capacity, "", float(vm.cost)])
    for pm in physical_modules():
        writer.writerow(["optical-node", pm.name, "", pm.fiber_capacity,
                         pm.add_drop_ports, float(pm.cost)])
