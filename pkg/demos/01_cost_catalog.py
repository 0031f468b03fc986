"""Walk through the cost model: circuits, router modules, optical nodes, fiber.

All prices are in normalized cost units where one long-haul 10G transponder
costs 1.0, so a bidirectional 10G circuit (two transponders plus its share of
the mux) comes out at 3.0. Run from the repository root:

    python3 demos/01_cost_catalog.py
"""

from fractions import Fraction

from wdmplan import (enumerate_virtual_modules, fiber_link_cost, lambda_type,
                     physical_modules)


def main():
    print("circuit types (cost per bidirectional lightpath)")
    for speed in (10, 100):
        lt = lambda_type(speed)
        print(f"  {speed:>3}G: cost {float(lt.cost):6.2f}, routes "
              f"{lt.routing_capacity} Gbit/s, loads each end router with "
              f"{lt.switching_capacity} Gbit/s and {lt.slot_share} of a slot")

    print()
    print("router line: the same slot cost curve produces both families")
    mods = enumerate_virtual_modules()
    print(f"  {len(mods)} configurations, smallest to largest:")
    for m in (mods[0], mods[10], mods[11], mods[-1]):
        print(f"  {m.name:>13}: {m.slot_capacity:>2} slots, switches "
              f"{m.switching_capacity} Gbit/s, cost {float(m.cost):8.2f}")
    flagship = next(m for m in mods if m.name == "type1-35slot")
    print(f"  the 35-slot chassis build costs {float(flagship.cost)} "
          f"(three shelves plus one inter-shelf upgrade)")

    print()
    print("optical cross-connects (fiber degree, add/drop ports, cost)")
    for m in physical_modules():
        print(f"  {m.name:>8}: {m.fiber_capacity:>2} fibers, "
              f"{m.add_drop_ports:>3} ports, cost {float(m.cost):6.2f}")

    print()
    print("fiber cost grows stepwise with line amplifiers every 80 km")
    print("and a gain equalizer after every fourth amplifier:")
    for km in (60, 160, 400, 800):
        print(f"  {km:>4} km: {float(fiber_link_cost(Fraction(km))):6.3f}")


if __name__ == "__main__":
    main()
