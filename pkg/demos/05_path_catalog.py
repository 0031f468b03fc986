"""Show how the admissible path catalog reacts to its two knobs.

Candidate routes per PoP pair come from a k-shortest-path search truncated at
a length bound (default 750 km, the reach of a long-haul circuit without
regeneration). Tightening either knob shrinks the design space the optimizer
may use.

    python3 demos/05_path_catalog.py
"""

import dataclasses
import io
from pathlib import Path

from wdmplan import build_catalog, read_instance
from wdmplan.pathgen import dump_paths, load_paths

ROOT = Path(__file__).resolve().parents[1]


def main():
    base = read_instance((ROOT / "data" / "toy6.txt").read_text())
    catalog = build_catalog(base)
    print(f"{len(base.pops)} PoPs -> {len(catalog.pair_paths)} pairs")
    print(f"{'k':>3} {'bound km':>9} {'paths':>6}")
    for k, bound in ((10, 750), (10, 500), (3, 750), (1, 750)):
        inst = dataclasses.replace(base, max_paths_per_pair=k,
                                   max_path_km=bound)
        print(f"{k:>3} {bound:>9} {len(build_catalog(inst).paths):>6}")

    pair = ("fra", "mun")
    print()
    print(f"candidate routes {pair[0]}-{pair[1]}, shortest first:")
    for p in catalog.pair_paths[pair]:
        print(f"  {float(p.length_km):6.1f} km via {'-'.join(p.nodes)}")

    buf = io.StringIO()
    dump_paths(catalog, buf)
    reloaded = load_paths(io.StringIO(buf.getvalue()), base.graph)
    assert reloaded.paths == catalog.paths
    print()
    print(f"catalog round-trips through its text format "
          f"({len(buf.getvalue().splitlines())} lines)")


if __name__ == "__main__":
    main()
