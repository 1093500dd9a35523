#!/usr/bin/env python3
"""Deterministic synthetic MATPOWER-format test cases.

The standard IEEE case files are not redistributable from this environment,
so the larger test networks are generated here instead: ring-plus-spokes
topologies with light, well-conditioned loading. Bus counts mirror the
familiar 30/57/118/300 sizes; electrical data is synthetic. Regenerate with:

    python3 tools/gen_cases.py data/
"""

import random
import sys
from pathlib import Path


def build_case(name, nbus, slack, seed, spoke_every, q_heavy=False):
    rng = random.Random(seed)
    buses = []
    gens = []
    branches = []

    gen_buses = {slack}
    # a generator roughly every 10 buses keeps the voltage profile flat
    for b in range(1, nbus + 1):
        if b != slack and b % 10 == 3:
            gen_buses.add(b)

    for b in range(1, nbus + 1):
        if b == slack:
            btype, pd, qd = 3, 0.0, 0.0
        elif b in gen_buses:
            btype, pd, qd = 2, 0.0, 0.0
        else:
            btype = 1
            pd = round(rng.uniform(2.0, 6.0), 1)  # MW
            qd = round(pd * (rng.uniform(0.5, 0.9) if q_heavy else rng.uniform(0.1, 0.3)), 1)
        buses.append((b, btype, pd, qd))

    total_pd = sum(b[2] for b in buses)
    ngen = len(gen_buses) - 1  # slack picks up the remaining balance
    for b in sorted(gen_buses):
        if b == slack:
            # slack: generous active capability, reactive bounds wide; the
            # reactive study narrows them from the command line instead
            gens.append((b, 0.0, 0.0, 9999.0, -9999.0))
        else:
            pg = round(0.6 * total_pd / max(ngen, 1), 1)
            gens.append((b, pg, 0.0, 9999.0, -9999.0))

    def add_branch(f, t):
        r = round(rng.uniform(0.01, 0.03), 5)
        x = round(rng.uniform(0.05, 0.15), 5)
        branches.append((f, t, r, x))

    for b in range(1, nbus):
        add_branch(b, b + 1)
    add_branch(nbus, 1)
    for b in range(1, nbus + 1):
        if b != slack and b % spoke_every == 0:
            add_branch(slack, b)

    lines = [f"function mpc = {name}",
             "% synthetic ring-plus-spokes test network (see tools/gen_cases.py)",
             "",
             "mpc.version = '2';",
             "",
             "mpc.baseMVA = 100;",
             "",
             "%% bus data",
             "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin",
             "mpc.bus = ["]
    for b, btype, pd, qd in buses:
        lines.append(f"\t{b}\t{btype}\t{pd}\t{qd}\t0\t0\t1\t1\t0\t0\t1\t1.1\t0.9;")
    lines += ["];", "", "%% generator data",
              "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin",
              "mpc.gen = ["]
    for b, pg, qg, qmax, qmin in gens:
        lines.append(f"\t{b}\t{pg}\t{qg}\t{qmax}\t{qmin}\t1\t100\t1\t9999\t0;")
    lines += ["];", "", "%% branch data",
              "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax",
              "mpc.branch = ["]
    for f, t, r, x in branches:
        lines.append(f"\t{f}\t{t}\t{r}\t{x}\t0\t0\t0\t0\t0\t0\t1\t-360\t360;")
    lines += ["];", ""]
    return "\n".join(lines)


def main():
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    out_dir.mkdir(parents=True, exist_ok=True)
    specs = [
        ("case30", 30, 1, 30, 6, False),
        ("case57", 57, 1, 57, 8, False),
        # slack on bus 69 so its reactive output can be bounded from the CLI
        ("case118", 118, 69, 118, 9, True),
        ("case300", 300, 1, 300, 12, False),
    ]
    for name, nbus, slack, seed, spoke, q_heavy in specs:
        text = build_case(name, nbus, slack, seed, spoke, q_heavy)
        (out_dir / f"{name}.m").write_text(text)
        print(f"wrote {out_dir / (name + '.m')}")


if __name__ == "__main__":
    main()
