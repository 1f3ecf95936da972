#!/usr/bin/env python3
"""Long-running search for a minimum hex packing of the subdivided pyramid.

Runs the layered pattern search toward the 16-quad pyramid boundary,
checkpointing every layer so the run can be stopped and resumed at will.
State counts grow quickly with the hex budget; expect a full run to take
on the order of a day on desktop hardware.  Progress is printed per
layer, and the witness plus the reconstructed mesh are written on
success.

    python3 scripts/run_pyramid_search.py --max-hexes 36 \\
        --checkpoint runs/pyramid --threads 4
"""

import argparse
import sys
import time

from hexpack.formats import write_mesh, write_witness
from hexpack.search import SearchOptions, build_ledger, replay_witness
from hexpack.surface import canonical_code, pyramid16_pattern


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-hexes", type=int, default=36,
                    help="hex budget (default 36)")
    ap.add_argument("--checkpoint", metavar="DIR", default=None,
                    help="checkpoint directory; resumes if it exists")
    ap.add_argument("--threads", type=int, default=1,
                    help="parallel expansion workers (default 1)")
    ap.add_argument("--no-reflection", action="store_true",
                    help="treat mirror-image patterns as distinct")
    ap.add_argument("--no-sphere-mode", action="store_true",
                    help="allow non-sphere boundary topology")
    ap.add_argument("--configs", default=None,
                    help="comma-separated glue config ids (default all 8)")
    ap.add_argument("--out", default="pyramid.witness",
                    help="witness output path (default pyramid.witness)")
    ap.add_argument("--mesh-out", default="pyramid.hexmesh",
                    help="mesh output path (default pyramid.hexmesh)")
    return ap.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    kwargs = dict(
        sphere_mode=not args.no_sphere_mode,
        reflection_invariant=not args.no_reflection,
        checkpoint_dir=args.checkpoint,
        thread_count=args.threads,
    )
    if args.configs:
        kwargs["allowed_configs"] = tuple(
            int(t) for t in args.configs.split(",")
        )
    options = SearchOptions(**kwargs)
    target = canonical_code(pyramid16_pattern(), options.reflection_invariant)

    t0 = time.perf_counter()

    def report(ledger):
        stats = ledger.stats
        print(
            f"layer {ledger.layer:3d}: {len(ledger.records):9d} patterns, "
            f"{stats.states_expanded} expanded, {stats.moves_valid} moves, "
            f"{stats.pruned} pruned, {time.perf_counter() - t0:.1f}s",
            flush=True,
        )

    ledger = build_ledger(
        args.max_hexes, options, target=target, progress=report
    )
    rec = ledger.records.get(target)
    slots = []
    if rec is not None:
        for parity in ("odd", "even"):
            if rec.slot(parity) is not None:
                slots.append((rec.slot(parity), rec.witness(parity)))
    if not slots:
        print(f"exhausted: no packing within {args.max_hexes} hexes")
        return 3

    count, witness = min(slots)
    print(f"found: {count} hexes")
    with open(args.out, "w") as fh:
        fh.write(write_witness(witness))
    print(f"wrote {args.out}")
    packing = replay_witness(witness)
    with open(args.mesh_out, "w") as fh:
        fh.write(write_mesh(packing))
    print(f"wrote {args.mesh_out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
