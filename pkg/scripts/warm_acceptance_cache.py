#!/usr/bin/env python3
"""Precompute the acceptance-suite sweeps tier by tier.

The acceptance tests run the same protocol through the same cache, so
warming it here (hours for the larger sizes on one core) makes the test
suite itself quick to rerun. Safe to interrupt and restart: finished
instance sweeps are reloaded from the cache.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from annealfair.pipeline import SweepPlan, run_scaling  # noqa: E402

SEED = 20260809
TIERS = [(4, 100), (6, 100), (8, 30), (10, 30), (12, 10)]
CACHE = Path(__file__).resolve().parent.parent / "out" / "acceptance-cache"


def main() -> int:
    plan = SweepPlan()
    tiers = TIERS
    if len(sys.argv) > 1:
        wanted = {int(v) for v in sys.argv[1].split(",")}
        tiers = [(n, c) for n, c in TIERS if n in wanted]
    for n, count in tiers:
        start = time.time()
        last = [start]

        def progress(size, k, total, _last=last):
            now = time.time()
            print(
                f"  N={size} instance {k + 1}/{total} ({now - _last[0]:.1f}s)",
                flush=True,
            )
            _last[0] = now

        result = run_scaling([n], count, plan, seed=SEED, cache_dir=CACHE, progress=progress)
        row = result.rows[0]
        print(
            f"N={n}: rate={row.rate:.2f} indeterminate={row.indeterminate} "
            f"count={row.count} elapsed={time.time() - start:.0f}s",
            flush=True,
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
