#!/usr/bin/env python3
"""Search six-vertex instances for one that samples unfairly.

Criterion: at mu_plus = 0.2, at the smallest anneal time whose total
ground-state probability reaches 0.999, the entropy is below 1.95 bits.
The first hit is archived as tests/data/golden_unfair_n6.json together
with its verification sweep (entropy rises again at large penalties).
"""

import json
import sys
import time
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from annealfair.dynamics import AnnealRun, evolve, ground_state_probabilities  # noqa: E402
from annealfair.fairness import entropy  # noqa: E402
from annealfair.generator import GenSpec, generate_filtered, stream_seed  # noqa: E402
from annealfair.model import autoscale, compose_mu, encode_constraint, encode_objective  # noqa: E402

SEARCH_SEED = 424242
T_GRID = (100.0, 316.0, 1000.0, 3162.0, 10000.0)
MU_PLUS_GRID = (0.0, 0.2, 0.5, 1.0, 2.0)
OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "golden_unfair_n6.json"


def sweep_point(inst, report, mu, T):
    model, _ = autoscale(compose_mu(encode_objective(inst), encode_constraint(inst.n), mu))
    state = evolve(model, AnnealRun(T=T))
    p_total, p_each = ground_state_probabilities(state, report.optimal_configs)
    return p_total, p_each


def main() -> int:
    for k in range(200):
        spec = GenSpec(n=6, seed=stream_seed(SEARCH_SEED, k))
        inst, report, _ = generate_filtered(spec)
        mu = report.mu_threshold + 0.2
        t_star = None
        s_star = None
        for T in T_GRID:
            p_total, p_each = sweep_point(inst, report, mu, T)
            if p_total >= 0.999:
                t_star = T
                s_star = entropy(p_each)
                break
        print(f"k={k}: T*={t_star} S={None if s_star is None else round(s_star, 4)}", flush=True)
        if t_star is None or s_star >= 1.95:
            continue

        # verification sweep: entropy at the largest penalty vs at the threshold
        verification = {}
        for mu_plus in MU_PLUS_GRID:
            p_total, p_each = sweep_point(inst, report, report.mu_threshold + mu_plus, 1e4)
            verification[str(mu_plus)] = {
                "p_gs": p_total,
                "p_per_state": p_each,
                "entropy": entropy(p_each),
            }
        s0 = verification["0.0"]["entropy"]
        s_max = verification[str(MU_PLUS_GRID[-1])]["entropy"]
        print(f"  S(mu+=0)={s0:.4f} S(mu+={MU_PLUS_GRID[-1]})={s_max:.4f}", flush=True)
        if s_max <= s0:
            print("  verification failed, continuing search", flush=True)
            continue

        OUT.parent.mkdir(parents=True, exist_ok=True)
        doc = {
            "instance": inst.to_json(),
            "seed": spec.seed,
            "search_seed": SEARCH_SEED,
            "search_index": k,
            "mu_threshold": report.mu_threshold,
            "e_opt": report.e_opt,
            "degeneracy": report.degeneracy,
            "t_grid": list(T_GRID),
            "mu_plus_grid": list(MU_PLUS_GRID),
            "t_star": t_star,
            "entropy_at_t_star": s_star,
            "verification_T": 1e4,
            "verification": verification,
        }
        OUT.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        print(f"archived {OUT}", flush=True)
        return 0
    print("no unfair instance found in 200 candidates", flush=True)
    return 1


if __name__ == "__main__":
    sys.exit(main())
