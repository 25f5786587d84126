"""Run the three Fourier subsampling experiments and write CSV/JSON results.

    python3 scripts/run_experiments.py --out results --seeds 0,1,2
"""
import argparse
import json
from pathlib import Path

from framesub.experiments import EXP3_B_VALUES, loglog_slope, reports_to_csv, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seeds", default="0")
    ap.add_argument("--m3", type=int, default=100)
    ap.add_argument("--grid", action="store_true", help="also run the streamed full-grid variant of experiment 3")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [int(s) for s in args.seeds.split(",")]

    summary = {}
    for seed in seeds:
        for eid in (1, 2, 3):
            reps = run_experiment(eid, seed=seed, m3=args.m3)
            stem = out / f"exp{eid}_seed{seed}"
            stem.with_suffix(".csv").write_text(reports_to_csv(reps))
            stem.with_suffix(".json").write_text(json.dumps([r.to_dict(timing=True) for r in reps], indent=2))
            row = {"n": [r.n for r in reps], "A": [r.bounds_after_bss["A"] for r in reps]}
            if eid == 3:
                row["slope"] = loglog_slope(EXP3_B_VALUES, row["A"])
            elif reps[0].bounds_after_random is not None:
                row["A_random"] = reps[0].bounds_after_random["A"]
            summary[f"exp{eid}_seed{seed}"] = row
        if args.grid:
            reps = run_experiment(3, b=[1.12, 1.45, 2.0], seed=seed, grid=True, m3=args.m3)
            (out / f"exp3grid_seed{seed}.csv").write_text(reports_to_csv(reps))
    (out / "summary.json").write_text(json.dumps(summary, indent=2))
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
