"""System chain coupled to an equal environment chain; only the system is reversed."""
import argparse
from pathlib import Path

import numpy as np

from otoc_lab.protocols import estimate_scrambling_time
from otoc_lab.runner import parse_config, run_scenario, write_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-system", type=int, default=7)
    ap.add_argument("--jc", type=float, nargs="+", default=[0.05, 0.1, 0.2])
    ap.add_argument("--t-end", type=float, default=10.0)
    ap.add_argument("--out", default="results/open_system")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for jc in args.jc:
        cfg = parse_config("open-system", overrides=dict(n_system=args.n_system, jc=jc, t_end=args.t_end))
        rec = run_scenario(cfg)
        write_csv(rec, out / f"open_nS{args.n_system}_jc{jc:g}.csv")
        t_star = estimate_scrambling_time(list(zip(rec.t, rec.ideal)))
        sel = rec.t < t_star
        gain = np.abs(rec.imperfect - rec.ideal)[sel].max() - np.abs(rec.renormalized - rec.ideal)[sel].max()
        print(f"Jc={jc:g}: t*={t_star:g}, max-error reduction before t* {gain:.4f}, {rec.wall_clock:.1f} s")


if __name__ == "__main__":
    main()
