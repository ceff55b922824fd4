"""Shock-wave model with timing errors: ideal, unrenormalized and renormalized
curves, plus fitted growth exponents of the deficits."""
import argparse
from pathlib import Path

import numpy as np

from otoc_lab import holographic as holo
from otoc_lab.runner import parse_config, run_scenario, write_csv, write_semilog


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--epsilon", type=float, default=0.1)
    ap.add_argument("--g", type=float, default=1e-5)
    ap.add_argument("--out", default="results/holographic")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rec = run_scenario(parse_config("holographic", overrides=dict(epsilon=args.epsilon, g=args.g)))
    write_csv(rec, out / f"holographic_eps{args.epsilon:g}.csv")
    write_semilog(rec, out / f"holographic_eps{args.epsilon:g}_semilog.csv")

    p = holo.HolographicParams(epsilon=args.epsilon, g=args.g)
    t = np.arange(-5, 40, 0.005)
    for lo, hi in [(1e-6, 1e-3), (1e-3, 1e-1), (1e-1, 0.5)]:
        try:
            s_ren = holo.fit_deficit_exponent(t, holo.renormalized_deficit(p, t), (lo, hi)) / p.rate
            s_id = holo.fit_deficit_exponent(t, holo.ideal_deficit(p, t), (lo, hi)) / p.rate
        except ValueError as e:
            print(f"window [{lo:g}, {hi:g}]: {e}")
            continue
        print(f"window [{lo:g}, {hi:g}]: ideal exponent {s_id:.4f}, renormalized {s_ren:.4f} (units of 2pi/beta)")


if __name__ == "__main__":
    main()
