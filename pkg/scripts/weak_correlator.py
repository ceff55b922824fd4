"""Weak-measurement correlator with three independently perturbed evolutions."""
import argparse
from pathlib import Path

from otoc_lab.runner import parse_config, run_scenario, write_csv, write_semilog


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--epsilon", type=float, default=0.2)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--out", default="results/weak")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for seed in range(args.seeds):
        cfg = parse_config("weak", overrides=dict(n=args.n, epsilon=args.epsilon, model_seed=seed))
        rec = run_scenario(cfg)
        write_csv(rec, out / f"weak_n{args.n}_seed{seed}.csv")
        write_semilog(rec, out / f"weak_n{args.n}_seed{seed}_semilog.csv")
        print(f"seed {seed}: {rec.wall_clock:.1f} s")


if __name__ == "__main__":
    main()
