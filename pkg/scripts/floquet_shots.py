"""Floquet model with fresh perturbations every shot; numerator and denominator
are averaged separately before dividing."""
import argparse
from pathlib import Path

from otoc_lab.runner import parse_config, run_scenario, write_csv, write_semilog


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--shots", type=int, default=100)
    ap.add_argument("--epsilon", type=float, nargs="+", default=[0.1, 0.2])
    ap.add_argument("--t-end", type=float, default=20.0)
    ap.add_argument("--out", default="results/floquet")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for eps in args.epsilon:
        cfg = parse_config("floquet-shots", overrides=dict(n=args.n, n_shots=args.shots, epsilon=eps, t_end=args.t_end))
        rec = run_scenario(cfg)
        write_csv(rec, out / f"floquet_n{args.n}_eps{eps:g}.csv")
        write_semilog(rec, out / f"floquet_n{args.n}_eps{eps:g}_semilog.csv")
        print(f"eps={eps:g}: {args.shots} shots in {rec.wall_clock:.1f} s")


if __name__ == "__main__":
    main()
