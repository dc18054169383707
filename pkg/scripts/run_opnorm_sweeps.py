#!/usr/bin/env python3
"""Sweep convolution-operator norm brackets across degrees and tabulate the
fitted growth exponents against the A(alpha, p/2, n) envelope."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from crossflat.special import JacobiParams
from crossflat.torus import envelope_A, fit_exponent, opnorm_bracket

CONFIGS = [(1.0, 1.0, 8.0), (1.5, 1.5, 6.0), (0.5, 0.5, 6.0), (0.5, 0.5, 2.0)]


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n-max", type=int, default=4096)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default="results/opnorm_sweeps.csv")
    args = parser.parse_args()

    ns = [n for n in (64, 128, 256, 512, 1024, 2048, 4096) if n <= args.n_max]
    lines = ["alpha,beta,p,n,lower,upper,envelope,ratio"]
    for alpha, beta, p in CONFIGS:
        params = JacobiParams.of(alpha, beta)
        uppers = []
        for n in ns:
            bracket = opnorm_bracket(params, n, p, seed=args.seed)
            env = envelope_A(alpha, p / 2.0, n)
            uppers.append((n, bracket.upper))
            lines.append(
                f"{alpha:g},{beta:g},{p:g},{n},{bracket.lower:.17g},"
                f"{bracket.upper:.17g},{env:.17g},{bracket.upper / env:.17g}"
            )
        slope = fit_exponent(uppers).slope
        kink = 1.0 / (alpha + 0.5)
        expected = -0.5 if p / 2.0 <= kink else alpha - 2.0 / p
        print(f"alpha={alpha:g} p={p:g}: upper slope {slope:+.4f} (envelope exponent {expected:+.4f})")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
