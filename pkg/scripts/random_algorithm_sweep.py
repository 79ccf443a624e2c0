"""Run many seeded random query algorithms and report the tightest slack seen
in the recurrence, the binomial bound and the success bound."""
import argparse
import time

import numpy as np

from eigenadversary.bounds import binomial_bound_check, recurrence_check, success_bound_check
from eigenadversary.simulator import random_spec, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--n", type=int, nargs="+", default=[6, 8])
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--max-dw", type=int, default=8)
    ap.add_argument("--max-t", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    worst = {"recurrence": np.inf, "binomial": np.inf, "success": np.inf}
    start = time.perf_counter()
    for _ in range(args.runs):
        n, k = int(rng.choice(args.n)), int(rng.choice(args.k))
        d_w, t = int(rng.integers(1, args.max_dw + 1)), int(rng.integers(1, args.max_t + 1))
        res = run(random_spec(n, k, d_w, t, int(rng.integers(2**31))))
        prof = res.profile()
        worst["recurrence"] = min(worst["recurrence"], recurrence_check(prof).worst_slack)
        worst["binomial"] = min(worst["binomial"], binomial_bound_check(prof).worst_slack)
        success = res.success_probability()
        for j_star in range(k):
            sb, _, _ = success_bound_check(prof, success, j_star)
            worst["success"] = min(worst["success"], sb.bound - success)
    print(f"{args.runs} runs in {time.perf_counter() - start:.1f} s")
    for name, slack in worst.items():
        print(f"{name:>10}: worst slack {slack:.3e}")


if __name__ == "__main__":
    main()
