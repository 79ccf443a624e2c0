"""Progress profile of Grover search as the iteration count grows, next to the
closed-form success probability and the success bound at j* = 0."""
import argparse

from eigenadversary.bounds import success_bound
from eigenadversary.simulator import grover_closed_form, grover_spec, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--max-t", type=int, default=4)
    args = ap.parse_args()
    print("t,success,closed_form,q_T1,bound")
    for t in range(args.max_t + 1):
        res = run(grover_spec(args.n, 1, t))
        sb = success_bound(res.profile(), 0)
        print(f"{t},{res.success_probability():.9f},{grover_closed_form(args.n, t):.9f},{sb.tail:.6f},{sb.bound:.6f}")


if __name__ == "__main__":
    main()
