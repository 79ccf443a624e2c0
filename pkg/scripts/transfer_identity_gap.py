"""Tabulate the two forms of the transfer identity M psi^{i,0} ~ psi^{i,1}.

The untilded form with constant sqrt((K-j)(N-K)) is exact only at j = 0; the
residual grows like sqrt(j).  The form on the tilde vectors, with constant
(N-K-j) sqrt((K-j)/(N-K)), holds for every j.
"""
import argparse

from eigenadversary.combinatorics import enumerate_weight_k
from eigenadversary.conditional import tilde_transfer_residual, transfer_residual, tuples_avoiding


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[8, 10])
    ap.add_argument("--k", type=int, nargs="+", default=[2, 3, 4])
    args = ap.parse_args()
    print("n,k,j,untilded_residual,tilded_residual")
    for n in args.n:
        for k in args.k:
            if 2 * k > n:
                continue
            basis = enumerate_weight_k(n, k)
            for j in range(k):
                tups = tuples_avoiding(basis, 1, j)
                plain = max(transfer_residual(basis, 1, t) for t in tups)
                tilde = max(tilde_transfer_residual(basis, 1, t) for t in tups)
                print(f"{n},{k},{j},{plain:.6g},{tilde:.3g}")


if __name__ == "__main__":
    main()
