"""Time exact rank on the largest graded pieces we actually meet (bar complex, cyclotomic twists)."""
import argparse
import time

from eqhh import config
from eqhh.forms import ComplexPairs, full_matrix
from eqhh.groups import CircleAction
from eqhh.hochschild import bar_dim, bar_matrix
from eqhh.linalg import rank


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--weights", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--j", type=int, default=1)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--dense-threshold", type=int, default=None)
    args = ap.parse_args()
    if args.dense_threshold is not None:
        config.set_guards(config.Guards(dense_threshold=args.dense_threshold))
    A = CircleAction(tuple(args.weights))
    H = full_matrix(ComplexPairs(A.m), A.element(args.j))
    nv = 2 * A.m
    for k in (args.k, args.k + 1):
        M = bar_matrix(H, nv, k, args.n)
        t = time.perf_counter()
        r = rank(M)
        print(f"b_{k} on degree {args.n}: {M.rows}x{M.cols} nnz={len(M.entries)} rank={r} "
              f"({time.perf_counter() - t:.2f}s)")
    print("bar dims", [bar_dim(nv, k, args.n) for k in range(args.k + 2)])


if __name__ == "__main__":
    main()
