"""HH of polynomial crossed products for a few small groups, per conjugacy class."""
import argparse
import time

from eqhh.groups import close_generators, cyclic_scalar_group
from eqhh.hochschild import brute_crossed_hh0, crossed_product_hh_finite, loop_character_dims


def groups():
    return {
        "z2": close_generators([((-1, 0), (0, -1))]),
        "z3": cyclic_scalar_group(3),
        "z4": cyclic_scalar_group(4),
        "z6x2": cyclic_scalar_group(6, 2),
        "rot4": close_generators([((0, -1), (1, 0))]),
        "s3": close_generators([((0, 1, 0), (1, 0, 0), (0, 0, 1)), ((0, 1, 0), (0, 0, 1), (1, 0, 0))]),
        "d4": close_generators([((0, -1), (1, 0)), ((1, 0), (0, -1))]),
    }


def main():
    gs = groups()
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(gs), choices=list(gs))
    ap.add_argument("--kmax", type=int, default=2)
    ap.add_argument("--nmax", type=int, default=4)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    for name in args.names:
        G = gs[name]
        t = time.perf_counter()
        per, total = crossed_product_hh_finite(G, args.kmax, args.nmax, jobs=args.jobs)
        chars = loop_character_dims(G, args.kmax, args.nmax)
        h0 = [brute_crossed_hh0(G, n) for n in range(min(args.nmax, 3) + 1)]
        print(f"# {name}: |G| = {G.order}, {len(per)} classes on {G.space}")
        for rep in per + [total]:
            rows = [[rep.dims.get((k, n), "") for n in range(args.nmax + 1)] for k in range(args.kmax + 1)]
            print(f"  {rep.stratum:28s} " + " | ".join(" ".join(f"{x:>2}" for x in r) for r in rows))
        print(f"  character average agrees: {chars == total.dims};  brute HH0 {h0}")
        print(f"# {time.perf_counter() - t:.2f}s\n")


if __name__ == "__main__":
    main()
