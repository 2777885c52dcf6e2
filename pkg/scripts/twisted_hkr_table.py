"""Koszul homology, bar homology and the fixed-point closed form side by side."""
import argparse
import time
from math import comb

from eqhh.forms import ComplexPairs, Real
from eqhh.hochschild import brute_twisted_hh
from eqhh.koszul import build_twisted_koszul, homology
from eqhh.scalars import zeta

TWISTS = {
    "id2": (Real(2), ((1, 0), (0, 1)), 2),
    "neg1": (Real(1), ((-1,),), 0),
    "neg2": (Real(2), ((-1, 0), (0, -1)), 0),
    "rot3": (ComplexPairs(1), ((zeta(3),),), 0),
    "rot4": (ComplexPairs(1), ((zeta(4),),), 0),
    "block": (Real(3), ((-1, 0, 0), (0, -1, 0), (0, 0, 1)), 1),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("twists", nargs="*", default=list(TWISTS), choices=list(TWISTS))
    ap.add_argument("--kmax", type=int, default=2)
    ap.add_argument("--nmax", type=int, default=4)
    ap.add_argument("--no-bar", action="store_true", help="skip the bar-complex oracle")
    args = ap.parse_args()
    for name in args.twists:
        sp, h, f = TWISTS[name]
        t = time.perf_counter()
        K = homology(build_twisted_koszul(h, args.nmax, sp), args.kmax, args.nmax)
        print(f"# {name} on {sp}, dim V^h = {f}")
        print(" k  n  koszul   bar  closed")
        for (k, n), d in sorted(K.dims.items(), key=lambda t: (t[0][1], t[0][0])):
            bar = "-" if args.no_bar else brute_twisted_hh(h, k, n, sp)
            closed = comb(f, k) * comb(n - k + f - 1, f - 1) if f else int(k == n == 0)
            flag = "" if d == closed and (args.no_bar or bar == d) else "   <-- mismatch"
            print(f"{k:2d} {n:2d} {d:7d} {bar:>5} {closed:7d}{flag}")
        print(f"# {time.perf_counter() - t:.2f}s\n")


if __name__ == "__main__":
    main()
