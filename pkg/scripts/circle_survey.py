"""Relative / horizontal / basic form dimensions for circle actions, one block per stratum."""
import argparse

from eqhh.groups import CircleAction, circle_singular_points
from eqhh.relforms import basic_forms_table, local_models, theta_injectivity_check, vanishing_ideal_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("weights", nargs="+", type=int)
    ap.add_argument("--kmax", type=int, default=2)
    ap.add_argument("--nmax", type=int, default=4)
    ap.add_argument("--checks", action="store_true", help="also run ideal and Theta checks")
    args = ap.parse_args()
    A = CircleAction(tuple(args.weights))
    print(f"weights {A.weights}, w = {A.w}")
    for s in circle_singular_points(A):
        print(f"  t0 = {s.t0}  K = {[k + 1 for k in s.fixed]}  isotropy {s.isotropy}")
    print()
    print(basic_forms_table(A, args.kmax, args.nmax).to_csv())
    if args.checks:
        for j, where in local_models(A):
            r = vanishing_ideal_check(A, j, args.nmax, where)
            print(("ok  " if r.ok else "FAIL") + " " + r.name, r.witness)
            for k in range(min(args.kmax, 2 * A.m) + 1):
                r = theta_injectivity_check(A, j, k, args.nmax, where)
                print(("ok  " if r.ok else "FAIL") + " " + r.name, r.witness)


if __name__ == "__main__":
    main()
