"""Degree by which the layers of degree <= k die in the n-fold product of GM.

Uses the closed-form presentation (no field arithmetic), so large degree
bounds are cheap.  A finite entry means those layers vanish in the colimit.

usage: python3 scripts/torus_vanishing.py [--limit 120] [--q 2 3 5]

The full default grid takes a few minutes (q = 5, n = 3 needs degree 93).
"""

import argparse

from mackeyprod.mackey import gm_power_vanishing_bound


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--limit", type=int, default=120)
    ap.add_argument("--q", type=int, nargs="*", default=[2, 3, 4, 5, 7, 9])
    args = ap.parse_args()
    print(f"{'q':>3} {'n':>2}  k=1  k=2  k=3")
    for q in args.q:
        for n in (2, 3):
            row = [gm_power_vanishing_bound(q, n, k, args.limit) for k in (1, 2, 3)]
            print(f"{q:>3} {n:>2}  " + "  ".join(f"{'-' if b is None else b:>3}" for b in row))


if __name__ == "__main__":
    main()
