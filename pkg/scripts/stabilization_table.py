"""Truncated Mackey products for a grid of functor lists, with low-layer images.

usage: python3 scripts/stabilization_table.py [--dmax 4]
"""

import argparse

from mackeyprod.config import parse_functors
from mackeyprod.ffield import make_field
from mackeyprod.mackey import build_presentation, low_layer_image_order

GRID = [(2, "GM,GM"), (3, "GM,GM"), (5, "GM,GM"), (2, "GM,GM,GM"), (3, "GM,GM,GM"),
        (2, "GA,GA"), (3, "GA,GA"), (3, "GA,GM"), (3, "GENJAC:t^2,GENJAC:t^2"), (5, "GA,ELL:1,1")]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dmax", type=int, default=4)
    args = ap.parse_args()
    print(f"{'q':>3}  {'functors':<24} d  {'invariant factors':<28} images of layers <= 1, 2, ...")
    for q, text in GRID:
        F = make_field(q)
        fns = parse_functors(text, F)
        for d in range(1, args.dmax + 1):
            pres = build_presentation(fns, F, d)
            st = pres.structure
            shape = str(st.invariant_factors) + (f" + Z^{st.free_rank}" if st.free_rank else "")
            images = [low_layer_image_order(pres, k) for k in range(1, d + 1)]
            print(f"{q:>3}  {text:<24} {d}  {shape:<28} {images}")


if __name__ == "__main__":
    main()
