"""Sweep the digit-cap injectivity guarantee over a grid of bases.

For every q and dimension d in range, all caps C below q - 1 must make the
exponent map injective on (C+1)^d vectors; C = q - 1 always collides (the
zero vector meets a vector summing to a multiple of q - 1), and the script
prints that witness for each row to show the bound is sharp.
"""

import argparse

from singerlab.digitmap import Collision, Injective, check_injectivity


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q-max", type=int, default=9)
    ap.add_argument("--d-max", type=int, default=4)
    args = ap.parse_args()

    print(f"{'q':>3} {'d':>3} {'caps below q-1':>15} {'boundary collision at C = q-1'}")
    for q in range(3, args.q_max + 1):
        for d in range(1, args.d_max + 1):
            checked = 0
            for C in range(q - 1):
                res = check_injectivity(q, d, C)
                assert isinstance(res, Injective), (q, d, C, res)
                checked += res.count
            boundary = check_injectivity(q, d, q - 1)
            assert isinstance(boundary, Collision), (q, d, boundary)
            note = (
                f"{tuple(boundary.first)} and {tuple(boundary.second)}"
                f" share residue {boundary.residue}"
            )
            print(f"{q:>3} {d:>3} {checked:>15} {note}")


if __name__ == "__main__":
    main()
