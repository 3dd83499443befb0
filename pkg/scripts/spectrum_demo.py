"""Walk one Singer element through the spectral model.

Builds a cyclically regular element of GL_d(F_q) from a seeded primitive
element, prints the spectrum of every requested induced module next to the
predicted exponents, and decodes each exponent into its digit vector. The
transcript is the hand-checkable version of what the rewriting pipeline
consumes blindly.
"""

import argparse

from sympy import factorint

from singerlab import (
    exponent_and_digits,
    field_ctx,
    make_singer,
    parse_module_spec,
    spectrum_on_module,
    verify_model_match,
    verify_simple_spectrum,
)
from singerlab.singer import Match, Simple


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=7)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument(
        "--spec",
        action="append",
        default=None,
        help="factor list such as 'sym(2)' (repeatable; default nat, sym(2), sym(3))",
    )
    args = ap.parse_args()

    ctx = field_ctx(*_tower(args.q), args.d)
    s = make_singer(ctx, args.seed)
    print(f"field tower: F_{ctx.base.order} inside F_{ctx.ext.order}, d = {ctx.d}")
    print(f"primitive element code: {s.omega}")
    print(f"companion matrix rows: {[list(map(int, r)) for r in s.S.a]}")

    for text in args.spec or ["nat", "sym(2)", "sym(3)"]:
        spec = parse_module_spec(text, q=args.q, d=args.d)
        print(f"\n{spec.text()}")
        for lam, mult in spectrum_on_module(s, spec):
            E, digits = exponent_and_digits(lam, s.omega, ctx)
            print(
                f"  eigenvalue {lam:>6}  multiplicity {mult}"
                f"  = omega^{E:<6} digits {tuple(digits)}"
            )
        match = verify_model_match(s, spec)
        simple = verify_simple_spectrum(s, spec)
        print(f"  model match: {'yes' if isinstance(match, Match) else match}")
        print(f"  simple spectrum: {'yes' if isinstance(simple, Simple) else simple}")


def _tower(q: int) -> tuple[int, int]:
    fac = factorint(q)
    if len(fac) != 1:
        raise SystemExit(f"q = {q} is not a prime power")
    [(p, f)] = fac.items()
    return p, f


if __name__ == "__main__":
    main()
