"""Exact arithmetic for prime fields, extension fields, and polynomials over them.

Elements of F_{p^m} are stored as integer codes: the element with
coefficient vector (c_0, ..., c_{m-1}) in the fixed polynomial basis is the
integer sum c_i * p^i, in [0, p^m). Code 0 is zero, code 1 is one, and for
prime fields the code is just the residue. All operations are pure; the one
randomized routine (equal-degree splitting) draws from a PRNG seeded by the
polynomial's own content, so factoring is a deterministic function.

Polynomials are tuples of codes, lowest degree first, with no trailing
zeros (the zero polynomial is the empty tuple).
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Iterator

from sympy import factorint

from .errors import (
    CapacityExceeded,
    DivisionByZero,
    FieldMismatch,
    InvalidInput,
    NotInSubgroup,
    NotPrimitive,
)

DensePoly = tuple[int, ...]

# Fields up to this order precompute exp/log tables for O(1) mul/inv/pow.
TABLE_LIMIT = 2**16

# discrete_log refuses fields larger than this (desk-scale contract).
DLOG_LIMIT = 2**48


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    fac = factorint(n)
    return len(fac) == 1 and fac[n] == 1


class Field:
    """Arithmetic context for F_{p^m} on integer-coded elements."""

    def __init__(self, p: int, m: int = 1, modulus: DensePoly | None = None):
        if not _is_prime(p):
            raise InvalidInput(f"characteristic {p} is not prime")
        if m < 1:
            raise InvalidInput(f"extension degree {m} must be positive")
        self.p = p
        self.m = m
        self.order = p**m
        if m == 1:
            self.modulus: DensePoly = (0, 1)
        elif modulus is not None:
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise InvalidInput("modulus must be monic of degree m")
            self.modulus = tuple(int(c) % p for c in modulus[:-1]) + (1,)
        else:
            self.modulus = find_irreducible(p, m)
        # low-first base-p digit weights, reused by encode/decode
        self._weights = tuple(p**i for i in range(m))
        self._exp: list[int] | None = None
        self._log: dict[int, int] | None = None
        self._generator: int | None = None
        if m > 1 and self.order <= TABLE_LIMIT:
            self._build_tables()

    # -- identity ----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Field)
            and self.p == other.p
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.modulus))

    def __repr__(self) -> str:
        if self.m == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^{self.m}"

    # -- encoding ----------------------------------------------------------

    def decode(self, code: int) -> tuple[int, ...]:
        """Coefficient vector (c_0, ..., c_{m-1}) of a code."""
        p = self.p
        return tuple((code // w) % p for w in self._weights)

    def encode(self, coeffs: tuple[int, ...]) -> int:
        return sum((c % self.p) * w for c, w in zip(coeffs, self._weights))

    def elements(self) -> Iterator[int]:
        return iter(range(self.order))

    def check(self, code: int) -> int:
        if not 0 <= code < self.order:
            raise InvalidInput(f"code {code} out of range for {self!r}")
        return code

    # -- arithmetic --------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        p = self.p
        if self.m == 1:
            return (a + b) % p
        out = 0
        for w in self._weights:
            out += (((a // w) + (b // w)) % p) * w
        return out

    def neg(self, a: int) -> int:
        p = self.p
        if self.m == 1:
            return (-a) % p
        out = 0
        for w in self._weights:
            out += ((-(a // w)) % p) * w
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            n1 = self.order - 1
            return self._exp[(self._log[a] + self._log[b]) % n1]
        return self._polymul_code(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"inverse of zero in {self!r}")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        if self._exp is not None:
            n1 = self.order - 1
            return self._exp[(n1 - self._log[a]) % n1]
        # extended Euclid on (element, modulus) over F_p
        return self._poly_inv_code(a)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 0 if e else 1
        if self.m == 1:
            return pow(a, e, self.p)
        if self._exp is not None:
            n1 = self.order - 1
            return self._exp[(self._log[a] * e) % n1]
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    # -- generator / tables --------------------------------------------------

    @property
    def generator(self) -> int:
        """A fixed primitive element (smallest code that generates F*)."""
        if self._generator is None:
            self._generator = self._find_generator()
        return self._generator

    def _find_generator(self) -> int:
        n1 = self.order - 1
        primes = list(factorint(n1))
        start = 2 if self.m == 1 else self.p
        for cand in range(start, self.order):
            if all(self.pow(cand, n1 // r) != 1 for r in primes):
                return cand
        raise AssertionError("no generator found; field construction is broken")

    def _build_tables(self) -> None:
        n1 = self.order - 1
        g = self._search_generator_bare()
        exp = [1] * n1
        acc = 1
        for i in range(1, n1):
            acc = self._polymul_code(acc, g)
            exp[i] = acc
        log = {c: i for i, c in enumerate(exp)}
        self._exp, self._log, self._generator = exp, log, g

    def _search_generator_bare(self) -> int:
        # table-free generator search used once during table construction
        n1 = self.order - 1
        primes = list(factorint(n1))
        for cand in range(self.p, self.order):
            ok = True
            for r in primes:
                e, acc, base = n1 // r, 1, cand
                while e:
                    if e & 1:
                        acc = self._polymul_code(acc, base)
                    base = self._polymul_code(base, base)
                    e >>= 1
                if acc == 1:
                    ok = False
                    break
            if ok:
                return cand
        raise AssertionError("no generator found; modulus is not irreducible?")

    # -- untabled polynomial-basis arithmetic --------------------------------

    def _polymul_code(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        da = self.decode(a)
        db = self.decode(b)
        prod = [0] * (2 * m - 1)
        for i, ca in enumerate(da):
            if ca:
                for j, cb in enumerate(db):
                    prod[i + j] = (prod[i + j] + ca * cb) % p
        # reduce mod modulus
        mod = self.modulus
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for j in range(m):
                    prod[k - m + j] = (prod[k - m + j] - c * mod[j]) % p
        return self.encode(tuple(prod[:m]))

    def _poly_inv_code(self, a: int) -> int:
        fp = Field(self.p)
        r0: DensePoly = self.modulus
        r1 = poly_trim(self.decode(a))
        s0: DensePoly = ()
        s1: DensePoly = (1,)
        while r1:
            q, r = poly_divmod(fp, r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, poly_sub(fp, s0, poly_mul(fp, q, s1))
        # r0 = gcd = nonzero constant since the modulus is irreducible
        c = fp.inv(r0[0])
        s0 = poly_mod(fp, s0, self.modulus)
        padded = tuple(s0) + (0,) * (self.m - len(s0))
        return self.encode(tuple(fp.mul(c, x) for x in padded))


@dataclass(frozen=True)
class FieldElement:
    """Thin wrapper pairing a code with its field, for API and test ergonomics."""

    field: Field
    code: int

    def __post_init__(self) -> None:
        self.field.check(self.code)

    def _peer(self, other: "FieldElement") -> int:
        if self.field != other.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
        return other.code

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field, self.field.add(self.code, self._peer(other)))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field, self.field.sub(self.code, self._peer(other)))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field, self.field.mul(self.code, self._peer(other)))

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field, self.field.div(self.code, self._peer(other)))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, self.field.neg(self.code))

    def __pow__(self, e: int) -> "FieldElement":
        return FieldElement(self.field, self.field.pow(self.code, e))

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.decode(self.code)


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Single-entry arithmetic dispatch on wrapped elements."""
    if op == "neg":
        return -a
    if op == "inv":
        return FieldElement(a.field, a.field.inv(a.code))
    if b is None:
        raise InvalidInput(f"binary op {op!r} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise InvalidInput(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# polynomials over a Field, as trimmed low-first code tuples
# ---------------------------------------------------------------------------


def poly_trim(c) -> DensePoly:
    c = tuple(c)
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return c[:n]


def poly_deg(a: DensePoly) -> int:
    return len(a) - 1  # zero polynomial gets -1


def poly_add(F: Field, a: DensePoly, b: DensePoly) -> DensePoly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return poly_trim(out)


def poly_neg(F: Field, a: DensePoly) -> DensePoly:
    return tuple(F.neg(c) for c in a)


def poly_sub(F: Field, a: DensePoly, b: DensePoly) -> DensePoly:
    return poly_add(F, a, poly_neg(F, b))


def poly_scale(F: Field, c: int, a: DensePoly) -> DensePoly:
    if c == 0:
        return ()
    return tuple(F.mul(c, x) for x in a)


def poly_mul(F: Field, a: DensePoly, b: DensePoly) -> DensePoly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] = F.add(out[i + j], F.mul(ca, cb))
    return poly_trim(out)


def poly_divmod(F: Field, a: DensePoly, b: DensePoly) -> tuple[DensePoly, DensePoly]:
    if not b:
        raise DivisionByZero("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    rem = list(a)
    quo = [0] * (len(a) - len(b) + 1)
    inv_lead = F.inv(b[-1])
    for k in range(len(a) - len(b), -1, -1):
        c = F.mul(rem[k + len(b) - 1], inv_lead)
        if c:
            quo[k] = c
            for j, cb in enumerate(b):
                rem[k + j] = F.sub(rem[k + j], F.mul(c, cb))
    return poly_trim(quo), poly_trim(rem)


def poly_mod(F: Field, a: DensePoly, b: DensePoly) -> DensePoly:
    return poly_divmod(F, a, b)[1]


def poly_monic(F: Field, a: DensePoly) -> DensePoly:
    if not a:
        return a
    if a[-1] == 1:
        return a
    return poly_scale(F, F.inv(a[-1]), a)


def poly_gcd(F: Field, a: DensePoly, b: DensePoly) -> DensePoly:
    while b:
        a, b = b, poly_mod(F, a, b)
    return poly_monic(F, a)


def poly_eval(F: Field, a: DensePoly, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def poly_deriv(F: Field, a: DensePoly) -> DensePoly:
    out = []
    for i in range(1, len(a)):
        out.append(F.mul(i % F.p, a[i]))
    return poly_trim(out)


def poly_pow_mod(F: Field, base: DensePoly, e: int, mod: DensePoly) -> DensePoly:
    result: DensePoly = (1,)
    base = poly_mod(F, base, mod)
    while e:
        if e & 1:
            result = poly_mod(F, poly_mul(F, result, base), mod)
        base = poly_mod(F, poly_mul(F, base, base), mod)
        e >>= 1
    return result


# ---------------------------------------------------------------------------
# irreducibles and factorization
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def find_irreducible(p: int, n: int) -> DensePoly:
    """Lexicographically smallest monic irreducible of degree n over F_p.

    Coefficient vectors (c_0, ..., c_{n-1}) are compared from the constant
    term upward; x itself wins for n = 1.
    """
    if n < 1:
        raise InvalidInput("degree must be positive")
    if n == 1:
        return (0, 1)
    fp = Field(p)
    n_primes = list(factorint(n))
    for t in range(p**n):
        # digit c_0 is the most significant so that t-order equals lex order
        coeffs = tuple((t // p ** (n - 1 - i)) % p for i in range(n))
        if coeffs[0] == 0:
            continue  # divisible by x
        f = coeffs + (1,)
        if _rabin_irreducible(fp, f, n, n_primes):
            return f
    raise AssertionError("no irreducible found; unreachable for n >= 1")


def _rabin_irreducible(fp: Field, f: DensePoly, n: int, n_primes: list[int]) -> bool:
    p = fp.p
    x: DensePoly = (0, 1)
    for r in n_primes:
        h = poly_sub(fp, poly_pow_mod(fp, x, p ** (n // r), f), x)
        if poly_deg(poly_gcd(fp, f, h)) != 0:
            return False
    return poly_sub(fp, poly_pow_mod(fp, x, p**n, f), x) == ()


def _edf_rng(F: Field, f: DensePoly) -> random.Random:
    blob = repr((F.p, F.m, F.modulus, f)).encode()
    return random.Random(int.from_bytes(hashlib.sha256(blob).digest()[:8], "big"))


def _random_poly(F: Field, deg_below: int, rng: random.Random) -> DensePoly:
    return poly_trim(tuple(rng.randrange(F.order) for _ in range(deg_below)))


def _pth_root_poly(F: Field, f: DensePoly) -> DensePoly:
    # f = h(x^p); coefficients need an inverse Frobenius: c -> c^(p^(m-1))
    p = F.p
    e = p ** (F.m - 1)
    out = []
    for i in range(0, len(f), p):
        out.append(F.pow(f[i], e))
    return poly_trim(out)


def _squarefree_parts(F: Field, f: DensePoly) -> list[tuple[DensePoly, int]]:
    parts: list[tuple[DensePoly, int]] = []

    def walk(g: DensePoly, mult: int) -> None:
        if poly_deg(g) < 1:
            return
        dg = poly_deriv(F, g)
        if not dg:
            walk(_pth_root_poly(F, g), mult * F.p)
            return
        c = poly_gcd(F, g, dg)
        w = poly_divmod(F, g, c)[0]
        i = 1
        while poly_deg(w) > 0:
            y = poly_gcd(F, w, c)
            z = poly_divmod(F, w, y)[0]
            if poly_deg(z) > 0:
                parts.append((z, mult * i))
            w = y
            c = poly_divmod(F, c, y)[0]
            i += 1
        if poly_deg(c) > 0:
            walk(_pth_root_poly(F, c), mult * F.p)

    walk(poly_monic(F, f), 1)
    return parts


def _ddf(F: Field, f: DensePoly) -> list[tuple[DensePoly, int]]:
    """Split a monic squarefree f into (product of irreducibles of degree i, i)."""
    out: list[tuple[DensePoly, int]] = []
    x: DensePoly = (0, 1)
    h = x
    i = 0
    while poly_deg(f) >= 2 * (i + 1):
        i += 1
        h = poly_pow_mod(F, h, F.order, f)
        g = poly_gcd(F, f, poly_sub(F, h, x))
        if poly_deg(g) > 0:
            out.append((g, i))
            f = poly_divmod(F, f, g)[0]
            h = poly_mod(F, h, f)
    if poly_deg(f) > 0:
        out.append((f, poly_deg(f)))
    return out


def _edf(F: Field, f: DensePoly, e: int, rng: random.Random) -> list[DensePoly]:
    """Equal-degree splitting of a monic squarefree product of degree-e irreducibles."""
    n = poly_deg(f)
    if n == e:
        return [f]
    q = F.order
    while True:
        r = _random_poly(F, n, rng)
        if poly_deg(r) < 1:
            continue
        if F.p == 2:
            # trace map to F_2 splits in characteristic 2
            t = r
            acc = r
            for _ in range(e * F.m - 1):
                acc = poly_mod(F, poly_mul(F, acc, acc), f)
                t = poly_add(F, t, acc)
            g = poly_gcd(F, f, t)
        else:
            s = poly_pow_mod(F, r, (q**e - 1) // 2, f)
            g = poly_gcd(F, f, poly_sub(F, s, (1,)))
        if 0 < poly_deg(g) < n:
            left = _edf(F, g, e, rng)
            right = _edf(F, poly_divmod(F, f, g)[0], e, rng)
            return left + right


def factor_poly(F: Field, g: DensePoly) -> list[tuple[DensePoly, int]]:
    """Full factorization into monic irreducibles with multiplicities.

    Factors are ordered by degree, then lexicographically by coefficient
    vector from the constant term up. The product of the factors times the
    leading coefficient of g reproduces g.
    """
    g = poly_trim(g)
    if not g:
        raise InvalidInput("cannot factor the zero polynomial")
    if poly_deg(g) == 0:
        return []
    factors: list[tuple[DensePoly, int]] = []
    for part, mult in _squarefree_parts(F, g):
        for prod, e in _ddf(F, part):
            rng = _edf_rng(F, prod)
            for irr in _edf(F, prod, e, rng):
                factors.append((irr, mult))
    factors.sort(key=lambda fm: (poly_deg(fm[0]), fm[0]))
    return factors


def find_roots(F: Field, g: DensePoly) -> list[tuple[int, int]]:
    """Roots of g in F itself, as (root, multiplicity), sorted by coefficient vector."""
    out = []
    for f, mult in factor_poly(F, g):
        if poly_deg(f) == 1:
            out.append((F.neg(f[0]), mult))
    out.sort(key=lambda rm: F.decode(rm[0]))
    return out


# ---------------------------------------------------------------------------
# the tower F_p < F_q < F_{q^d}
# ---------------------------------------------------------------------------


class FieldCtx:
    """The field tower for a given (p, f, d), with an explicit embedding.

    base is F_q with q = p^f, ext is F_{q^d}; both use the lexicographically
    smallest monic irreducible modulus over F_p. The embedding sends the
    canonical generator of base to the root of base's modulus inside ext
    with the smallest coefficient vector.
    """

    def __init__(self, p: int, f: int, d: int):
        if f < 1 or d < 1:
            raise InvalidInput("extension degrees must be positive")
        self.p, self.f, self.d = p, f, d
        self.q = p**f
        self.base = Field(p, f)
        self.ext = Field(p, f * d)
        self._embed_table = self._build_embedding()
        self._embed_inverse = {v: k for k, v in self._embed_table.items()}

    @property
    def defining_poly_q(self) -> DensePoly:
        return self.base.modulus

    @property
    def defining_poly_qd(self) -> DensePoly:
        return self.ext.modulus

    def _build_embedding(self) -> dict[int, int]:
        if self.f == 1:
            return {c: c for c in range(self.p)}
        # base modulus has F_p coefficients, which are valid ext codes as-is
        g_in_ext: DensePoly = self.base.modulus
        roots = [r for r, _ in find_roots(self.ext, g_in_ext)]
        if not roots:
            raise AssertionError("base modulus has no root in ext; tower is broken")
        r = min(roots, key=self.ext.decode)
        table = {}
        for code in range(self.base.order):
            acc, xpow = 0, 1
            for c in self.base.decode(code):
                if c:
                    acc = self.ext.add(acc, self.ext.mul(c, xpow))
                xpow = self.ext.mul(xpow, r)
            table[code] = acc
        return table

    def embed(self, a: int) -> int:
        """Ring embedding F_q -> F_{q^d} on codes."""
        return self._embed_table[a]

    def unembed(self, a: int) -> int:
        """Inverse of embed on its image; raises if a is not in the image."""
        try:
            return self._embed_inverse[a]
        except KeyError:
            raise InvalidInput(f"ext code {a} is not in the embedded base field") from None

    def in_base_image(self, a: int) -> bool:
        return a in self._embed_inverse

    def embed_poly(self, g: DensePoly) -> DensePoly:
        return tuple(self.embed(c) for c in g)

    def frobenius(self, x: int, e: int) -> int:
        """x^(q^e) in ext, with e reduced mod d (negative e allowed)."""
        return self.ext.pow(x, self.q ** (e % self.d))

    def min_poly_over_base(self, x: int) -> DensePoly:
        """Minimal polynomial of x in ext over F_q, coefficients as base codes."""
        conjugates = []
        y = x
        while y not in conjugates:
            conjugates.append(y)
            y = self.frobenius(y, 1)
        poly: DensePoly = (1,)
        for c in conjugates:
            poly = poly_mul(self.ext, poly, (self.ext.neg(c), 1))
        return tuple(self.unembed(c) for c in poly)


@lru_cache(maxsize=None)
def field_ctx(p: int, f: int, d: int) -> FieldCtx:
    return FieldCtx(p, f, d)


def roots_in_extension(ctx: FieldCtx, g: DensePoly) -> list[tuple[int, int]]:
    """All roots of g (over F_q) lying in F_{q^d}, as (ext code, multiplicity).

    Roots of an irreducible degree-e factor of g appear exactly when e
    divides d. Ordering follows factor order, then coefficient vectors.
    """
    g = poly_trim(g)
    if not g:
        raise InvalidInput("cannot take roots of the zero polynomial")
    out: list[tuple[int, int]] = []
    for f, mult in factor_poly(ctx.base, g):
        e = poly_deg(f)
        if ctx.d % e:
            continue
        emb = ctx.embed_poly(f)
        for root, rmult in find_roots(ctx.ext, emb):
            out.append((root, mult * rmult))
    return out


# ---------------------------------------------------------------------------
# orders and discrete logarithms
# ---------------------------------------------------------------------------


def element_order(F: Field, x: int) -> int:
    """Multiplicative order, via the factorization of the group order."""
    if x == 0:
        raise InvalidInput("the zero element has no multiplicative order")
    n = F.order - 1
    o = n
    for r in factorint(n):
        while o % r == 0 and F.pow(x, o // r) == 1:
            o //= r
    return o


def is_primitive(F: Field, x: int) -> bool:
    if x == 0:
        return False
    n = F.order - 1
    return all(F.pow(x, n // r) != 1 for r in factorint(n))


def _bsgs(F: Field, target: int, base: int, n: int) -> int:
    """Baby-step/giant-step in the order-n cyclic group generated by base."""
    m = isqrt(n - 1) + 1
    if m > 2**24:
        raise CapacityExceeded(f"baby-step table of size {m} exceeds the desk-scale budget")
    table = {}
    e = 1
    for j in range(m):
        table.setdefault(e, j)
        e = F.mul(e, base)
    giant = F.inv(e)  # base^(-m)
    y = target
    for i in range(m):
        j = table.get(y)
        if j is not None:
            return i * m + j
        y = F.mul(y, giant)
    raise NotInSubgroup("target is not a power of the base")


def discrete_log(F: Field, target: int, base: int) -> int:
    """Smallest E >= 0 with base^E = target, by Pohlig-Hellman over ord(base)."""
    if base == 0:
        raise InvalidInput("discrete log base must be nonzero")
    if target == 0:
        raise NotInSubgroup("zero is not a power of a nonzero base")
    if F.order > DLOG_LIMIT:
        raise CapacityExceeded(f"field order {F.order} exceeds the discrete-log budget")
    n = element_order(F, base)
    if F.pow(target, n) != 1:
        raise NotInSubgroup("target order does not divide the base order")
    residues: list[tuple[int, int]] = []
    for r, a in factorint(n).items():
        ra = r**a
        # digits of E mod r^a, lifted one r-adic digit at a time
        gamma = F.pow(base, n // r)  # order r
        e_mod = 0
        for k in range(a):
            h = F.pow(
                F.mul(target, F.inv(F.pow(base, e_mod))),
                n // r ** (k + 1),
            )
            dk = _bsgs(F, h, gamma, r)
            e_mod += dk * r**k
        residues.append((e_mod, ra))
    # CRT over prime-power moduli
    e, mod = 0, 1
    for (ri, mi) in residues:
        t = ((ri - e) * pow(mod, -1, mi)) % mi
        e += mod * t
        mod *= mi
    if F.pow(base, e) != target:
        raise NotInSubgroup("target is not a power of the base")
    return e % n
