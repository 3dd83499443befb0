"""Module construction: tensor products of natural, symmetric-power, and
exterior-power factors, each with an optional Frobenius twist.

A ModuleSpec fixes the ambient dimension d, the field size q, and an ordered
factor list. Basis labels are per-factor index tuples (multisets for Sym,
increasing subsets for Ext), combined left-factor-major; each label carries
an aggregated digit vector obtained by shifting every factor's digit counts
by its twist. induced_matrix(spec, A) is the matrix functor itself.

Sym(k) uses the convention pinned by the d=2 example

    [[a^2, 2ab, b^2], [ac, ad+bc, bd], [c^2, 2cd, d^2]],

equivalently entry[N, M] = mult(M)/mult(N) * (coefficient of x^N in
prod_{j in M} sum_i A[i,j] x_i), with mult the multinomial count of a
multiset. Both mult values are invertible mod p because k < p is required.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from math import comb, factorial
from typing import Iterator

import numpy as np

from .digitmap import DigitVector, twisted_aggregate
from .errors import InvalidInput, ShapeMismatch, UnsupportedFactor
from .matfq import Matrix, kron

KINDS = ("nat", "sym", "ext")


@dataclass(frozen=True)
class FactorSpec:
    """One tensor factor: kind in {nat, sym, ext}, power k, Frobenius twist."""

    kind: str
    k: int = 1
    twist: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown factor kind {self.kind!r}")
        if self.kind == "nat" and self.k != 1:
            raise InvalidInput("natural factors have no power parameter")
        if self.k < 1 or self.twist < 0:
            raise InvalidInput("factor power must be >= 1 and twist >= 0")

    @property
    def degree(self) -> int:
        return self.k

    def text(self) -> str:
        body = "nat" if self.kind == "nat" else f"{self.kind}({self.k})"
        return f"{body}@{self.twist}"


@dataclass(frozen=True)
class ModuleSpec:
    """A tensor module over F_q^d given by an ordered list of factors."""

    d: int
    q: int
    factors: tuple[FactorSpec, ...]

    def __post_init__(self) -> None:
        if self.d < 1 or self.q < 2:
            raise InvalidInput("need d >= 1 and q >= 2")

    def text(self) -> str:
        inner = ",".join(f.text() for f in self.factors)
        return f"d={self.d} q={self.q} factors=[{inner}]"


_FACTOR_RE = re.compile(r"^(nat|sym|ext)(?:\((\d+)\))?(?:@(\d+))?$")


def parse_factor(token: str) -> FactorSpec:
    m = _FACTOR_RE.match(token.strip())
    if not m:
        raise InvalidInput(f"cannot parse factor {token!r}")
    kind, k, e = m.group(1), m.group(2), m.group(3)
    if kind == "nat" and k is not None:
        raise InvalidInput("nat takes no power; write nat or nat@e")
    if kind != "nat" and k is None:
        raise InvalidInput(f"{kind} needs a power, e.g. {kind}(2)")
    return FactorSpec(kind, int(k) if k else 1, int(e) if e else 0)


def parse_module_spec(text: str, q: int | None = None, d: int | None = None) -> ModuleSpec:
    """Parse 'd=3 q=7 factors=[sym(2)@0]' or a bare factor list with q, d given."""
    text = text.strip()
    m = re.match(r"^d=(\d+)\s+q=(\d+)\s+factors=\[(.*)\]$", text)
    if m:
        d, q, inner = int(m.group(1)), int(m.group(2)), m.group(3)
    else:
        if q is None or d is None:
            raise InvalidInput("bare factor lists need explicit q and d")
        inner = text.strip("[]")
    tokens = [t for t in inner.split(",") if t.strip()]
    return ModuleSpec(d, q, tuple(parse_factor(t) for t in tokens))


# ---------------------------------------------------------------------------
# dimensions, labels, degrees
# ---------------------------------------------------------------------------


def factor_dim(f: FactorSpec, d: int) -> int:
    if f.kind == "nat":
        return d
    if f.kind == "sym":
        return comb(d + f.k - 1, f.k)
    return comb(d, f.k)


def dim(spec: ModuleSpec | FactorSpec, d: int | None = None) -> int:
    if isinstance(spec, FactorSpec):
        if d is None:
            raise InvalidInput("factor dimension needs d")
        return factor_dim(spec, d)
    out = 1
    for f in spec.factors:
        out *= factor_dim(f, spec.d)
    return out


def total_degree(spec: ModuleSpec) -> int:
    return sum(f.degree for f in spec.factors)


def factor_labels(f: FactorSpec, d: int) -> list[tuple[int, ...]]:
    """Index tuples for one factor, 0-based, in lexicographic order."""
    if f.kind == "nat":
        return [(i,) for i in range(d)]
    if f.kind == "sym":
        return list(itertools.combinations_with_replacement(range(d), f.k))
    return list(itertools.combinations(range(d), f.k))


@dataclass(frozen=True)
class BasisLabel:
    """One basis vector of the module: per-factor index tuples plus the
    aggregated (twist-shifted) digit vector."""

    parts: tuple[tuple[int, ...], ...]
    pattern: DigitVector

    def text(self) -> str:
        shown = ["{" + ",".join(str(i + 1) for i in part) + "}" for part in self.parts]
        return "x".join(shown)


def _counts(part: tuple[int, ...], d: int) -> DigitVector:
    c = [0] * d
    for i in part:
        c[i] += 1
    return DigitVector(c)


def basis_labels(spec: ModuleSpec) -> list[BasisLabel]:
    """All labels in Kronecker order: leftmost factor most significant."""
    per_factor = [factor_labels(f, spec.d) for f in spec.factors]
    twists = [f.twist for f in spec.factors]
    out = []
    for combo in itertools.product(*per_factor):
        agg = twisted_aggregate(
            [(_counts(part, spec.d), e) for part, e in zip(combo, twists)], spec.d
        )
        out.append(BasisLabel(tuple(combo), agg))
    return out


def aggregated_patterns(spec: ModuleSpec) -> Iterator[DigitVector]:
    """Stream the aggregated digit vector of every basis label, in label order."""
    per_factor = [factor_labels(f, spec.d) for f in spec.factors]
    twists = [f.twist for f in spec.factors]
    for combo in itertools.product(*per_factor):
        yield twisted_aggregate(
            [(_counts(part, spec.d), e) for part, e in zip(combo, twists)], spec.d
        )


# ---------------------------------------------------------------------------
# structural checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ok:
    pass


@dataclass(frozen=True)
class Violations:
    issues: tuple[str, ...]


def check_constraints(spec: ModuleSpec, p: int, dim_budget: int = 10**6) -> Ok | Violations:
    """Diagnostic validity report: degree bound, factor sanity, size budget."""
    issues = []
    K = total_degree(spec)
    if K >= spec.q - 1:
        issues.append(f"total degree {K} is not below q-1 = {spec.q - 1}")
    for f in spec.factors:
        if f.kind == "sym" and f.k >= p:
            issues.append(f"sym({f.k}) is not irreducible in characteristic {p}")
        if f.kind == "ext" and f.k > spec.d:
            issues.append(f"ext({f.k}) vanishes for d = {spec.d}")
    w = dim(spec)
    if w > dim_budget:
        issues.append(f"module dimension {w} exceeds the budget {dim_budget}")
    return Violations(tuple(issues)) if issues else Ok()


@dataclass(frozen=True)
class MultiplicityFree:
    pass


@dataclass(frozen=True)
class Repeated:
    pattern: DigitVector
    count: int


def check_multiplicity_free(spec: ModuleSpec) -> MultiplicityFree | Repeated:
    """Whether distinct basis labels always carry distinct aggregated patterns.

    The witness returned is the first repeated pattern in label order.
    """
    seen: Counter = Counter()
    order: list[DigitVector] = []
    for c in aggregated_patterns(spec):
        if c not in seen:
            order.append(c)
        seen[c] += 1
    for c in order:
        if seen[c] > 1:
            return Repeated(c, seen[c])
    return MultiplicityFree()


# ---------------------------------------------------------------------------
# the matrix functor
# ---------------------------------------------------------------------------


def _sym_matrix(A: Matrix, k: int, d: int) -> Matrix:
    F = A.field
    if k >= F.p:
        raise UnsupportedFactor(f"sym({k}) needs k < characteristic {F.p}")
    labels = list(itertools.combinations_with_replacement(range(d), k))
    index = {_counts(lab, d): r for r, lab in enumerate(labels)}
    mults = {}
    for lab in labels:
        c = _counts(lab, d)
        m = factorial(k)
        for cnt in c:
            m //= factorial(cnt)
        mults[c] = m % F.p
    n = len(labels)
    out = np.zeros((n, n), dtype=np.int64)
    inv_mult = {c: F.inv(m) for c, m in mults.items()}
    for col, M_lab in enumerate(labels):
        # expand prod_{j in M} (sum_i A[i,j] x_i) over monomial exponent vectors
        poly: dict[tuple[int, ...], int] = {(0,) * d: 1}
        for j in M_lab:
            nxt: dict[tuple[int, ...], int] = {}
            for mono, coef in poly.items():
                for i in range(d):
                    a = int(A.a[i, j])
                    if a:
                        key = mono[:i] + (mono[i] + 1,) + mono[i + 1 :]
                        prev = nxt.get(key, 0)
                        nxt[key] = F.add(prev, F.mul(coef, a))
            poly = nxt
        colmult = mults[_counts(M_lab, d)]
        for mono, coef in poly.items():
            c = DigitVector(mono)
            row = index[c]
            out[row, col] = F.mul(coef, F.mul(colmult, inv_mult[c]))
    return Matrix(F, out)


def _ext_matrix(A: Matrix, k: int, d: int) -> Matrix:
    F = A.field
    subsets = list(itertools.combinations(range(d), k))
    n = len(subsets)
    out = np.zeros((n, n), dtype=np.int64)
    for r, R in enumerate(subsets):
        for c, C in enumerate(subsets):
            out[r, c] = Matrix(F, A.a[np.ix_(R, C)].copy()).det()
    return Matrix(F, out)


def _twisted(M: Matrix, q: int, e: int) -> Matrix:
    if e == 0:
        return M
    F = M.field
    t = pow(q, e, F.order - 1)
    return M.map_entries(lambda x: 0 if x == 0 else F.pow(x, t))


def induced_matrix(spec: ModuleSpec, A: Matrix) -> Matrix:
    """The action of A on the module: functor per factor, twist entrywise
    after the functor, factors combined by Kronecker product in order."""
    d = spec.d
    if A.shape != (d, d):
        raise ShapeMismatch(f"expected a {d}x{d} matrix, got {A.shape}")
    blocks = []
    for f in spec.factors:
        if f.kind == "nat":
            B = A
        elif f.kind == "sym":
            B = _sym_matrix(A, f.k, d)
        else:
            B = _ext_matrix(A, f.k, d)
        blocks.append(_twisted(B, spec.q, f.twist))
    out = Matrix.identity(A.field, 1)
    for B in blocks:
        out = kron(out, B)
    return out
