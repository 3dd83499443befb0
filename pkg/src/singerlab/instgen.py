"""Planted problem instances and their consistency oracle.

An instance is a list of public matrices over F_q obtained by pushing
secret d x d generators through the induced functor and conjugating by a
secret change of basis T. The oracle keeps the secrets so tests and demos
can check a solver's output against ground truth, and oracle_check can
certify that a (possibly edited) instance still is what it claims to be:
some scalars nu_x and one invertible intertwiner, unique up to scale, with
public_x = nu_x * T @ induced(A_x) @ T^{-1}.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConstraintViolation, InvalidInput
from .ffield import FieldCtx, discrete_log, field_ctx
from .matfq import Matrix, kernel_basis, kron, random_invertible
from .schur import (
    ModuleSpec,
    MultiplicityFree,
    Violations,
    check_constraints,
    check_multiplicity_free,
    dim,
    induced_matrix,
    parse_module_spec,
)
from .singer import make_singer

SCALAR_COMBO_CAP = 256


@dataclass(frozen=True)
class Oracle:
    """Ground truth: the planted generators, the basis change, the seed."""

    A: tuple[Matrix, ...]
    T: Matrix
    seed: int


@dataclass(frozen=True)
class PlantedInstance:
    p: int
    f: int
    d: int
    spec: ModuleSpec
    generators: tuple[Matrix, ...]
    oracle: Oracle | None

    @property
    def ctx(self) -> FieldCtx:
        return field_ctx(self.p, self.f, self.d)


@dataclass(frozen=True)
class Consistent:
    scalars: tuple[int, ...]


@dataclass(frozen=True)
class Inconsistent:
    detail: str


def gen_instance(
    ctx: FieldCtx,
    spec: ModuleSpec,
    n_generators: int = 2,
    seed: int = 0,
    plant_singer: bool = True,
) -> PlantedInstance:
    """Sample secrets and publish their conjugated functor images. With
    plant_singer the first secret is a companion form of a primitive
    element, so the published group always contains a cyclically regular
    element; the remaining secrets are uniform invertible matrices."""
    if spec.q != ctx.q or spec.d != ctx.d:
        raise InvalidInput("module spec does not match the field tower")
    if n_generators < 1:
        raise InvalidInput("need at least one generator")
    con = check_constraints(spec, ctx.p)
    if isinstance(con, Violations):
        raise ConstraintViolation("; ".join(con.issues))
    mf = check_multiplicity_free(spec)
    if not isinstance(mf, MultiplicityFree):
        raise ConstraintViolation(
            f"module is not multiplicity free: pattern {tuple(mf.pattern)} occurs {mf.count} times"
        )
    rng = random.Random(repr(("instance", ctx.p, ctx.f, ctx.d, spec.text(), seed)))
    secrets = []
    if plant_singer:
        secrets.append(make_singer(ctx, seed).S)
    while len(secrets) < n_generators:
        secrets.append(random_invertible(ctx.base, ctx.d, rng))
    T = random_invertible(ctx.base, dim(spec), rng)
    Ti = T.inv()
    publics = tuple(T @ induced_matrix(spec, A) @ Ti for A in secrets)
    return PlantedInstance(
        ctx.p, ctx.f, ctx.d, spec, publics, Oracle(tuple(secrets), T, seed)
    )


def tamper(inst: PlantedInstance, seed: int = 0) -> PlantedInstance:
    """Flip one public entry while keeping the matrix invertible. The
    oracle data is kept as is, so consistency checks must now refuse."""
    rng = random.Random(repr(("tamper", inst.p, inst.f, inst.d, seed)))
    base = inst.generators[0].field
    gi = rng.randrange(len(inst.generators))
    n = inst.generators[gi].shape[0]
    for _ in range(1000):
        m = inst.generators[gi].copy()
        i, j = rng.randrange(n), rng.randrange(n)
        old = int(m.a[i, j])
        new = rng.randrange(base.order)
        if new == old:
            continue
        m.a[i, j] = new
        if m.is_invertible() and m != inst.generators[gi]:
            gens = list(inst.generators)
            gens[gi] = m
            return replace(inst, generators=tuple(gens))
    raise InvalidInput("could not tamper while preserving invertibility")


# ---------------------------------------------------------------------------
# consistency oracle
# ---------------------------------------------------------------------------


def _nth_roots(F, n: int, r: int) -> list[int]:
    """All x in F* with x^n = r."""
    if r == 0:
        return []
    q1 = F.order - 1
    g = F.generator
    a = discrete_log(F, r, g)
    gd = math.gcd(n % q1 or q1, q1)
    if a % gd:
        return []
    step = q1 // gd
    t0 = (a // gd) * pow((n % q1 or q1) // gd, -1, step) % step
    return [F.pow(g, t0 + j * step) for j in range(gd)]


def oracle_check(inst: PlantedInstance) -> Consistent | Inconsistent:
    """Certify the instance against its oracle. Scalars are pinned by
    nu^dim(W) matching the determinant ratio; for each combination (up to a
    cap) the intertwiner equations public @ T = nu * T @ induced(A) are
    stacked and must leave exactly a line of solutions, spanned by an
    invertible matrix."""
    if inst.oracle is None:
        return Inconsistent("instance carries no oracle data")
    if len(inst.oracle.A) != len(inst.generators):
        return Inconsistent("oracle generator count differs from the publics")
    base = inst.generators[0].field
    n = dim(inst.spec)
    eye = Matrix.identity(base, n)
    images = []
    root_lists = []
    for i, (M, A) in enumerate(zip(inst.generators, inst.oracle.A)):
        G = induced_matrix(inst.spec, A)
        images.append(G)
        dg = G.det()
        if dg == 0:
            return Inconsistent(f"oracle generator {i} has singular image")
        roots = _nth_roots(base, n, base.div(M.det(), dg))
        if not roots:
            return Inconsistent(f"no scalar matches the determinant ratio of generator {i}")
        root_lists.append(roots)
    for combo in itertools.islice(itertools.product(*root_lists), SCALAR_COMBO_CAP):
        blocks = []
        for nu, M, G in zip(combo, inst.generators, images):
            blocks.append((kron(M, eye) - kron(eye, G.transpose()).scale(nu)).a)
        ker = kernel_basis(Matrix(base, np.vstack(blocks)))
        if len(ker) != 1:
            continue
        T = Matrix.from_rows(base, [ker[0][i * n : (i + 1) * n] for i in range(n)])
        if T.is_invertible():
            return Consistent(combo)
    return Inconsistent("no scalar combination admits a unique invertible intertwiner")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def instance_to_dict(inst: PlantedInstance) -> dict:
    out = {
        "p": inst.p,
        "f": inst.f,
        "d": inst.d,
        "spec": inst.spec.text(),
        "generators": [g.tolist() for g in inst.generators],
    }
    if inst.oracle is not None:
        out["oracle"] = {
            "A": [a.tolist() for a in inst.oracle.A],
            "T": inst.oracle.T.tolist(),
            "seed": inst.oracle.seed,
        }
    return out


def instance_from_dict(data: dict) -> PlantedInstance:
    try:
        p, f, d = int(data["p"]), int(data["f"]), int(data["d"])
        spec = parse_module_spec(data["spec"])
        ctx = field_ctx(p, f, d)
        gens = tuple(Matrix.from_rows(ctx.base, rows) for rows in data["generators"])
        oracle = None
        if "oracle" in data:
            o = data["oracle"]
            oracle = Oracle(
                tuple(Matrix.from_rows(ctx.base, rows) for rows in o["A"]),
                Matrix.from_rows(ctx.base, o["T"]),
                int(o["seed"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed instance data: {exc}") from exc
    return PlantedInstance(p, f, d, spec, gens, oracle)


def save_instance(inst: PlantedInstance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_instance(path: str) -> PlantedInstance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))
