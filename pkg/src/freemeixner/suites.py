"""Verification suites: each takes a space, a field Z and run settings and returns a Report."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constants import c3, c4
from .fock import (
    FockRep,
    _WordOperators,
    build_rep,
    moment_crosscheck,
    operator_norm,
    ortho_poly_operator,
    smeared_field,
    verify_chaos_orthogonality,
    verify_factorization,
)
from .genfun import OperatorStepField, verify_theorem3_formal, verify_theorem3_numeric
from .meixner1d import (
    JacobiParams,
    free_cumulants,
    genfun_1d_coefficient,
    meixner_poly,
    vacuum_moment,
    verify_1d_annihilation,
)
from .partitions import moment_from_cumulants
from .report import Report
from .space import DiscreteSpace, StepFunction, sup_norm
from .symbolic import verify_globality

SUITES = ("genfun-formal", "genfun-numeric", "globality", "moments", "orthogonality", "factorization", "bounds", "1d")

GLOBALITY_MAX_DEGREE = 5
FACTORIZATION_MAX_DEGREE = 5
BOUNDS_MAX_DEGREE = 4
POLY_1D_MAX = 12
MOMENTS_1D_MAX = 10
FOCK_MOMENTS_MAX = 10
ANNIHILATION_1D_MAX = 8


@dataclass(frozen=True)
class Settings:
    degree: int
    depth: int
    tolerance: float = 1e-10
    seed: int = 0


def _merge(name: str, parts: list[Report], extra: dict | None = None) -> Report:
    failed = next((p for p in parts if not p.passed), None)
    details = dict(extra or {})
    details["checks"] = [p.to_json() for p in parts]
    first = None if failed is None else {"check": failed.name, **failed.to_json()}
    return Report(name, failed is None, details, first)


def suite_genfun_formal(space, Z, st: Settings) -> Report:
    return verify_theorem3_formal(space, Z, st.degree)


def suite_genfun_numeric(space, Z, st: Settings) -> Report:
    return verify_theorem3_numeric(space, Z, depth=st.depth, degree=st.degree, cross_tol=st.tolerance)


def suite_globality(space, Z, st: Settings) -> Report:
    return verify_globality(space, min(st.degree, GLOBALITY_MAX_DEGREE))


def suite_moments(space, Z, st: Settings, rep: FockRep | None = None) -> Report:
    rep = rep or build_rep(space, st.depth)
    nmax = min(2 * st.degree, FOCK_MOMENTS_MAX, 2 * rep.depth + 1)
    return _merge("moments", [moment_crosscheck(rep, c, nmax, st.tolerance) for c in space.cells], {"nmax": nmax})


def suite_orthogonality(space, Z, st: Settings, rep: FockRep | None = None) -> Report:
    rep = rep or build_rep(space, st.depth)
    return verify_chaos_orthogonality(rep, min(st.degree, rep.depth - 2), st.tolerance)


def adjacent_disjoint_patterns(cells, max_degree: int):
    """Every sequence of >= 2 non-empty cell words, total length <= max_degree,
    in which consecutive words share no cell."""

    def extend(prefix, remaining):
        if len(prefix) >= 2:
            yield prefix
        for size in range(1, remaining + 1):
            for block in itertools.product(cells, repeat=size):
                if prefix and set(prefix[-1]) & set(block):
                    continue
                yield from extend(prefix + (block,), remaining - size)

    yield from extend((), max_degree)


def suite_factorization(space, Z, st: Settings, rep: FockRep | None = None) -> Report:
    degree = min(st.degree, FACTORIZATION_MAX_DEGREE)
    if len(space) < 2:
        return Report("factorization", True, {"degree": degree, "patterns": 0, "note": "needs two cells"})
    rep = rep or build_rep(space, max(st.depth, degree))
    ops = _WordOperators(rep)
    worst, count = 0.0, 0
    for blocks in adjacent_disjoint_patterns(space.cells, degree):
        r = verify_factorization(rep, blocks, st.tolerance, _ops=ops)
        count += 1
        worst = max(worst, r.details["numeric_gap"] / r.details["scale"])
        if not r.passed:
            return Report("factorization", False, {"degree": degree, "patterns": count, "max_rel_gap": worst}, r.to_json())
    return Report("factorization", True, {"degree": degree, "patterns": count, "max_rel_gap": worst})


def nonempty_subsets(cells):
    for r in range(1, len(cells) + 1):
        yield from itertools.combinations(cells, r)


def _random_step(space, cells, rng: random.Random) -> StepFunction:
    vals = {c: Fraction(rng.randint(-4, 4), 4) for c in cells}
    vals[cells[0]] = Fraction(1)  # sup norm exactly 1
    return StepFunction(space, vals)


def suite_bounds(space, Z, st: Settings, rep: FockRep | None = None) -> Report:
    """Measured norms against C3(A) for fields and C4(A)^n for degree-n pairings.

    Polynomial pairings are measured on the columns of levels <= depth - n,
    where the truncated matrix coincides with the untruncated operator, so
    every measured value is a lower bound of the true norm.
    """
    rep = rep or build_rep(space, st.depth)
    nmax = min(st.degree, BOUNDS_MAX_DEGREE, rep.depth - 1)
    rng = random.Random(st.seed)
    rows = []
    first = None
    for A in nonempty_subsets(space.cells):
        chi = StepFunction(space, {c: 1 for c in A})
        k3, k4 = c3(space, A), c4(space, A)
        norm = operator_norm(smeared_field(rep, chi))
        row = {"A": [str(c) for c in A], "C3": k3, "field_norm": norm, "C4": k4, "poly": []}
        if norm > k3 * (1 + 1e-12):
            first = first or {"A": row["A"], "kind": "field", "norm": norm, "bound": k3}
        for n in range(1, nmax + 1):
            cols = np.flatnonzero(rep.levels <= rep.depth - n)
            for fs in ([chi] * n, [_random_step(space, A, rng) for _ in range(n)]):
                M = ortho_poly_operator(rep, fs).matrix[:, cols]
                bound = k4**n * float(np.prod([sup_norm(f) for f in fs]))
                pn = operator_norm(M)
                row["poly"].append({"n": n, "norm": pn, "bound": bound})
                if pn > bound * (1 + 1e-12):
                    first = first or {"A": row["A"], "kind": "poly", "n": n, "norm": pn, "bound": bound}
        rows.append(row)
    return Report("bounds", first is None, {"nmax": nmax, "depth": rep.depth, "subsets": rows}, first)


def suite_1d(space, Z, st: Settings) -> Report:
    parts = []
    for c in space.cells:
        p = JacobiParams(space.lam[c], space.eta[c], space.sigma[c])
        bad = next((n for n in range(POLY_1D_MAX + 1) if meixner_poly(n, p) != genfun_1d_coefficient(n, p)), None)
        parts.append(Report("1d-genfun", bad is None, {"cell": c, "nmax": POLY_1D_MAX}, None if bad is None else {"n": bad}))
        kappa = free_cumulants(p, MOMENTS_1D_MAX)
        bad = next(
            (n for n in range(1, MOMENTS_1D_MAX + 1) if vacuum_moment(n, p) != moment_from_cumulants(kappa, n)), None
        )
        parts.append(Report("1d-moments", bad is None, {"cell": c, "nmax": MOMENTS_1D_MAX}, None if bad is None else {"n": bad}))
        parts.append(verify_1d_annihilation(p, ANNIHILATION_1D_MAX))
    return _merge("1d", parts)


RUNNERS = {
    "genfun-formal": suite_genfun_formal,
    "genfun-numeric": suite_genfun_numeric,
    "globality": suite_globality,
    "moments": suite_moments,
    "orthogonality": suite_orthogonality,
    "factorization": suite_factorization,
    "bounds": suite_bounds,
    "1d": suite_1d,
}


def run_suite(name: str, space: DiscreteSpace, Z: OperatorStepField, st: Settings) -> Report:
    return RUNNERS[name](space, Z, st)
