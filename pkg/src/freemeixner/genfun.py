"""Operator-valued test fields and the resolvent generating function.

A field ``Z`` takes a g x g rational matrix on each cell. Elements of the
coefficient algebra are finite sums ``sum_w M_w (x) X_w`` over monomial
words ``w`` in the fields; the matrix factor always multiplies in the same
order as the word, so ``(A (x) X_u)(B (x) X_v) = AB (x) X_uv``.

Two routes to the generating function are provided and compared:

* the series side, built from the orthogonal-polynomial recursion with
  operator coefficients;
* the closed side, the Neumann expansion of
  ``(1 - sum_j Psi(Z_j) (x) X_j + sum_j sigma_j CPsi(Z_j) (x) 1)^{-1}``
  in a bookkeeping variable z.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import ratmat as rm
from .constants import c3, c4, domain_radius  # noqa: F401  (domain_radius re-exported)
from .fock import FockRep, build_rep, operator_norm
from .partitions import PreconditionError
from .report import Report
from .space import CellId, DiscreteSpace, StepFunction, StructureError, as_fraction

FORMAL_MAX_DEGREE = 8


class NumericalError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class OperatorStepField:
    """Step function on the cells with square rational matrix values."""

    space: DiscreteSpace
    dim: int
    values: Mapping[CellId, np.ndarray]

    def __post_init__(self):
        self.space.check_cells(self.values)
        clean = {}
        for c in self.space.cells:
            if c not in self.values:
                continue
            m = rm.ratmat(self.values[c])
            if m.shape != (self.dim, self.dim):
                raise StructureError(f"matrix on cell {c!r} has shape {m.shape}, expected {(self.dim, self.dim)}")
            if not rm.is_zero(m):
                clean[c] = m
        object.__setattr__(self, "values", clean)

    @classmethod
    def scalar(cls, space, values: Mapping) -> "OperatorStepField":
        return cls(space, 1, {c: [[v]] for c, v in values.items()})

    def __call__(self, cell) -> np.ndarray:
        self.space.check_cells([cell])
        return self.values.get(cell, rm.zeros(self.dim))

    @property
    def support(self) -> tuple:
        return tuple(self.values)

    def _match(self, other):
        if other.space != self.space or other.dim != self.dim:
            raise StructureError("fields live on different spaces or coefficient dimensions")

    def __mul__(self, other):
        """Cell-wise product, either with another field (matrix product) or a step function."""
        if isinstance(other, OperatorStepField):
            self._match(other)
            return OperatorStepField(
                self.space, self.dim, {c: self.values[c] @ other.values[c] for c in self.values if c in other.values}
            )
        if isinstance(other, StepFunction):
            return OperatorStepField(
                self.space, self.dim, {c: m * other.values[c] for c, m in self.values.items() if c in other.values}
            )
        a = as_fraction(other)
        return OperatorStepField(self.space, self.dim, {c: m * a for c, m in self.values.items()})

    def scaled(self, a) -> "OperatorStepField":
        return self * a

    def integral(self) -> np.ndarray:
        """Bochner integral: sum_j sigma_j Z_j."""
        out = rm.zeros(self.dim)
        for c, m in self.values.items():
            out = out + m * self.space.sigma[c]
        return out

    def norm_upper(self) -> Fraction:
        """Certified rational upper bound of sup_t ||Z(t)||."""
        return max((rm.norm_upper(m) for m in self.values.values()), default=Fraction(0))

    def norm(self) -> float:
        return max((rm.spectral_norm(m) for m in self.values.values()), default=0.0)

    def to_json(self) -> dict:
        return {"dim": self.dim, "values": {str(c): rm.to_strings(m) for c, m in self.values.items()}}


class CoefficientAlgebraElement:
    """sum_w M_w (x) X_w with g x g rational matrices M_w and monomial words w."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[tuple, np.ndarray] | None = None):
        self.dim = dim
        self.terms = {}
        for w, m in (terms or {}).items():
            if m.shape != (dim, dim):
                raise StructureError("coefficient shape mismatch")
            if not rm.is_zero(m):
                self.terms[tuple(w)] = m

    @classmethod
    def unit(cls, dim: int) -> "CoefficientAlgebraElement":
        return cls(dim, {(): rm.identity(dim)})

    @classmethod
    def zero(cls, dim: int) -> "CoefficientAlgebraElement":
        return cls(dim)

    def _check(self, other):
        if not isinstance(other, CoefficientAlgebraElement) or other.dim != self.dim:
            raise StructureError("coefficient dimensions differ")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for w, m in other.terms.items():
            out[w] = out[w] + m if w in out else m
        return CoefficientAlgebraElement(self.dim, out)

    def __neg__(self):
        return CoefficientAlgebraElement(self.dim, {w: -m for w, m in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, CoefficientAlgebraElement):
            self._check(other)
            out: dict = {}
            for w1, m1 in self.terms.items():
                for w2, m2 in other.terms.items():
                    w = w1 + w2
                    p = m1 @ m2
                    out[w] = out[w] + p if w in out else p
            return CoefficientAlgebraElement(self.dim, out)
        a = as_fraction(other)
        return CoefficientAlgebraElement(self.dim, {w: m * a for w, m in self.terms.items()})

    def left(self, matrix: np.ndarray, prefix: tuple = ()) -> "CoefficientAlgebraElement":
        """(matrix (x) X_prefix) * self."""
        return CoefficientAlgebraElement(self.dim, {prefix + w: matrix @ m for w, m in self.terms.items()})

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def __eq__(self, other):
        if not isinstance(other, CoefficientAlgebraElement):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.terms.keys() == other.terms.keys()
            and all(rm.equal(m, other.terms[w]) for w, m in self.terms.items())
        )

    def first_difference(self, other) -> dict | None:
        for w in sorted(set(self.terms) | set(other.terms), key=lambda w: (len(w), repr(w))):
            a = self.terms.get(w, rm.zeros(self.dim))
            b = other.terms.get(w, rm.zeros(self.dim))
            if not rm.equal(a, b):
                return {"word": list(w), "left": rm.to_strings(a), "right": rm.to_strings(b)}
        return None

    def evaluate(self, rep: FockRep) -> sp.csr_matrix:
        """The operator sum_w M_w (x) X_w on C^g (x) (truncated Fock space)."""
        cache = {(): rep.identity()}

        def word_op(w):
            if w not in cache:
                cache[w] = (rep.X(w[0]) @ word_op(w[1:])).tocsr()
            return cache[w]

        n = self.dim * rep.dim
        out = sp.csr_matrix((n, n))
        for w, m in self.terms.items():
            out = out + sp.kron(rm.to_float(m), word_op(w), format="csr")
        return out

    def __repr__(self):
        return f"CoefficientAlgebraElement(dim={self.dim}, terms={len(self.terms)}, degree={self.degree})"


def smeared_pairing(Z: OperatorStepField) -> CoefficientAlgebraElement:
    """<omega, Z> = sum_j Z_j (x) X_j."""
    return CoefficientAlgebraElement(Z.dim, {(c,): m for c, m in Z.values.items()})


def _check_rep(Z: OperatorStepField, rep: FockRep):
    if rep.space != Z.space:
        raise StructureError("field and representation use different spaces")


def field_operator(Z: OperatorStepField, rep: FockRep) -> sp.csr_matrix:
    """Kronecker assembly of sum_j Z_j (x) X_j."""
    _check_rep(Z, rep)
    n = Z.dim * rep.dim
    out = sp.csr_matrix((n, n))
    for c, m in Z.values.items():
        out = out + sp.kron(rm.to_float(m), rep.X(c), format="csr")
    return out


@dataclass(frozen=True)
class SimpleIntegral:
    matrix: sp.csr_matrix
    norm: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.norm <= self.bound * (1 + 1e-12) + 1e-12


def integral_simple(Z: OperatorStepField, rep: FockRep) -> SimpleIntegral:
    """sum_j Z_j (x) X_j with its measured norm and the bound ||Z|| C3(supp Z)."""
    M = field_operator(Z, rep)
    if not Z.support:
        return SimpleIntegral(M, 0.0, 0.0)
    return SimpleIntegral(M, operator_norm(M), Z.norm() * c3(Z.space, Z.support))


def ortho_pairing_Z(n: int, fields: Sequence[OperatorStepField]) -> CoefficientAlgebraElement:
    """<P^(n)(omega), Z_1 * ... * Z_n> by the operator-coefficient recursion.

    Products of fields are cell-wise matrix products, so
    ``lambda Z1 Z2`` and ``eta Z1 Z2 Z3`` are again fields.
    """
    fields = tuple(fields)
    if len(fields) != n:
        raise ValueError(f"need exactly {n} fields, got {len(fields)}")
    if n == 0:
        raise ValueError("degree-0 pairing has no field to fix the dimension; use CoefficientAlgebraElement.unit")
    space, dim = fields[0].space, fields[0].dim
    for f in fields:
        fields[0]._match(f)
    lam = StepFunction(space, space.lam)
    eta = StepFunction(space, space.eta)

    def rec(fs):
        k = len(fs)
        if k == 0:
            return CoefficientAlgebraElement.unit(dim)
        if k == 1:
            return smeared_pairing(fs[0])
        z12 = fs[0] * fs[1]
        out = smeared_pairing(fs[0]) * rec(fs[1:])
        out = out - rec((z12 * lam,) + fs[2:])
        out = out - rec(fs[2:]).left(z12.integral())
        if k >= 3:
            out = out - rec(((z12 * fs[2]) * eta,) + fs[3:])
        return out

    return rec(fields)


def genfun_series_coefficients(Z: OperatorStepField, degree: int) -> list[CoefficientAlgebraElement]:
    """[1, <P^(1), Z>, ..., <P^(d), Z^{*d}>] exactly.

    Uses the recursion split by leading cell: with R_n(j) the part of the
    degree-n term whose words start with j,
    R_n(j) = (Z_j X_j) G_{n-1} - lam_j Z_j R_{n-1}(j) - sigma_j Z_j^2 G_{n-2}
    - eta_j Z_j^2 R_{n-2}(j)   (the last term only for n >= 3).
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    s, g = Z.space, Z.dim
    G = [CoefficientAlgebraElement.unit(g)]
    R: list[dict] = [{}]
    zero = CoefficientAlgebraElement.zero(g)
    for n in range(1, degree + 1):
        Rn = {}
        for j, Zj in Z.values.items():
            Zj2 = Zj @ Zj
            r = G[n - 1].left(Zj, (j,))
            if n >= 2:
                r = r - R[n - 1].get(j, zero).left(Zj * s.lam[j])
                r = r - G[n - 2].left(Zj2 * s.sigma[j])
            if n >= 3 and s.eta[j]:
                r = r - R[n - 2].get(j, zero).left(Zj2 * s.eta[j])
            Rn[j] = r
        R.append(Rn)
        total = zero
        for r in Rn.values():
            total = total + r
        G.append(total)
    return G


def _psi_matrix_coefficients(Zj: np.ndarray, lam, eta, degree: int):
    """z-coefficients of zZ (1 + lam zZ + eta z^2 Z^2)^{-1} and z^2 Z^2 (same)^{-1}."""
    g = Zj.shape[0]
    inv = [rm.identity(g)]  # (1 + lam zZ + eta z^2 Z^2)^{-1} = sum_m B_m z^m
    for m in range(1, degree + 1):
        b = -(Zj @ inv[m - 1]) * lam
        if m >= 2:
            b = b - (Zj @ Zj @ inv[m - 2]) * eta
        inv.append(b)
    psi = [rm.zeros(g)] + [Zj @ inv[m - 1] for m in range(1, degree + 1)]
    cpsi = [rm.zeros(g), rm.zeros(g)] + [Zj @ Zj @ inv[m - 2] for m in range(2, degree + 1)]
    return psi, cpsi[: degree + 1]


def closed_form_terms(Z: OperatorStepField, degree: int) -> list[CoefficientAlgebraElement]:
    """A_m with A(z) = sum_j Psi(zZ_j) (x) X_j - sum_j sigma_j CPsi(zZ_j) (x) 1."""
    s, g = Z.space, Z.dim
    A = [CoefficientAlgebraElement.zero(g) for _ in range(degree + 1)]
    for j, Zj in Z.values.items():
        psi, cpsi = _psi_matrix_coefficients(Zj, s.lam[j], s.eta[j], degree)
        for m in range(1, degree + 1):
            A[m] = A[m] + CoefficientAlgebraElement(g, {(j,): psi[m], (): -cpsi[m] * s.sigma[j]})
    return A


def genfun_closed_coefficients(Z: OperatorStepField, degree: int) -> list[CoefficientAlgebraElement]:
    """z-coefficients of the Neumann series sum_k A(z)^k, via G = 1 + A G."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    g = Z.dim
    A = closed_form_terms(Z, max(degree, 1))
    G = [CoefficientAlgebraElement.unit(g)]
    for n in range(1, degree + 1):
        acc = CoefficientAlgebraElement.zero(g)
        for m in range(1, n + 1):
            if A[m].terms:
                acc = acc + A[m] * G[n - m]
        G.append(acc)
    return G


def verify_theorem3_formal(space: DiscreteSpace, Z: OperatorStepField, degree: int, max_degree: int = FORMAL_MAX_DEGREE) -> Report:
    """Exact term-by-term comparison of the series and closed-form coefficients.

    If some coefficient differs in the free algebra, both sides are also
    evaluated in the Fock model at depth degree + 2 and the outcome is
    reported as a representation-dependence finding.
    """
    if Z.space != space:
        raise StructureError("field is defined on a different space")
    if degree > max_degree:
        raise PreconditionError(f"degree {degree} exceeds the configured maximum {max_degree}")
    series = genfun_series_coefficients(Z, degree)
    closed = genfun_closed_coefficients(Z, degree)
    first = None
    for n, (a, b) in enumerate(zip(series, closed)):
        if a != b:
            first = {"degree": n, **(a.first_difference(b) or {})}
            break
    details = {
        "degree": degree,
        "dim": Z.dim,
        "cells": len(space),
        "terms": [len(c.terms) for c in series],
        "free_algebra_equal": first is None,
        "representation_gap": None,
    }
    if first is None:
        return Report("genfun-formal", True, details)
    rep = build_rep(space, max(degree + 2, 2))
    gap = max(
        float(abs(a.evaluate(rep) - b.evaluate(rep)).max() if (a - b).terms else 0.0)
        for a, b in zip(series, closed)
    )
    details["representation_gap"] = gap
    return Report("genfun-formal", gap < 1e-10, details, first)


@dataclass(frozen=True)
class ResolventPieces:
    psi: np.ndarray  # stacked per-cell Psi(Z_j), float
    cells: tuple
    const: np.ndarray  # sum_j sigma_j CPsi(Z_j)


def _resolvent_pieces(Z: OperatorStepField) -> ResolventPieces:
    s, g = Z.space, Z.dim
    eye = np.eye(g)
    psis, cells = [], []
    const = np.zeros((g, g))
    for j, m in Z.values.items():
        Zf = rm.to_float(m)
        denom = eye + float(s.lam[j]) * Zf + float(s.eta[j]) * Zf @ Zf
        # Z and the denominator commute, so the side of the inverse is irrelevant
        psis.append(np.linalg.solve(denom, Zf))
        cells.append(j)
        const += float(s.sigma[j]) * np.linalg.solve(denom, Zf @ Zf)
    return ResolventPieces(np.array(psis), tuple(cells), const)


def _field_sum(rep: FockRep, pieces: ResolventPieces, g: int) -> sp.csr_matrix:
    n = g * rep.dim
    out = sp.csr_matrix((n, n))
    for psi, j in zip(pieces.psi, pieces.cells):
        out = out + sp.kron(psi, rep.X(j), format="csr")
    return out


def resolvent_operator(Z: OperatorStepField, rep: FockRep) -> sp.csc_matrix:
    """1 - sum_j Psi(Z_j) (x) X_j + (sum_j sigma_j CPsi(Z_j)) (x) 1, as a sparse matrix."""
    pieces = _resolvent_pieces(Z)
    g = Z.dim
    n = g * rep.dim
    K = _field_sum(rep, pieces, g)
    return (sp.identity(n) - K + sp.kron(pieces.const, rep.identity())).tocsc()


def cross_form_operator(Z: OperatorStepField, rep: FockRep) -> tuple[sp.csc_matrix, sp.csr_matrix]:
    """(1 - f <omega, Psi(Z)>, f (x) 1) with f = (1 + sum_j sigma_j CPsi(Z_j))^{-1}."""
    pieces = _resolvent_pieces(Z)
    g = Z.dim
    n = g * rep.dim
    f = np.linalg.inv(np.eye(g) + pieces.const)
    F = sp.kron(f, rep.identity(), format="csr")
    K = _field_sum(rep, pieces, g)
    return (sp.identity(n) - F @ K).tocsc(), F


def partial_sum_apply(Z: OperatorStepField, rep: FockRep, degree: int, V: np.ndarray) -> np.ndarray:
    """Apply sum_{n<=degree} <P^(n), Z^{*n}> to columns of V (shape (g*dim, k)).

    Runs the leading-cell recursion of genfun_series_coefficients on vectors.
    """
    s, g, d = Z.space, Z.dim, rep.dim
    k = V.shape[1]
    # vectors are handled as arrays of shape (k, g, d): vec index a*d + i
    base = V.T.reshape(k, g, d)
    mats = {j: rm.to_float(m) for j, m in Z.values.items()}

    def zx(Zf, X, W):  # (Z (x) X) W
        return np.einsum("ab,kbi->kai", Zf, (X @ W.reshape(-1, d).T).T.reshape(k, g, d))

    def z1(Zf, W):  # (Z (x) 1) W
        return np.einsum("ab,kbi->kai", Zf, W)

    G = [base]
    R: list[dict] = [{}]
    total = base.copy()
    for n in range(1, degree + 1):
        Rn = {}
        for j, Zf in mats.items():
            Z2 = Zf @ Zf
            r = zx(Zf, rep.X(j), G[n - 1])
            if n >= 2:
                if j in R[n - 1]:
                    r = r - float(s.lam[j]) * z1(Zf, R[n - 1][j])
                r = r - float(s.sigma[j]) * z1(Z2, G[n - 2])
            if n >= 3 and s.eta[j] and j in R[n - 2]:
                r = r - float(s.eta[j]) * z1(Z2, R[n - 2][j])
            Rn[j] = r
        R.append(Rn)
        Gn = sum(Rn.values()) if Rn else np.zeros_like(base)
        G.append(Gn)
        total = total + Gn
    return total.reshape(k, g * d).T


def probe_vectors(g: int, rep: FockRep, n_random: int = 2, seed: int = 0) -> np.ndarray:
    """Columns e_a (x) Omega for every a, plus a few seeded random unit vectors."""
    n = g * rep.dim
    cols = []
    for a in range(g):
        v = np.zeros(n)
        v[a * rep.dim] = 1.0
        cols.append(v)
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        v = rng.standard_normal(n)
        cols.append(v / np.linalg.norm(v))
    return np.array(cols).T


def geometric_tail(ratio: float, degree: int) -> float:
    if ratio >= 1:
        return float("inf")
    return ratio ** (degree + 1) / (1 - ratio)


def verify_theorem3_numeric(
    space: DiscreteSpace,
    Z: OperatorStepField,
    rep: FockRep | None = None,
    depth: int = 10,
    degree: int = 8,
    allowance: float = 1e-9,
    cross_tol: float = 1e-10,
    n_random: int = 2,
) -> Report:
    """Resummed resolvent vs. degree-``degree`` partial sum on the truncated model.

    The gap is measured on the vacuum columns e_a (x) Omega and on a few seeded
    random unit vectors, and compared with sum_{n>degree} (||Z|| C4)^n plus the
    truncation allowance. The second form (1 - f <omega, Psi>)^{-1} f is
    solved separately and must agree with the first within ``cross_tol``.
    """
    if Z.space != space:
        raise StructureError("field is defined on a different space")
    if rep is None:
        rep = build_rep(space, depth)
    elif rep.space != space:
        raise StructureError("representation is built on a different space")
    if degree + 2 > rep.depth:
        raise PreconditionError(f"degree {degree} needs depth >= {degree + 2}")
    support = Z.support
    if not support:
        zero = {"gap": 0.0, "bound": 0.0, "cross_gap": 0.0, "norm_Z": 0.0}
        return Report("genfun-numeric", True, zero)
    radius = domain_radius(space, support)
    zbound = Z.norm_upper()
    if not zbound < radius / 2:
        raise PreconditionError(f"||Z|| bound {zbound} is not below half the radius {radius}")
    k4 = c4(space, support)
    tail = geometric_tail(Z.norm() * k4, degree)

    V = probe_vectors(Z.dim, rep, n_random)
    try:
        R = spla.splu(resolvent_operator(Z, rep)).solve(V)
        cross_op, F = cross_form_operator(Z, rep)
        R2 = spla.splu(cross_op).solve(F @ V)
    except RuntimeError as exc:  # singular factor
        raise NumericalError(f"resolvent is singular: {exc}") from exc
    if not (np.all(np.isfinite(R)) and np.all(np.isfinite(R2))):
        raise NumericalError("non-finite resolvent")
    L = partial_sum_apply(Z, rep, degree, V)
    gap = float(np.max(np.linalg.norm(R - L, axis=0)))
    cross = float(np.max(np.linalg.norm(R - R2, axis=0)))
    bound = tail + allowance
    passed = gap <= bound and cross <= cross_tol
    details = {
        "degree": degree,
        "depth": rep.depth,
        "norm_Z": Z.norm(),
        "norm_Z_upper": zbound,
        "radius": radius,
        "C4": k4,
        "gap": gap,
        "bound": bound,
        "cross_gap": cross,
        "cross_tol": cross_tol,
        "probes": V.shape[1],
    }
    return Report("genfun-numeric", passed, details, None if passed else {"gap": gap, "bound": bound, "cross_gap": cross})
