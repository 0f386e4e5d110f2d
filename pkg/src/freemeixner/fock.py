"""Truncated operator model: a free product of one-cell Jacobi towers.

Basis vectors are alternating words ``((j1, n1), ..., (jm, nm))`` with
adjacent cells distinct, every ``n_i >= 1`` and level ``sum n_i <= depth``;
the empty word is the vacuum. ``X_j`` acts on the leading letter only:

* a word not starting with ``j`` gets ``(j, 1)`` prepended with amplitude
  ``sqrt(sigma_j)``;
* on ``(j, n) w`` it raises ``n`` with amplitude ``b_{n+1}``, multiplies by
  ``lambda_j`` and lowers ``n`` with amplitude ``b_n`` (``(j, 0) w`` is ``w``),
  where ``b_1 = sqrt(sigma_j)`` and ``b_n = sqrt(sigma_j + eta_j)`` for n >= 2.

Raising past the depth is dropped, so each ``X_j`` is the compression of the
untruncated operator to levels ``<= depth``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .constants import c3, c4, norm_constants  # noqa: F401  (re-exported)
from .meixner1d import JacobiParams, free_cumulants, vacuum_moment
from .partitions import CapacityError, PreconditionError, moment_from_cumulants
from .report import Report
from .space import CellId, DiscreteSpace, StepFunction, integrate, pointwise_product

DEFAULT_MAX_BASIS = 3_000_000
DEFAULT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FockRep:
    space: DiscreteSpace
    depth: int
    basis: tuple
    index: dict = field(repr=False)
    levels: np.ndarray = field(repr=False)
    fields: dict = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def X(self, cell: CellId) -> sp.csr_matrix:
        return self.fields[cell]

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim)
        v[0] = 1.0
        return v

    def identity(self) -> sp.csr_matrix:
        return sp.identity(self.dim, format="csr")

    def params(self, cell: CellId) -> JacobiParams:
        s = self.space
        return JacobiParams(s.lam[cell], s.eta[cell], s.sigma[cell])


def basis_size(n_cells: int, depth: int) -> int:
    # words of level m: n_cells * (n_cells)^(m-1), summed over m
    return sum(n_cells**m for m in range(depth + 1))


def build_rep(space: DiscreteSpace, depth: int, max_basis: int = DEFAULT_MAX_BASIS) -> FockRep:
    """Free-product Fock model of the fields X_j = <omega, chi_j>, truncated at ``depth``."""
    if depth < 2:
        raise ValueError("depth must be at least 2")
    size = basis_size(len(space), depth)
    if size > max_basis:
        raise CapacityError(f"basis of {size} vectors exceeds the cap {max_basis}")

    basis = [()]
    levels = [0]
    frontier = [()]
    for level in range(1, depth + 1):
        nxt = []
        for w in frontier:
            for j in space.cells:
                if w and w[0][0] == j:
                    child = ((j, w[0][1] + 1),) + w[1:]
                else:
                    child = ((j, 1),) + w
                nxt.append(child)
        basis.extend(nxt)
        levels.extend([level] * len(nxt))
        frontier = nxt
    index = {w: i for i, w in enumerate(basis)}

    fields = {}
    for j in space.cells:
        b1 = math.sqrt(space.sigma[j])
        bn = math.sqrt(space.sigma[j] + space.eta[j])
        lam = float(space.lam[j])
        rows, cols, vals = [], [], []
        for i, w in enumerate(basis):
            lvl = levels[i]
            if w and w[0][0] == j:
                n = w[0][1]
                if lvl < depth:
                    rows.append(index[((j, n + 1),) + w[1:]])
                    cols.append(i)
                    vals.append(bn)
                if lam:
                    rows.append(i)
                    cols.append(i)
                    vals.append(lam)
                lower = ((j, n - 1),) + w[1:] if n > 1 else w[1:]
                rows.append(index[lower])
                cols.append(i)
                vals.append(b1 if n == 1 else bn)
            elif lvl < depth:
                rows.append(index[((j, 1),) + w])
                cols.append(i)
                vals.append(b1)
        fields[j] = sp.csr_matrix((vals, (rows, cols)), shape=(len(basis), len(basis)))
    return FockRep(space, depth, tuple(basis), index, np.array(levels), fields)


def smeared_field(rep: FockRep, f: StepFunction) -> sp.csr_matrix:
    """X(f) = sum_j f_j X_j."""
    if f.space != rep.space:
        rep.space.check_cells(f.values)
    out = sp.csr_matrix((rep.dim, rep.dim))
    for c, v in f.values.items():
        out = out + float(v) * rep.X(c)
    return out


@dataclass(frozen=True)
class PolyOperator:
    """Matrix of an orthogonal-polynomial pairing, flagged when the degree is too
    close to the truncation depth for the matrix to be trusted entry-wise."""

    matrix: sp.csr_matrix
    degree: int
    truncated: bool


def ortho_poly_operator(rep: FockRep, fs: Sequence[StepFunction]) -> PolyOperator:
    """<P^(n)(omega), f_1 (x) ... (x) f_n> by the three-term-plus-eta recursion."""
    space = rep.space
    lam = StepFunction(space, space.lam)
    eta = StepFunction(space, space.eta)
    fs = tuple(fs)

    def rec(fs):
        n = len(fs)
        if n == 0:
            return rep.identity()
        if n == 1:
            return smeared_field(rep, fs[0])
        f1f2 = pointwise_product(fs[0], fs[1])
        out = smeared_field(rep, fs[0]) @ rec(fs[1:])
        out = out - rec((pointwise_product(lam, f1f2),) + fs[2:])
        s = integrate(space, f1f2)
        if s:
            out = out - float(s) * rec(fs[2:])
        if n >= 3:
            e = pointwise_product(eta, pointwise_product(f1f2, fs[2]))
            if e.values:
                out = out - rec((e,) + fs[3:])
        return out.tocsr()

    return PolyOperator(rec(fs), len(fs), len(fs) > rep.depth - 2)


class _WordOperators:
    """Memoised P_word(X) matrices for words of cell ids."""

    def __init__(self, rep: FockRep):
        self.rep = rep
        self.cache = {(): rep.identity()}

    def __call__(self, word: tuple) -> sp.csr_matrix:
        if word in self.cache:
            return self.cache[word]
        s = self.rep.space
        j, rest = word[0], word[1:]
        out = self.rep.X(j) @ self(rest)
        if rest and rest[0] == j:
            out = out - float(s.lam[j]) * self(rest)
            c = s.sigma[j] + (s.eta[j] if len(rest) >= 2 and rest[1] == j else 0)
            out = out - float(c) * self(rest[1:])
        out = out.tocsr()
        self.cache[word] = out
        return out


def word_vectors(rep: FockRep, max_degree: int) -> dict:
    """P_w Omega for every cell word of length <= max_degree."""
    s = rep.space
    vecs = {(): rep.vacuum()}
    for n in range(1, max_degree + 1):
        for w in product(s.cells, repeat=n):
            j, rest = w[0], w[1:]
            v = rep.X(j) @ vecs[rest]
            if rest and rest[0] == j:
                v = v - float(s.lam[j]) * vecs[rest]
                c = s.sigma[j] + (s.eta[j] if len(rest) >= 2 and rest[1] == j else 0)
                v = v - float(c) * vecs[rest[1:]]
            vecs[w] = v
    return vecs


def verify_chaos_orthogonality(rep: FockRep, nmax: int, tol: float = DEFAULT_TOL) -> Report:
    """|<P^(n) Omega, P^(m) Omega>| <= tol for indicator words of degrees n != m <= nmax."""
    if nmax > rep.depth - 2:
        raise PreconditionError(f"nmax={nmax} needs depth >= {nmax + 2}, have {rep.depth}")
    vecs = word_vectors(rep, nmax)
    by_degree = {n: [w for w in vecs if len(w) == n] for n in range(nmax + 1)}
    worst, where = 0.0, None
    for n in range(nmax + 1):
        A = np.array([vecs[w] for w in by_degree[n]])
        for m in range(n + 1, nmax + 1):
            B = np.array([vecs[w] for w in by_degree[m]])
            gram = np.abs(A @ B.T)
            k = np.unravel_index(np.argmax(gram), gram.shape)
            if gram[k] > worst:
                worst = float(gram[k])
                where = {"word_n": list(by_degree[n][k[0]]), "word_m": list(by_degree[m][k[1]])}
    passed = worst <= tol
    return Report(
        "orthogonality",
        passed,
        {"nmax": nmax, "depth": rep.depth, "max_violation": worst, "tol": tol},
        None if passed else where,
    )


def verify_factorization(rep: FockRep, blocks: Sequence[Sequence[CellId]], tol: float = DEFAULT_TOL, _ops=None) -> Report:
    """Check <P^(k1+...+kn), g1 (x) ... (x) gn> = prod_i <P^(ki), gi> numerically and exactly.

    Each block is a word of cells; consecutive blocks must use disjoint cells.
    """
    from .symbolic import ORTHOGONAL, PolyElement, ortho_to_mono

    blocks = [tuple(b) for b in blocks]
    if len(blocks) < 2 or any(not b for b in blocks):
        raise PreconditionError("need at least two non-empty blocks")
    rep.space.check_cells(c for b in blocks for c in b)
    for a, b in zip(blocks, blocks[1:]):
        if set(a) & set(b):
            raise PreconditionError(f"adjacent blocks {a} and {b} share a cell")
    ops = _ops or _WordOperators(rep)
    whole = sum(blocks, ())
    lhs = ops(whole)
    rhs = ops(blocks[0])
    for b in blocks[1:]:
        rhs = rhs @ ops(b)
    diff = abs(lhs - rhs)
    gap = float(diff.max()) if diff.nnz else 0.0
    scale = max(1.0, float(abs(lhs).max()) if lhs.nnz else 1.0)

    space = rep.space
    exact_lhs = ortho_to_mono(PolyElement.word(space, ORTHOGONAL, whole))
    exact_rhs = ortho_to_mono(PolyElement.word(space, ORTHOGONAL, blocks[0]))
    for b in blocks[1:]:
        exact_rhs = exact_rhs * ortho_to_mono(PolyElement.word(space, ORTHOGONAL, b))
    exact_ok = exact_lhs == exact_rhs
    passed = exact_ok and gap <= tol * scale
    return Report(
        "factorization",
        passed,
        {"blocks": [list(b) for b in blocks], "numeric_gap": gap, "scale": scale, "exact": exact_ok},
        None if passed else {"numeric_gap": gap, "exact": exact_ok},
    )


def moment_crosscheck(rep: FockRep, cell: CellId, nmax: int, tol: float = DEFAULT_TOL) -> Report:
    """Vacuum moments of X_j against the Jacobi walk sum and the NC cumulant sum."""
    if nmax > 2 * rep.depth + 1:
        raise PreconditionError("moments beyond 2*depth+1 see the truncation")
    p = rep.params(cell)
    kappa = free_cumulants(p, max(nmax, 2))
    X = rep.X(cell)
    v = rep.vacuum()
    w = v.copy()
    worst = 0.0
    first = None
    rows = []
    for n in range(nmax + 1):
        if n:
            w = X @ w
        fock = float(v @ w)
        walk = vacuum_moment(n, p)
        cumul = moment_from_cumulants(kappa, n) if n else walk
        rows.append({"n": n, "fock": fock, "jacobi": walk, "cumulants": cumul})
        err = abs(fock - float(walk))
        worst = max(worst, err / max(1.0, abs(float(walk))))
        if first is None and (walk != cumul or err > tol * max(1.0, abs(float(walk)))):
            first = rows[-1]
    return Report("moments", first is None, {"cell": cell, "nmax": nmax, "max_rel_gap": worst, "moments": rows}, first)


def operator_norm(M, tol: float = 1e-12) -> float:
    """Largest singular value of a sparse or dense matrix."""
    if M.shape[0] <= 400:
        A = M.toarray() if sp.issparse(M) else np.asarray(M)
        return float(np.linalg.norm(A, 2)) if A.size else 0.0
    if sp.issparse(M) and M.nnz == 0:
        return 0.0
    v0 = np.random.default_rng(0).standard_normal(min(M.shape))
    s = spla.svds(M, k=1, tol=tol, return_singular_vectors=False, v0=v0)
    return float(s[0])
