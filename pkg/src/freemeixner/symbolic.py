"""Exact polynomial calculus in the field over cell indicators.

A word ``(j1, ..., jn)`` stands for the pairing of omega^{(x)n} (monomial
basis) or of P^(n)(omega) (orthogonal basis) with the elementary tensor
chi_{j1} (x) ... (x) chi_{jn}. Products of indicators collapse cell-wise,
so every recursion term stays inside this class.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping

from .partitions import PreconditionError, block_assignments, enumerate_nc_min2, kernel_weight
from .report import Report
from .space import CellId, DiscreteSpace, as_fraction

MONOMIAL = "monomial"
ORTHOGONAL = "orthogonal"


class PolyElement:
    """Finite linear combination of words in one of the two bases."""

    __slots__ = ("space", "basis", "terms")

    def __init__(self, space: DiscreteSpace, basis: str, terms: Mapping[tuple, Fraction] | None = None):
        if basis not in (MONOMIAL, ORTHOGONAL):
            raise ValueError(f"unknown basis {basis!r}")
        self.space = space
        self.basis = basis
        clean = {}
        for word, c in (terms or {}).items():
            word = tuple(word)
            space.check_cells(word)
            c = as_fraction(c)
            if c:
                clean[word] = clean.get(word, Fraction(0)) + c
        self.terms = {w: c for w, c in clean.items() if c}

    @classmethod
    def word(cls, space, basis, word: Iterable[CellId], coeff=1) -> "PolyElement":
        return cls(space, basis, {tuple(word): coeff})

    @classmethod
    def unit(cls, space, basis=MONOMIAL) -> "PolyElement":
        return cls(space, basis, {(): 1})

    @classmethod
    def zero(cls, space, basis=MONOMIAL) -> "PolyElement":
        return cls(space, basis)

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def _compatible(self, other: "PolyElement") -> None:
        if not isinstance(other, PolyElement):
            raise TypeError("expected a PolyElement")
        if other.basis != self.basis:
            raise ValueError(f"basis mismatch: {self.basis} vs {other.basis}")
        if other.space != self.space:
            raise ValueError("elements live on different spaces")

    def __add__(self, other):
        self._compatible(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return PolyElement(self.space, self.basis, out)

    def __neg__(self):
        return PolyElement(self.space, self.basis, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PolyElement):
            # word concatenation is the algebra product only in the monomial basis
            self._compatible(other)
            if self.basis != MONOMIAL:
                raise ValueError("products are only defined in the monomial basis")
            out: dict[tuple, Fraction] = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    out[w1 + w2] = out.get(w1 + w2, Fraction(0)) + c1 * c2
            return PolyElement(self.space, MONOMIAL, out)
        a = as_fraction(other)
        return PolyElement(self.space, self.basis, {w: a * c for w, c in self.terms.items()})

    def __rmul__(self, other):
        return self * other

    def __eq__(self, other):
        if not isinstance(other, PolyElement):
            return NotImplemented
        return self.basis == other.basis and self.space == other.space and self.terms == other.terms

    def __repr__(self):
        tag = "X" if self.basis == MONOMIAL else "P"
        if not self.terms:
            return f"PolyElement[{self.basis}](0)"
        parts = [f"{c}*{tag}{list(w)}" for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), repr(t[0])))]
        return f"PolyElement[{self.basis}](" + " + ".join(parts) + ")"


def _require(p: PolyElement, basis: str) -> None:
    if p.basis != basis:
        raise ValueError(f"expected an element in the {basis} basis, got {p.basis}")


def _left_multiply_word(space: DiscreteSpace, j: CellId, word: tuple) -> dict:
    """X_j * P_word expanded in the orthogonal basis."""
    out = {(j,) + word: Fraction(1)}
    if word and word[0] == j:
        out[word] = out.get(word, Fraction(0)) + space.lam[j]
        tail = word[1:]
        c = space.sigma[j]
        if len(word) >= 2 and word[1] == j:
            c += space.eta[j]
        out[tail] = out.get(tail, Fraction(0)) + c
    return out


def left_multiply_field(j: CellId, p: PolyElement) -> PolyElement:
    """Multiply by X_j = <omega, chi_j> on the left, staying in the orthogonal basis."""
    _require(p, ORTHOGONAL)
    p.space.check_cells([j])
    out: dict[tuple, Fraction] = {}
    for w, c in p.terms.items():
        for w2, c2 in _left_multiply_word(p.space, j, w).items():
            out[w2] = out.get(w2, Fraction(0)) + c * c2
    return PolyElement(p.space, ORTHOGONAL, out)


@lru_cache(maxsize=None)
def _mono_word_to_ortho(space: DiscreteSpace, word: tuple) -> tuple:
    if not word:
        return (((), Fraction(1)),)
    inner = PolyElement(space, ORTHOGONAL, dict(_mono_word_to_ortho(space, word[1:])))
    return tuple(left_multiply_field(word[0], inner).terms.items())


@lru_cache(maxsize=None)
def _ortho_word_to_mono(space: DiscreteSpace, word: tuple) -> tuple:
    # P_(j, w) = X_j P_w - [w1 = j](lam_j P_w + sigma_j P_w' ) - [w1 = w2 = j] eta_j P_w'
    if not word:
        return (((), Fraction(1)),)
    j, rest = word[0], word[1:]
    acc: dict[tuple, Fraction] = {}

    def add(terms, scale, prefix=()):
        for w, c in terms:
            acc[prefix + w] = acc.get(prefix + w, Fraction(0)) + scale * c

    add(_ortho_word_to_mono(space, rest), Fraction(1), (j,))
    if rest and rest[0] == j:
        add(_ortho_word_to_mono(space, rest), -space.lam[j])
        c = space.sigma[j]
        if len(rest) >= 2 and rest[1] == j:
            c += space.eta[j]
        add(_ortho_word_to_mono(space, rest[1:]), -c)
    return tuple((w, c) for w, c in acc.items() if c)


def mono_to_ortho(p: PolyElement) -> PolyElement:
    """Rewrite monomial words X_{j1}...X_{jn} in the orthogonal basis."""
    _require(p, MONOMIAL)
    out: dict[tuple, Fraction] = {}
    for w, c in p.terms.items():
        for w2, c2 in _mono_word_to_ortho(p.space, w):
            out[w2] = out.get(w2, Fraction(0)) + c * c2
    return PolyElement(p.space, ORTHOGONAL, out)


def ortho_to_mono(p: PolyElement) -> PolyElement:
    """Expand orthogonal words as polynomials in the fields (unitriangular inverse)."""
    _require(p, ORTHOGONAL)
    out: dict[tuple, Fraction] = {}
    for w, c in p.terms.items():
        for w2, c2 in _ortho_word_to_mono(p.space, w):
            out[w2] = out.get(w2, Fraction(0)) + c * c2
    return PolyElement(p.space, MONOMIAL, out)


def _head_drop(j: CellId, p: PolyElement) -> PolyElement:
    p.space.check_cells([j])
    return PolyElement(p.space, p.basis, {w[1:]: c for w, c in p.terms.items() if w and w[0] == j})


def free_derivative(j: CellId, p: PolyElement) -> PolyElement:
    """D_j on monomials: drop the head letter if it is j, otherwise give 0."""
    _require(p, MONOMIAL)
    return _head_drop(j, p)


def annihilation(j: CellId, p: PolyElement) -> PolyElement:
    """Annihilation at a point of cell j: the same head-drop, on orthogonal words."""
    _require(p, ORTHOGONAL)
    return _head_drop(j, p)


@lru_cache(maxsize=None)
def _global_terms(space: DiscreteSpace, n: int) -> tuple:
    """(weight, cells hit by D_{t_1}, ..., D_{t_n}) for every kernel term of order n."""
    out = []
    for zeta in enumerate_nc_min2(n):
        for a in block_assignments(space, zeta):
            out.append((kernel_weight(space, a), a.cell_of_position()))
    return tuple(out)


def global_operator(p: PolyElement) -> PolyElement:
    """Apply the global operator 1 + sum over NC_{>=2} kernels of D_{t1}...D_{tn}.

    Only defined when eta vanishes on every cell. Terms with n larger than
    the degree of ``p`` annihilate it, so the sum stops there exactly.
    """
    _require(p, MONOMIAL)
    space = p.space
    if not space.gauss_poisson:
        raise PreconditionError("the global operator is only defined for eta == 0")
    out = dict(p.terms)
    for w, c in p.terms.items():
        for n in range(2, len(w) + 1):
            for weight, cells in _global_terms(space, n):
                # D_{t_n} acts first, so it removes the first letter of w
                if all(w[i] == cells[n - 1 - i] for i in range(n)):
                    tail = w[n:]
                    out[tail] = out.get(tail, Fraction(0)) + c * weight
    return PolyElement(space, MONOMIAL, out)


def annihilation_via_basis(j: CellId, p: PolyElement) -> PolyElement:
    """Annihilation at cell j of a monomial-basis element, via the orthogonal basis."""
    return ortho_to_mono(annihilation(j, mono_to_ortho(p)))


def annihilation_via_global(j: CellId, p: PolyElement) -> PolyElement:
    """sum_k lam_j^(k-1) (D_j G)^k p; terminates because D_j G lowers the degree."""
    _require(p, MONOMIAL)
    lam = p.space.lam[j]
    total = PolyElement.zero(p.space)
    term = p
    k = 0
    while not term.is_zero():
        term = free_derivative(j, global_operator(term))
        k += 1
        if not term.is_zero():
            total = total + term * lam ** (k - 1)
    return total


def all_words(cells, max_degree: int):
    for n in range(max_degree + 1):
        yield from product(cells, repeat=n)


def verify_globality(space: DiscreteSpace, degree: int = 5) -> Report:
    """Exact check of the annihilation = Psi^{-1}(D G) identity on every word."""
    if not space.gauss_poisson:
        raise PreconditionError("globality is only stated for eta == 0")
    checked = 0
    first = None
    for j in space.cells:
        for w in all_words(space.cells, degree):
            p = PolyElement.word(space, MONOMIAL, w)
            lhs = annihilation_via_basis(j, p)
            rhs = annihilation_via_global(j, p)
            checked += 1
            if lhs != rhs:
                first = {"cell": j, "word": list(w), "via_basis": lhs.terms, "via_global": rhs.terms}
                break
        if first:
            break
    return Report("globality", first is None, {"degree": degree, "cases": checked}, first)
