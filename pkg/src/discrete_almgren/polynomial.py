"""Exact multivariate polynomials with rational coefficients.

Terms are stored as ``{exponent tuple: Fraction}`` with zero coefficients
removed.  Calculus (Laplacian, gradient, lattice Laplacian) is exact;
numerical evaluation at float points goes through numpy.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import cached_property
from math import comb

import numpy as np

from .errors import BadExponent, ParseError

_NAMES = "xyzw"


def variable_names(dim):
    if dim <= len(_NAMES):
        return list(_NAMES[:dim])
    return [f"x{i + 1}" for i in range(dim)]


class Polynomial:
    """Polynomial in ``dim`` variables with exact rational coefficients.

    ``is_continuum_harmonic`` is decided by computing the Laplacian on the
    monomial basis, so it never depends on floating point.
    """

    def __init__(self, dim, terms=()):
        if int(dim) != dim or dim < 1:
            raise BadExponent(f"dimension must be a positive integer, got {dim!r}")
        self.dim = int(dim)
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict[tuple, Fraction] = {}
        for exps, coeff in items:
            exps = _check_exponents(exps, self.dim)
            c = Fraction(coeff)
            if c:
                acc[exps] = acc.get(exps, Fraction(0)) + c
        self.terms = {e: c for e, c in sorted(acc.items()) if c}

    @classmethod
    def constant(cls, dim, c=1):
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim, axis):
        e = [0] * dim
        e[axis] = 1
        return cls(dim, {tuple(e): 1})

    # -- algebra -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.dim != self.dim:
                raise ValueError("dimension mismatch")
            return other
        return Polynomial.constant(self.dim, other)

    def __add__(self, other):
        other = self._coerce(other)
        return Polynomial(self.dim, list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = []
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return Polynomial(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        result = Polynomial.constant(self.dim)
        for _ in range(int(k)):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, tuple(self.terms.items())))

    @property
    def is_zero(self):
        return not self.terms

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def axis_degree(self, axis):
        return max((e[axis] for e in self.terms), default=0)

    def is_homogeneous(self):
        return len({sum(e) for e in self.terms}) <= 1

    # -- calculus ----------------------------------------------------------

    def derivative(self, axis, order=1):
        out = []
        for e, c in self.terms.items():
            if e[axis] < order:
                continue
            factor = 1
            for j in range(order):
                factor *= e[axis] - j
            ne = list(e)
            ne[axis] -= order
            out.append((tuple(ne), c * factor))
        return Polynomial(self.dim, out)

    def gradient(self):
        return [self.derivative(i) for i in range(self.dim)]

    def laplacian(self):
        total = Polynomial(self.dim)
        for i in range(self.dim):
            total = total + self.derivative(i, 2)
        return total

    @cached_property
    def is_continuum_harmonic(self):
        return self.laplacian().is_zero

    def discrete_laplacian(self):
        """Σ_i p(x + e_i) + p(x − e_i) − 2 p(x) on Z^dim, exactly."""
        out = []
        for e, c in self.terms.items():
            for axis, a in enumerate(e):
                # (x+1)^a + (x-1)^a - 2x^a keeps the even binomial terms, doubled
                for j in range(2, a + 1, 2):
                    ne = list(e)
                    ne[axis] = a - j
                    out.append((tuple(ne), 2 * c * comb(a, j)))
        return Polynomial(self.dim, out)

    # -- evaluation --------------------------------------------------------

    def exact(self, point):
        point = [Fraction(p) for p in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                term *= x ** k
            total += term
        return total

    def __call__(self, points):
        """Evaluate at an (N, dim) array of float points."""
        pts = np.asarray(points, dtype=np.float64)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}")
        out = np.zeros(len(pts))
        powers = {}
        for e, c in self.terms.items():
            term = np.full(len(pts), float(c))
            for axis, k in enumerate(e):
                if k:
                    key = (axis, k)
                    if key not in powers:
                        powers[key] = pts[:, axis] ** k
                    term = term * powers[key]
            out += term
        return out[0] if single else out

    # -- text --------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        names = variable_names(self.dim)
        pieces = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), kv[0])):
            factors = [f"{n}^{k}" if k > 1 else n for n, k in zip(names, e) if k]
            mag = abs(c)
            body = "*".join(([str(mag)] if mag != 1 or not factors else []) + factors)
            if pieces:
                pieces.append((" - " if c < 0 else " + ") + body)
            else:
                pieces.append(("-" if c < 0 else "") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"Polynomial(dim={self.dim}, {str(self)!r})"


def _check_exponents(exps, dim):
    exps = tuple(exps)
    if len(exps) != dim:
        raise BadExponent(f"exponent vector {exps} has length {len(exps)}, expected {dim}")
    for k in exps:
        if isinstance(k, bool) or int(k) != k or k < 0:
            raise BadExponent(f"exponent {k!r} must be a nonnegative integer")
    return tuple(int(k) for k in exps)


def make_polynomial(dim, terms) -> Polynomial:
    """Canonicalize ``terms`` (pairs or dict of exponent vector → coefficient)."""
    return Polynomial(dim, terms)


_TERM = re.compile(r"([+-]?)([^+-]+)")
_NUMBER = re.compile(r"^\d+(/\d+)?$")
_FACTOR = re.compile(r"^([a-z]\d*)(?:\^(\d+))?$")


def parse_polynomial(text: str, dim: int) -> Polynomial:
    """Parse ``c*x1^a1*...*xd^ad`` terms joined by ``+``/``-``.

    Variables may be written ``x, y, z, w`` (dim ≤ 4) or ``x1 .. xd``.
    Coefficients are integers or ``p/q`` rationals.
    """
    src = text.replace(" ", "")
    if not src:
        raise ParseError("empty polynomial")
    names = {n: i for i, n in enumerate(variable_names(dim))}
    names.update({f"x{i + 1}": i for i in range(dim)})
    pos = 0
    terms = []
    for m in _TERM.finditer(src):
        if m.start() != pos or (m.group(1) == "" and pos != 0):
            raise ParseError(f"unexpected text at column {pos + 1} of {text!r}")
        pos = m.end()
        coeff = Fraction(-1 if m.group(1) == "-" else 1)
        exps = [0] * dim
        for factor in m.group(2).split("*"):
            if _NUMBER.match(factor):
                coeff *= Fraction(factor)
                continue
            fm = _FACTOR.match(factor)
            if not fm or fm.group(1) not in names:
                raise ParseError(f"bad factor {factor!r} in {text!r}")
            exps[names[fm.group(1)]] += int(fm.group(2) or 1)
        terms.append((tuple(exps), coeff))
    if pos != len(src):
        raise ParseError(f"trailing text in {text!r}")
    return Polynomial(dim, terms)


def complex_power(m: int, part="real") -> Polynomial:
    """Re or Im of (x + i y)^m as a polynomial in two variables."""
    out = []
    for j in range(m + 1):
        # i^j is real for even j, imaginary for odd j
        if (j % 2 == 0) != (part == "real"):
            continue
        sign = (-1) ** (j // 2)
        out.append(((m - j, j), sign * comb(m, j)))
    return Polynomial(2, out)
