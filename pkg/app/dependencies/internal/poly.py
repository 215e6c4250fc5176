"""
Polynomials, Vectors and Matrices over a RingSpec

Polynomials are sympy ``PolyElement`` objects (sparse dicts monomial ->
coefficient). This module adds the local-algebra vocabulary on top:

- ``terms`` lists a polynomial ascending in the flag order, so ``terms(f)[0]``
  is the initial term and the rest is the tail;
- ``ord_p`` / ``leading_form_p`` implement the P-adic order and P-initial form;
- vectors are plain tuples of polynomials ordered by a ModuleFrame;
- PolyMatrix is a small immutable matrix type with exact products.

Polynomials print canonically: terms ascending in the flag order with
explicit ``^`` and ``*`` (``x^2 + y^2``, ``-3/2*x*y^3``), and parse back to
the same value.
"""

from dataclasses import dataclass
import math
import re
from tokenize import TokenError
from typing import Iterable, Sequence

from sympy import Expr, Integer, Rational, Symbol
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)
from sympy.polys.domains import QQ
from sympy.polys.monomials import monomial_div
from sympy.polys.rings import PolyElement, PolyRing

from app.dependencies.external.store.settings import settings

from .coeffring import Monomial, ModuleFrame, RingSpec, ord_p_monomial
from .errors import DimensionError, DomainError, JobParseError, ResourceCeilingError

Poly = PolyElement
Vec = tuple[PolyElement, ...]
Term = tuple[Monomial, object]
VecTerm = tuple[int, Monomial, object]

INFINITY = math.inf

_POLY_CHARS = re.compile(r"^[A-Za-z0-9+\-*/^()\s]*$")
_EXPONENT = re.compile(r"(?:\^|\*\*)\s*\(?\s*(\d+)")
# names the parser transformations emit; nothing else is reachable from input
_PARSER_GLOBALS = {"__builtins__": {}, "Integer": Integer, "Rational": Rational, "Symbol": Symbol}
_TRANSFORMS = standard_transformations + (convert_xor,)


# ============================================================================
# Terms, Orders and Leading Forms
# ============================================================================

def terms(f: Poly, spec: RingSpec) -> list[Term]:
    """Terms of f ascending in the flag order (initial term first)."""
    return sorted(f.items(), key=lambda item: spec.key(item[0]))


def initial(f: Poly, spec: RingSpec) -> tuple[object, Monomial]:
    """(coefficient, monomial) of the initial term, i.e. the flag-order minimum."""
    if not f:
        raise DomainError("the zero polynomial has no initial term")
    monom, coeff = min(f.items(), key=lambda item: spec.key(item[0]))
    return coeff, monom


def tail(f: Poly, spec: RingSpec) -> Poly:
    coeff, monom = initial(f, spec)
    return f - f.ring({monom: coeff})


def ord_p(f: Poly, spec: RingSpec) -> float | int:
    """Largest n with f in P^n; infinity for the zero polynomial."""
    if not f:
        return INFINITY
    return min(ord_p_monomial(m, spec.c) for m in f.keys())


def ord_m(f: Poly) -> float | int:
    """Order along the maximal ideal (lowest total degree)."""
    if not f:
        return INFINITY
    return min(sum(m) for m in f.keys())


def degree(f: Poly) -> int:
    return max((sum(m) for m in f.keys()), default=-1)


def ecart(f: Poly, spec: RingSpec) -> int:
    return degree(f) - sum(initial(f, spec)[1])


def p_part(f: Poly, spec: RingSpec, order: int) -> Poly:
    """Sum of the terms of f whose P-order is exactly ``order``."""
    return f.ring({m: c for m, c in f.items() if ord_p_monomial(m, spec.c) == order})


def leading_form_p(f: Poly, spec: RingSpec) -> tuple[Poly, Poly]:
    """Split f = L(f) + R(f) where L(f) collects the terms of minimal P-order."""
    if not f:
        raise DomainError("the zero polynomial has no leading form")
    lead = p_part(f, spec, ord_p(f, spec))
    return lead, f - lead


def is_p_homogeneous(f: Poly, spec: RingSpec) -> bool:
    return len({ord_p_monomial(m, spec.c) for m in f.keys()}) <= 1


def is_homogeneous(f: Poly) -> bool:
    return len({sum(m) for m in f.keys()}) <= 1


def constant_term(f: Poly):
    return f.get(f.ring.zero_monom, f.ring.domain.zero)


def is_unit(f: Poly) -> bool:
    """Units of the localized ring are exactly the polynomials with nonzero constant term."""
    return bool(constant_term(f))


def monic(f: Poly, spec: RingSpec) -> Poly:
    coeff, _ = initial(f, spec)
    return f.quo_ground(coeff)


def divides(m1: Monomial, m2: Monomial) -> bool:
    return monomial_div(m2, m1) is not None


def exact_quotient(f: Poly, g: Poly) -> Poly | None:
    """f / g when g divides f in the polynomial ring, else None."""
    if not g:
        raise DomainError("division by the zero polynomial")
    quotient, remainder = f.div(g)
    return None if remainder else quotient


# ============================================================================
# Formatting and Parsing
# ============================================================================

def format_coefficient(coeff, spec: RingSpec) -> str:
    return str(spec.domain.to_sympy(coeff))


def _format_monomial(monom: Monomial, spec: RingSpec) -> str:
    factors = []
    for name, exp in zip(spec.names, monom):
        if exp == 1:
            factors.append(name)
        elif exp > 1:
            factors.append(f"{name}^{exp}")
    return "*".join(factors)


def format_poly(f: Poly, spec: RingSpec) -> str:
    """Canonical string: terms ascending in the flag order, explicit ``^`` and ``*``."""
    if not f:
        return "0"
    pieces = []
    for monom, coeff in terms(f, spec):
        value = spec.domain.to_sympy(coeff)
        negative = value < 0
        magnitude = -value if negative else value
        mono = _format_monomial(monom, spec)
        if not mono:
            body = str(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{magnitude}*{mono}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


def _degree_bound(expr) -> int:
    """Upper bound for the total degree of an unexpanded expression."""
    if expr.is_Symbol:
        return 1
    if expr.is_Number:
        return 0
    if expr.is_Pow and expr.exp.is_Integer and expr.exp > 0:
        return int(expr.exp) * _degree_bound(expr.base)
    if expr.is_Mul:
        return sum(_degree_bound(a) for a in expr.args)
    return max((_degree_bound(a) for a in expr.args), default=0)


def parse_poly(text: str, spec: RingSpec) -> Poly:
    """
    Parse a polynomial written with integers, variable names, ``+ - * ^ /``
    and parentheses. ``/`` is only meaningful for rational constants.
    Exponents and the total degree are capped by ``settings.degree_ceiling``.
    """
    if not text.strip():
        raise JobParseError("empty polynomial")
    if not _POLY_CHARS.match(text):
        raise JobParseError(f"unexpected character in polynomial {text.strip()!r}")
    ceiling = settings.degree_ceiling
    for exponent in _EXPONENT.findall(text):
        if int(exponent) > ceiling:
            raise ResourceCeilingError(
                f"exponent {exponent} exceeds the degree ceiling {ceiling}", ceiling=ceiling
            )
    symbols = {name: Symbol(name) for name in spec.names}
    try:
        expr = parse_expr(
            text,
            local_dict=symbols,
            global_dict=dict(_PARSER_GLOBALS),
            transformations=_TRANSFORMS,
        )
    except (SyntaxError, TokenError, TypeError, ValueError, NameError, AttributeError) as exc:
        raise JobParseError(f"cannot parse polynomial {text.strip()!r}: {exc}") from exc
    if not isinstance(expr, Expr):
        raise JobParseError(f"{text.strip()!r} is not a polynomial")
    unknown = sorted(str(s) for s in expr.free_symbols if str(s) not in symbols)
    if unknown:
        raise JobParseError(f"undeclared variable(s) {', '.join(unknown)}")
    if (bound := _degree_bound(expr)) > ceiling:
        raise ResourceCeilingError(
            f"polynomial of degree up to {bound} exceeds the degree ceiling {ceiling}", ceiling=ceiling
        )
    rational_ring = PolyRing(",".join(spec.names), QQ, spec.ring.order)
    try:
        f = rational_ring.from_expr(expr)
    except (ValueError, TypeError) as exc:
        raise JobParseError(f"{text.strip()!r} is not a polynomial") from exc
    return to_field(f, spec)


def to_field(f: Poly, spec: RingSpec) -> Poly:
    """Move a polynomial with rational coefficients into ``spec.ring``."""
    if spec.characteristic == 0:
        return spec.ring.from_dict(dict(f))
    p = spec.characteristic
    converted = {}
    for monom, coeff in f.items():
        if coeff.numerator % p == 0 or coeff.denominator % p == 0:
            raise JobParseError(f"constant {coeff} is not invertible or vanishes modulo {p}")
        converted[monom] = spec.domain.convert_from(coeff, QQ)
    return spec.ring.from_dict(converted)


# ============================================================================
# Vectors (elements of free modules)
# ============================================================================

def zero_vec(spec: RingSpec, rank: int) -> Vec:
    return (spec.ring.zero,) * rank


def unit_vec(spec: RingSpec, rank: int, k: int) -> Vec:
    return tuple(spec.ring.one if i == k else spec.ring.zero for i in range(rank))


def vec_is_zero(v: Vec) -> bool:
    return not any(v)


def vec_add(u: Vec, v: Vec) -> Vec:
    if len(u) != len(v):
        raise DimensionError(f"vector ranks differ: {len(u)} and {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Vec, v: Vec) -> Vec:
    if len(u) != len(v):
        raise DimensionError(f"vector ranks differ: {len(u)} and {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(v: Vec, f: Poly) -> Vec:
    return tuple(a * f for a in v)


def vec_mul_term(v: Vec, monom: Monomial, coeff) -> Vec:
    return tuple(a.mul_term((monom, coeff)) if a else a for a in v)


def vec_terms(v: Vec, frame: ModuleFrame, spec: RingSpec) -> list[VecTerm]:
    """All terms (component, monomial, coefficient) ascending in the frame's order."""
    found = [(k, m, c) for k, a in enumerate(v) for m, c in a.items()]
    return sorted(found, key=lambda t: frame.key(t[0], t[1], spec))


def vec_initial(v: Vec, frame: ModuleFrame, spec: RingSpec) -> VecTerm:
    if vec_is_zero(v):
        raise DomainError("the zero vector has no initial term")
    found = ((k, m, c) for k, a in enumerate(v) for m, c in a.items())
    return min(found, key=lambda t: frame.key(t[0], t[1], spec))


def vec_degree(v: Vec, frame: ModuleFrame) -> int:
    return max(
        (sum(m) + frame.degree(k) for k, a in enumerate(v) for m in a.keys()),
        default=-1,
    )


def vec_ecart(v: Vec, frame: ModuleFrame, spec: RingSpec) -> int:
    k, m, _ = vec_initial(v, frame, spec)
    return vec_degree(v, frame) - (sum(m) + frame.degree(k))


def vec_ord_p(v: Vec, marks: Sequence[int], spec: RingSpec) -> float | int:
    """Weighted P-order min_l(ord_p(v_l) + marks[l])."""
    return min((ord_p(a, spec) + marks[l] for l, a in enumerate(v) if a), default=INFINITY)


def format_vec(v: Vec, spec: RingSpec) -> list[str]:
    return [format_poly(a, spec) for a in v]


# ============================================================================
# Matrices
# ============================================================================

@dataclass(frozen=True)
class PolyMatrix:
    """Immutable nrows x ncols matrix of polynomials (either size may be zero)."""

    ring: PolyRing
    nrows: int
    ncols: int
    rows: tuple[tuple[Poly, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows or any(len(r) != self.ncols for r in self.rows):
            raise DimensionError(f"matrix rows do not match shape {self.nrows}x{self.ncols}")

    @classmethod
    def zeros(cls, spec: RingSpec, nrows: int, ncols: int) -> "PolyMatrix":
        z = spec.ring.zero
        return cls(spec.ring, nrows, ncols, tuple((z,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, spec: RingSpec, n: int, scale: Poly | None = None) -> "PolyMatrix":
        diag = scale if scale is not None else spec.ring.one
        z = spec.ring.zero
        return cls(spec.ring, n, n, tuple(tuple(diag if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def from_rows(cls, spec: RingSpec, rows: Iterable[Iterable[Poly]], ncols: int | None = None) -> "PolyMatrix":
        body = tuple(tuple(r) for r in rows)
        width = ncols if ncols is not None else (len(body[0]) if body else 0)
        return cls(spec.ring, len(body), width, body)

    @classmethod
    def from_columns(cls, spec: RingSpec, columns: Sequence[Vec], nrows: int) -> "PolyMatrix":
        rows = tuple(tuple(col[i] for col in columns) for i in range(nrows))
        return cls(spec.ring, nrows, len(columns), rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, index: tuple[int, int]) -> Poly:
        i, j = index
        return self.rows[i][j]

    def column(self, j: int) -> Vec:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[Vec]:
        return [self.column(j) for j in range(self.ncols)]

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        z = self.ring.zero
        cols = other.columns()
        rows = []
        for row in self.rows:
            out = []
            for col in cols:
                acc = z
                for a, b in zip(row, col):
                    if a and b:
                        acc += a * b
                out.append(acc)
            rows.append(tuple(out))
        return PolyMatrix(self.ring, self.nrows, other.ncols, tuple(rows))

    def apply(self, v: Vec) -> Vec:
        if len(v) != self.ncols:
            raise DimensionError(f"cannot apply a {self.shape} matrix to a rank {len(v)} vector")
        z = self.ring.zero
        out = []
        for row in self.rows:
            acc = z
            for a, b in zip(row, v):
                if a and b:
                    acc += a * b
            out.append(acc)
        return tuple(out)

    def _same_shape(self, other: "PolyMatrix"):
        if self.shape != other.shape:
            raise DimensionError(f"matrix shapes differ: {self.shape} and {other.shape}")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._same_shape(other)
        rows = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return PolyMatrix(self.ring, self.nrows, self.ncols, rows)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._same_shape(other)
        rows = tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return PolyMatrix(self.ring, self.nrows, self.ncols, rows)

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(self.ring, self.nrows, self.ncols, tuple(tuple(-a for a in r) for r in self.rows))

    def scale(self, f: Poly) -> "PolyMatrix":
        return PolyMatrix(self.ring, self.nrows, self.ncols, tuple(tuple(a * f for a in r) for r in self.rows))

    def map_entries(self, fn) -> "PolyMatrix":
        rows = tuple(tuple(fn(i, j, a) for j, a in enumerate(r)) for i, r in enumerate(self.rows))
        return PolyMatrix(self.ring, self.nrows, self.ncols, rows)

    def is_zero(self) -> bool:
        return not any(a for r in self.rows for a in r)

    def entries(self):
        for i, r in enumerate(self.rows):
            for j, a in enumerate(r):
                yield i, j, a

    def to_strings(self, spec: RingSpec) -> list[list[str]]:
        return [[format_poly(a, spec) for a in r] for r in self.rows]


def block_matrix(
    spec: RingSpec,
    row_sizes: Sequence[int],
    col_sizes: Sequence[int],
    blocks: dict[tuple[int, int], PolyMatrix],
) -> PolyMatrix:
    """Assemble a matrix from blocks keyed by (row block, column block); missing blocks are zero."""
    z = spec.ring.zero
    rows: list[list[Poly]] = [[z] * sum(col_sizes) for _ in range(sum(row_sizes))]
    row_offsets = [sum(row_sizes[:i]) for i in range(len(row_sizes))]
    col_offsets = [sum(col_sizes[:j]) for j in range(len(col_sizes))]
    for (bi, bj), block in blocks.items():
        if block.shape != (row_sizes[bi], col_sizes[bj]):
            raise DimensionError(
                f"block ({bi}, {bj}) has shape {block.shape}, expected {(row_sizes[bi], col_sizes[bj])}"
            )
        for i, j, a in block.entries():
            rows[row_offsets[bi] + i][col_offsets[bj] + j] = a
    return PolyMatrix.from_rows(spec, rows, ncols=sum(col_sizes))


def parse_matrix(rows: Sequence[Sequence[str]], spec: RingSpec) -> PolyMatrix:
    width = len(rows[0]) if rows else 0
    if any(len(r) != width for r in rows):
        raise DimensionError("matrix rows have different lengths")
    return PolyMatrix.from_rows(spec, [[parse_poly(s, spec) for s in r] for r in rows], ncols=width)
