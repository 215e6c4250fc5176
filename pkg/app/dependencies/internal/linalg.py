"""
Exact linear algebra on graded pieces.

Graded pieces of free modules are spanned by pairs (basis index, monomial);
maps between them become matrices over the base field (or over the field of
fractions in the non-center variables). The main path uses sympy's
DomainMatrix; ``oracle_rank`` rebuilds the same pieces from sympy expressions
and ranks them with the dense Matrix, bypassing graded_map and DomainMatrix.
"""

from itertools import combinations_with_replacement
from typing import Sequence

from sympy import Matrix, Mul, Poly, expand, zeros
from sympy.polys.matrices import DomainMatrix
from sympy.polys.monomials import monomial_mul

from .coeffring import Monomial, RingSpec
from .poly import PolyMatrix

GradedBasis = list[tuple[int, Monomial]]


def monomials_of_degree(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors in ``nvars`` variables of total degree ``degree``."""
    if degree < 0:
        return []
    if nvars == 0:
        return [()] if degree == 0 else []
    result = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exps = [0] * nvars
        for v in combo:
            exps[v] += 1
        result.append(tuple(exps))
    return sorted(result, reverse=True)


def p_monomials(spec: RingSpec, order: int, nonp_cap: int = 0) -> list[Monomial]:
    """Monomials of P-order exactly ``order`` and non-center degree at most ``nonp_cap``."""
    found = []
    rest = spec.n - spec.c
    for head in monomials_of_degree(spec.c, order):
        for d in range(nonp_cap + 1):
            for tail_part in monomials_of_degree(rest, d):
                found.append(head + tail_part)
    return found


def graded_basis(spec: RingSpec, marks: Sequence[int], degree: int, nonp_cap: int = 0) -> GradedBasis:
    return [
        (l, m)
        for l, mark in enumerate(marks)
        for m in p_monomials(spec, degree - mark, nonp_cap)
    ]


def _coefficient_field(spec: RingSpec):
    if spec.c == spec.n:
        return spec.domain
    symbols = spec.ring.symbols[spec.c:]
    return spec.domain.frac_field(*symbols)


def _split(monom: Monomial, c: int) -> tuple[Monomial, Monomial]:
    return monom[:c], monom[c:]


def graded_map(
    matrix: PolyMatrix,
    src_marks: Sequence[int],
    tgt_marks: Sequence[int],
    degree: int,
    spec: RingSpec,
) -> tuple[DomainMatrix, GradedBasis, GradedBasis]:
    """
    Degree-``degree`` piece of a P-homogeneous map, with coefficients in
    k(x_{c+1}, ..., x_n). Basis monomials only involve the center variables.
    """
    field = _coefficient_field(spec)
    c = spec.c
    src = graded_basis(spec, src_marks, degree)
    tgt = graded_basis(spec, tgt_marks, degree)
    row_index = {(l, m[:c]): i for i, (l, m) in enumerate(tgt)}
    rows = [[field.zero] * len(src) for _ in tgt]
    nonp_symbols = spec.ring.symbols[c:]
    for j, (col, mu) in enumerate(src):
        for row in range(matrix.nrows):
            entry = matrix[row, col]
            if not entry:
                continue
            grouped: dict[Monomial, object] = {}
            for monom, coeff in entry.items():
                head, rest = _split(monomial_mul(monom, mu), c)
                if (row, head) not in row_index:
                    continue
                value = spec.domain.to_sympy(coeff)
                for sym, e in zip(nonp_symbols, rest):
                    value *= sym**e
                grouped[head] = grouped.get(head, 0) + value
            for head, value in grouped.items():
                i = row_index[(row, head)]
                rows[i][j] = rows[i][j] + field.from_sympy(value)
    return DomainMatrix(rows, (len(tgt), len(src)), field), src, tgt


def rank(dm: DomainMatrix) -> int:
    nrows, ncols = dm.shape
    if nrows == 0 or ncols == 0:
        return 0
    return dm.rank()


def oracle_rank(
    matrix: PolyMatrix,
    src_marks: Sequence[int],
    tgt_marks: Sequence[int],
    degree: int,
    spec: RingSpec,
) -> int:
    """
    Rank of the same graded piece as ``graded_map``, rebuilt from expanded
    sympy expressions and ranked by the dense Matrix.
    """
    center = spec.ring.symbols[: spec.c]

    def basis(marks: Sequence[int]) -> list[tuple[int, tuple[int, ...]]]:
        return [
            (l, mono) for l, mark in enumerate(marks) for mono in monomials_of_degree(spec.c, degree - mark)
        ]

    src, tgt = basis(src_marks), basis(tgt_marks)
    if not src or not tgt:
        return 0
    row_of = {key: i for i, key in enumerate(tgt)}
    dense = zeros(len(tgt), len(src))
    for j, (col, mu) in enumerate(src):
        shift = Mul(*(sym**e for sym, e in zip(center, mu)))
        for row in range(matrix.nrows):
            entry = matrix[row, col]
            if not entry:
                continue
            image = Poly(expand(entry.as_expr() * shift), *center)
            for exps, coeff in image.terms():
                i = row_of.get((row, exps))
                if i is not None:
                    dense[i, j] += coeff
    return Matrix(dense).rank()


def solve(rows: list[list], rhs: list, domain, nvars: int) -> list | None:
    """
    One solution of ``rows * s = rhs`` over a field (free variables set to 0),
    or None when the system is inconsistent.
    """
    if not rows or nvars == 0:
        return None if any(rhs) else [domain.zero] * nvars
    augmented = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = DomainMatrix(augmented, (len(rows), nvars + 1), domain).rref()
    if nvars in pivots:
        return None
    values = reduced.to_list()
    solution = [domain.zero] * nvars
    for i, p in enumerate(pivots):
        solution[p] = values[i][nvars]
    return solution
