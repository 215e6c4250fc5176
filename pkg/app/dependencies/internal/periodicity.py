"""
Asymptotic Periodicity of Matrix Factorizations

A matrix factorization (A, B) of w is asymptotically periodic under the
P-adic valuation when integer windows a, b exist with

    min_j (aVal[i][j] + a[j]) >= b[i]        for every row i of A,
    min_j (bVal[i][j] + b[j]) >= a[i] + d    for every row i of B,

where d = ord_P(w) and zero entries (valuation None) impose nothing. These
are difference constraints

    b_i - a_j <= aVal[i][j],    a_i - b_j <= bVal[i][j] - d,

decided with Bellman-Ford from a virtual source. Windows can be shifted by
any integer, so feasible answers are moved to positive values; infeasible
answers carry a negative cycle of constraint edges.

Valuation matrices use ``None`` for the infinite valuation of a zero entry.
"""

from dataclasses import dataclass, field
from itertools import product
import logging
import random
from typing import Sequence

from .coeffring import RingSpec
from .errors import (
    DimensionError,
    DomainError,
    InternalInconsistencyError,
    PreconditionError,
    UnsupportedError,
)
from .poly import INFINITY, PolyMatrix, ord_p

logger = logging.getLogger(__name__)

Valuation = int | None
ValuationMatrix = tuple[tuple[Valuation, ...], ...]


# ============================================================================
# Instances and Certificates
# ============================================================================

@dataclass(frozen=True)
class PeriodicityInstance:
    a_val: ValuationMatrix
    b_val: ValuationMatrix
    d: int

    def __post_init__(self):
        n = len(self.a_val)
        for name, matrix in (("aVal", self.a_val), ("bVal", self.b_val)):
            if len(matrix) != n or any(len(row) != n for row in matrix):
                raise DimensionError(f"{name} must be {n}x{n}")
            if any(v is not None and v < 0 for row in matrix for v in row):
                raise DomainError(f"{name} has a negative valuation")
        if self.d < 1:
            raise DomainError("the valuation d of w must be at least 1")

    @property
    def size(self) -> int:
        return len(self.a_val)

    @classmethod
    def from_lists(cls, a_val, b_val, d: int) -> "PeriodicityInstance":
        return cls(tuple(tuple(row) for row in a_val), tuple(tuple(row) for row in b_val), d)


@dataclass(frozen=True)
class ConstraintEdge:
    """Difference constraint ``target - source <= weight``."""

    source: str
    target: str
    weight: int


@dataclass(frozen=True)
class PeriodicityCertificate:
    feasible: bool
    a: tuple[int, ...] | None = None
    b: tuple[int, ...] | None = None
    cycle: tuple[ConstraintEdge, ...] = ()
    cycle_weight: int | None = None


def valuation_matrix(matrix: PolyMatrix, spec: RingSpec) -> ValuationMatrix:
    """Entrywise ord_P, with None for zero entries."""
    return tuple(
        tuple(None if ord_p(e, spec) == INFINITY else int(ord_p(e, spec)) for e in row)
        for row in matrix.rows
    )


def instance_from_matrices(A: PolyMatrix, B: PolyMatrix, w, spec: RingSpec) -> PeriodicityInstance:
    if A.shape != B.shape or A.nrows != A.ncols:
        raise DimensionError(f"A {A.shape} and B {B.shape} must be square of equal size")
    return PeriodicityInstance(valuation_matrix(A, spec), valuation_matrix(B, spec), int(ord_p(w, spec)))


def _variables(n: int) -> list[str]:
    return [f"a{i + 1}" for i in range(n)] + [f"b{i + 1}" for i in range(n)]


def constraint_edges(inst: PeriodicityInstance) -> list[ConstraintEdge]:
    edges = []
    for i in range(inst.size):
        for j in range(inst.size):
            if inst.a_val[i][j] is not None:
                edges.append(ConstraintEdge(f"a{j + 1}", f"b{i + 1}", inst.a_val[i][j]))
            if inst.b_val[i][j] is not None:
                edges.append(ConstraintEdge(f"b{j + 1}", f"a{i + 1}", inst.b_val[i][j] - inst.d))
    return edges


def _shift_positive(values: dict[str, int]) -> dict[str, int]:
    shift = 1 - min(values.values())
    return {k: v + shift for k, v in values.items()}


def _split(values: dict[str, int], n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return (
        tuple(values[f"a{i + 1}"] for i in range(n)),
        tuple(values[f"b{i + 1}"] for i in range(n)),
    )


def check_asymptotic_periodicity(inst: PeriodicityInstance) -> PeriodicityCertificate:
    """Bellman-Ford on the constraint graph; a virtual source reaches every variable at 0."""
    nodes = _variables(inst.size)
    edges = constraint_edges(inst)
    dist = {v: 0 for v in nodes}
    pred: dict[str, ConstraintEdge | None] = {v: None for v in nodes}

    changed = None
    for _ in range(len(nodes) + 1):
        changed = None
        for edge in edges:
            if dist[edge.source] + edge.weight < dist[edge.target]:
                dist[edge.target] = dist[edge.source] + edge.weight
                pred[edge.target] = edge
                changed = edge.target
        if changed is None:
            break

    if changed is None:
        a, b = _split(_shift_positive(dist), inst.size)
        logger.info("periodicity instance of size %d is feasible", inst.size)
        return PeriodicityCertificate(True, a, b)

    # Walking back |V| predecessor steps lands on the cycle.
    node = changed
    for _ in range(len(nodes)):
        node = pred[node].source
    cycle = []
    current = node
    while True:
        edge = pred[current]
        cycle.append(edge)
        current = edge.source
        if current == node:
            break
    cycle.reverse()
    weight = sum(e.weight for e in cycle)
    logger.info("periodicity instance infeasible; cycle weight %d", weight)
    return PeriodicityCertificate(False, cycle=tuple(cycle), cycle_weight=weight)


def _row_min(row: Sequence[Valuation], windows: Sequence[int]) -> float:
    return min((v + w for v, w in zip(row, windows) if v is not None), default=INFINITY)


def verify_certificate(inst: PeriodicityInstance, cert: PeriodicityCertificate) -> bool:
    """Direct substitution (feasible) or recomputed cycle weight (infeasible)."""
    if cert.feasible:
        if cert.a is None or cert.b is None:
            return False
        if len(cert.a) != inst.size or len(cert.b) != inst.size:
            return False
        if any(v <= 0 for v in cert.a + cert.b):
            return False
        return all(
            _row_min(inst.a_val[i], cert.a) >= cert.b[i]
            and _row_min(inst.b_val[i], cert.b) >= cert.a[i] + inst.d
            for i in range(inst.size)
        )
    if not cert.cycle:
        return False
    valid = set(constraint_edges(inst))
    if any(edge not in valid for edge in cert.cycle):
        return False
    closes = all(
        cert.cycle[k].target == cert.cycle[(k + 1) % len(cert.cycle)].source
        for k in range(len(cert.cycle))
    )
    weight = sum(e.weight for e in cert.cycle)
    return closes and weight < 0 and weight == cert.cycle_weight


def shift_certificate(cert: PeriodicityCertificate, k: int) -> PeriodicityCertificate:
    return PeriodicityCertificate(True, tuple(v + k for v in cert.a), tuple(v + k for v in cert.b))


def brute_force_feasible(inst: PeriodicityInstance, bound: int = 10) -> bool:
    """
    Exhaustive search with a_1 = 0 and every window in [-bound, bound].

    For fixed a, the largest admissible b (the row minima, clipped to the
    bound) is the best choice for the second family of inequalities.
    """
    n = inst.size
    for rest in product(range(-bound, bound + 1), repeat=n - 1):
        a = (0, *rest)
        b = []
        for i in range(n):
            best = _row_min(inst.a_val[i], a)
            b.append(bound if best == INFINITY else min(int(best), bound))
        if any(v < -bound for v in b):
            continue
        if all(_row_min(inst.b_val[i], b) >= a[i] + inst.d for i in range(n)):
            return True
    return False


def random_instance(rng: random.Random, n: int = 2) -> PeriodicityInstance:
    choices = [None, 0, 1, 2, 3]
    a_val = [[rng.choice(choices) for _ in range(n)] for _ in range(n)]
    b_val = [[rng.choice(choices) for _ in range(n)] for _ in range(n)]
    return PeriodicityInstance.from_lists(a_val, b_val, rng.randint(1, 3))


# ============================================================================
# Tight Windows
# ============================================================================

def cone_windows(val: ValuationMatrix, windows: Sequence[int]) -> tuple[Valuation, ...]:
    """Largest target windows min_j(val[i][j] + windows[j]); None for zero rows."""
    return tuple(
        None if _row_min(row, windows) == INFINITY else int(_row_min(row, windows))
        for row in val
    )


def tighten_certificate(inst: PeriodicityInstance, cert: PeriodicityCertificate) -> PeriodicityCertificate:
    if not cert.feasible:
        raise PreconditionError("only feasible certificates can be tightened")
    cone = cone_windows(inst.a_val, cert.a)
    b = tuple(old if new is None else new for old, new in zip(cert.b, cone))
    tightened = PeriodicityCertificate(True, cert.a, b)
    if not verify_certificate(inst, tightened):
        raise InternalInconsistencyError("tightened windows fail substitution")
    return tightened


# ============================================================================
# Knoerrer-type Transforms and Extension Sums
# ============================================================================

@dataclass(frozen=True)
class TransformResult:
    instance: PeriodicityInstance
    certificate: PeriodicityCertificate
    k: int
    interval: tuple[int, int]
    d_prime: int
    shape: dict = field(default_factory=dict)


def _diagonal(n: int, value: int) -> list[list[Valuation]]:
    return [[value if i == j else None for j in range(n)] for i in range(n)]


def _block(top_left, top_right, bottom_left, bottom_right) -> list[list[Valuation]]:
    rows = [list(a) + list(b) for a, b in zip(top_left, top_right)]
    rows += [list(a) + list(b) for a, b in zip(bottom_left, bottom_right)]
    return rows


def _require_feasible(cert: PeriodicityCertificate, what: str):
    if not cert.feasible:
        raise UnsupportedError(f"{what} needs an asymptotically periodic input")


def _positive(a: Sequence[int], b: Sequence[int]) -> PeriodicityCertificate:
    shift = 1 - min(list(a) + list(b))
    return PeriodicityCertificate(True, tuple(v + shift for v in a), tuple(v + shift for v in b))


def knorrer_double(
    inst: PeriodicityInstance,
    cert: PeriodicityCertificate,
    val_plus: int,
    val_minus: int,
) -> TransformResult:
    """
    Windows for ((A, (u+iv)I), ((u-iv)I, -B)) and ((B, (u+iv)I), ((u-iv)I, -A)),
    a factorization of w + u^2 + v^2. ``val_plus``/``val_minus`` are the
    declared valuations of u+iv and u-iv.
    """
    _require_feasible(cert, "knorrer_double")
    if val_plus < 0 or val_minus < 0:
        raise DomainError("valuations of u+iv and u-iv must be non-negative")
    n, d = inst.size, inst.d
    d_prime = min(d, val_plus + val_minus)
    low, high = d_prime - d - val_plus, val_minus - d_prime
    if low > high:
        raise InternalInconsistencyError("empty window interval for the doubled factorization")
    k = high
    a_new = list(cert.a) + [v + k for v in cert.b]
    b_new = [v + min(0, val_plus + k) for v in cert.b] + [v + min(val_minus, d + k) for v in cert.a]
    new_inst = PeriodicityInstance.from_lists(
        _block(inst.a_val, _diagonal(n, val_plus), _diagonal(n, val_minus), inst.b_val),
        _block(inst.b_val, _diagonal(n, val_plus), _diagonal(n, val_minus), inst.a_val),
        d_prime,
    )
    certificate = _positive(a_new, b_new)
    if not verify_certificate(new_inst, certificate):
        raise InternalInconsistencyError("doubled windows fail substitution")
    shape = {
        "A": [["A", "(u+iv)*I"], ["(u-iv)*I", "-B"]],
        "B": [["B", "(u+iv)*I"], ["(u-iv)*I", "-A"]],
    }
    return TransformResult(new_inst, certificate, k, (low, high), d_prime, shape)


def knorrer_single(
    inst: PeriodicityInstance,
    cert: PeriodicityCertificate,
    val_u: int,
    mf=None,
) -> TransformResult:
    """Windows for (u + A, u - A), a factorization of w + u^2 when B = -A."""
    if mf is not None and mf.B != -mf.A:
        raise PreconditionError("knorrer_single needs B = -A")
    if inst.a_val != inst.b_val:
        raise PreconditionError("knorrer_single needs B = -A (valuations differ)")
    _require_feasible(cert, "knorrer_single")
    if val_u < 0:
        raise DomainError("the valuation of u must be non-negative")
    n, d = inst.size, inst.d
    d_prime = min(d, 2 * val_u)
    low, high = d_prime - d - val_u, val_u - d_prime
    if low > high:
        raise InternalInconsistencyError("empty window interval for (u + A, u - A)")
    k = high
    a_new = [min(a, b + k) for a, b in zip(cert.a, cert.b)]
    b_new = [min(b + min(0, val_u + k), a + min(val_u, d + k)) for a, b in zip(cert.a, cert.b)]
    val = [
        [
            (val_u if v is None else min(val_u, v)) if i == j else v
            for j, v in enumerate(row)
        ]
        for i, row in enumerate(inst.a_val)
    ]
    new_inst = PeriodicityInstance.from_lists(val, val, d_prime)
    certificate = _positive(a_new, b_new)
    if not verify_certificate(new_inst, certificate):
        raise InternalInconsistencyError("(u + A, u - A) windows fail substitution")
    shape = {"A": [["u*I + A"]], "B": [["u*I - A"]]}
    return TransformResult(new_inst, certificate, k, (low, high), d_prime, shape)


@dataclass(frozen=True)
class ExtensionResult:
    instance: PeriodicityInstance
    certificate: PeriodicityCertificate
    k0: int
    any_k: bool


def mf_extension_sum(
    inst1: PeriodicityInstance,
    cert1: PeriodicityCertificate,
    inst2: PeriodicityInstance,
    cert2: PeriodicityCertificate,
    e_val: Sequence[Sequence[Valuation]],
    f_val: Sequence[Sequence[Valuation]],
) -> ExtensionResult:
    """
    Windows (a (+) a'(k0), b (+) b'(k0)) for the extension
    ((A, E), (0, A')), ((B, F), (0, B')), with k0 the least admissible shift.
    """
    if not cert1.feasible or not cert2.feasible:
        raise PreconditionError("both summands must be asymptotically periodic")
    if inst1.d != inst2.d:
        raise PreconditionError("both summands must factor the same w")
    n1, n2 = inst1.size, inst2.size
    for name, val in (("E", e_val), ("F", f_val)):
        if len(val) != n1 or any(len(row) != n2 for row in val):
            raise DimensionError(f"{name} must be {n1}x{n2}")

    bounds = []
    for i in range(n1):
        for j in range(n2):
            if e_val[i][j] is not None:
                bounds.append(cert1.b[i] - e_val[i][j] - cert2.a[j])
            if f_val[i][j] is not None:
                bounds.append(cert1.a[i] + inst1.d - f_val[i][j] - cert2.b[j])
    any_k = not bounds
    k0 = max(bounds) if bounds else 0

    zeros = [[None] * n1 for _ in range(n2)]
    new_inst = PeriodicityInstance.from_lists(
        _block(inst1.a_val, e_val, zeros, inst2.a_val),
        _block(inst1.b_val, f_val, zeros, inst2.b_val),
        inst1.d,
    )
    certificate = _positive(
        list(cert1.a) + [v + k0 for v in cert2.a],
        list(cert1.b) + [v + k0 for v in cert2.b],
    )
    if not verify_certificate(new_inst, certificate):
        raise InternalInconsistencyError("extension windows fail substitution")
    return ExtensionResult(new_inst, certificate, k0, any_k)


# ============================================================================
# Families and Resolution-derived Certificates
# ============================================================================

def xab_family(a: int, b: int, spec: RingSpec, *, perturbed: bool = False):
    """
    Factorizations of x^a + y^b in the first two variables:

        A = [[x^(a-1), y^(b-1)], [y, -x]],  B = [[x, y^(b-1)], [y, -x^(a-1)]]

    and the perturbed pair adding y (resp. -x) to the first row entries.
    """
    if spec.n < 2:
        raise DimensionError("the x^a + y^b family needs two variables")
    if a < 2 or b < 2:
        raise DomainError("exponents must be at least 2")
    x, y = spec.gens[0], spec.gens[1]
    if perturbed:
        A = [[x ** (a - 1) + y, y ** (b - 1) - x], [y, -x]]
        B = [[x, y ** (b - 1) - x], [y, -x ** (a - 1) - y]]
    else:
        A = [[x ** (a - 1), y ** (b - 1)], [y, -x]]
        B = [[x, y ** (b - 1)], [y, -x ** (a - 1)]]
    w = x**a + y**b
    return PolyMatrix.from_rows(spec, A), PolyMatrix.from_rows(spec, B), w


def batch_scan(spec: RingSpec, a_range: Sequence[int], b_range: Sequence[int]) -> list[dict]:
    """Decide both members of the x^a + y^b pair over a parameter grid."""
    rows = []
    for a in a_range:
        for b in b_range:
            entry = {"a": a, "b": b}
            for label, perturbed in (("unperturbed", False), ("perturbed", True)):
                A, B, w = xab_family(a, b, spec, perturbed=perturbed)
                inst = instance_from_matrices(A, B, w, spec)
                cert = check_asymptotic_periodicity(inst)
                entry[label] = {
                    "feasible": cert.feasible,
                    "verified": verify_certificate(inst, cert),
                    "cycle_weight": cert.cycle_weight,
                }
            rows.append(entry)
    return rows


def resolution_certificate(total, mf) -> tuple[PeriodicityInstance, PeriodicityCertificate]:
    """
    Windows read off a periodic resolution: the negated marks of the source
    and target of the first odd tail map.
    """
    spec = total.system.spec
    i = total.tail_start if total.tail_start % 2 else total.tail_start + 1
    if i >= len(total.maps):
        raise PreconditionError("the totalization is too short to reach an odd tail map")
    a = [-m for m in total.term(i).marks]
    b = [-m for m in total.term(i - 1).marks]
    inst = instance_from_matrices(mf.A, mf.B, mf.w, spec)
    return inst, _positive(a, b)


__all__ = [
    "ConstraintEdge",
    "ExtensionResult",
    "PeriodicityCertificate",
    "PeriodicityInstance",
    "TransformResult",
    "batch_scan",
    "brute_force_feasible",
    "check_asymptotic_periodicity",
    "cone_windows",
    "constraint_edges",
    "instance_from_matrices",
    "knorrer_double",
    "knorrer_single",
    "mf_extension_sum",
    "random_instance",
    "resolution_certificate",
    "shift_certificate",
    "tighten_certificate",
    "valuation_matrix",
    "verify_certificate",
    "xab_family",
]
