"""
Coefficient Rings, Monomials and Orders

A RingSpec fixes the variables, the center P = <x_1, ..., x_c> and the base
field (QQ or GF(p)). Polynomial arithmetic itself is delegated to sympy's
sparse PolyRing; this module only adds what sympy does not know about:

- the flag order (P-order, lex on P-variables, total degree, lex on the rest)
  whose MINIMUM is the initial monomial of a polynomial;
- ModuleFrame, the Schreyer data attached to the basis of a free module so
  that module terms m*e_k can be compared.

Note: Flag order keys
---------------------
Comparing keys is cheaper and clearer than a comparator. A monomial with a
smaller key is a smaller monomial, so ``min(terms, key=...)`` is the initial
term. Negated exponents turn "lex prefers larger x_1 exponent" into an
ascending tuple comparison.
"""

from dataclasses import dataclass
from functools import cached_property
import logging
import re

from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.monomials import monomial_mul
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyRing

from .errors import DimensionError, PreconditionError

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]
MonomialKey = tuple[int, tuple[int, ...], int, tuple[int, ...]]

_IDENTIFIER = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")
_RESERVED = frozenset({"Integer", "Rational", "Symbol"})


# ============================================================================
# Ring Specification
# ============================================================================

@dataclass(frozen=True)
class RingSpec:
    """
    Variables, center size and field of a localized polynomial ring k[x]_m.

    ``characteristic`` is 0 for QQ or a prime p for GF(p). The first ``center``
    variables generate the prime P.
    """

    names: tuple[str, ...]
    center: int
    characteristic: int = 0

    def __post_init__(self):
        if not self.names:
            raise PreconditionError("a ring needs at least one variable")
        if len(set(self.names)) != len(self.names):
            raise PreconditionError("variable names must be pairwise distinct", names=list(self.names))
        for name in self.names:
            if not _IDENTIFIER.match(name) or name in _RESERVED:
                raise PreconditionError(f"invalid variable name {name!r}")
        if not 1 <= self.center <= len(self.names):
            raise PreconditionError(
                f"center size must satisfy 1 <= c <= n, got c={self.center}, n={len(self.names)}"
            )
        if self.characteristic and not isprime(self.characteristic):
            raise PreconditionError(f"field characteristic {self.characteristic} is not prime")

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def c(self) -> int:
        return self.center

    @cached_property
    def domain(self):
        return GF(self.characteristic) if self.characteristic else QQ

    @cached_property
    def ring(self) -> PolyRing:
        # The sympy ring order is irrelevant here: initial terms always come
        # from the flag order keys below.
        return PolyRing(",".join(self.names), self.domain, lex)

    @property
    def gens(self):
        return self.ring.gens

    @property
    def one_monomial(self) -> Monomial:
        return (0,) * self.n

    @property
    def field_label(self) -> str:
        return f"Fp {self.characteristic}" if self.characteristic else "Q"

    def center_names(self) -> tuple[str, ...]:
        return self.names[: self.center]

    def key(self, m: Monomial) -> MonomialKey:
        return monomial_key(m, self.center)


def monomial_key(m: Monomial, c: int) -> MonomialKey:
    """Flag order key: (ordP, lex within P, total degree, lex on the rest)."""
    return (sum(m[:c]), tuple(-e for e in m[:c]), sum(m), tuple(-e for e in m[c:]))


def ord_p_monomial(m: Monomial, c: int) -> int:
    return sum(m[:c])


def compare_monomials(m1: Monomial, m2: Monomial, spec: RingSpec) -> int:
    """Return -1, 0 or 1 as m1 is smaller than, equal to or greater than m2."""
    if len(m1) != spec.n or len(m2) != spec.n:
        raise DimensionError(
            f"monomials must have {spec.n} exponents, got {len(m1)} and {len(m2)}"
        )
    k1, k2 = spec.key(m1), spec.key(m2)
    return (k1 > k2) - (k1 < k2)


# ============================================================================
# Schreyer Frames
# ============================================================================

@dataclass(frozen=True)
class ModuleFrame:
    """
    Order data for the basis e_1, ..., e_r of a free module.

    Each e_k carries a total monomial ``shifts[k]`` (the monomial of the image
    of e_k's initial term all the way down to R) and a ``paths[k]`` tuple of
    indices used to break ties. The term m*e_k is ordered by
    ``(flag_key(m * shifts[k]), paths[k])``.
    """

    shifts: tuple[Monomial, ...]
    paths: tuple[tuple[int, ...], ...]

    @classmethod
    def for_ring(cls, spec: RingSpec) -> "ModuleFrame":
        """Frame of R itself, viewed as a free module of rank one."""
        return cls(shifts=(spec.one_monomial,), paths=((),))

    @classmethod
    def from_initials(cls, initials: list[Monomial]) -> "ModuleFrame":
        """Frame of R^m whose basis maps onto generators with these initial monomials."""
        return cls(shifts=tuple(initials), paths=tuple((k,) for k in range(len(initials))))

    @property
    def rank(self) -> int:
        return len(self.shifts)

    def key(self, component: int, m: Monomial, spec: RingSpec):
        if not 0 <= component < self.rank:
            raise DimensionError(f"component {component + 1} outside rank {self.rank}")
        return (spec.key(monomial_mul(m, self.shifts[component])), self.paths[component])

    def mark(self, component: int, spec: RingSpec) -> int:
        return ord_p_monomial(self.shifts[component], spec.c)

    def marks(self, spec: RingSpec) -> tuple[int, ...]:
        return tuple(self.mark(k, spec) for k in range(self.rank))

    def degree(self, component: int) -> int:
        return sum(self.shifts[component])

    def extend(self, initials: list[tuple[int, Monomial]]) -> "ModuleFrame":
        """
        Frame of the module whose k-th basis vector maps to a vector with
        initial term ``mu * e_i`` where ``initials[k] == (i, mu)``.
        """
        shifts = []
        paths = []
        for k, (component, mu) in enumerate(initials):
            shifts.append(monomial_mul(mu, self.shifts[component]))
            paths.append(self.paths[component] + (k,))
        return ModuleFrame(shifts=tuple(shifts), paths=tuple(paths))


def compare_module(
    t1: tuple[Monomial, int],
    t2: tuple[Monomial, int],
    spec: RingSpec,
    frame: ModuleFrame | list[Monomial],
) -> int:
    """
    Compare module terms ``(monomial, component)`` under the Schreyer order.

    ``frame`` may be a ModuleFrame or the list of initial monomials of the
    target basis (component indices are 0-based).
    """
    if not isinstance(frame, ModuleFrame):
        frame = ModuleFrame.from_initials(list(frame))
    (m1, i1), (m2, i2) = t1, t2
    if len(m1) != spec.n or len(m2) != spec.n:
        raise DimensionError(f"monomials must have {spec.n} exponents")
    k1, k2 = frame.key(i1, m1, spec), frame.key(i2, m2, spec)
    return (k1 > k2) - (k1 < k2)
