"""Frey-curve families attached to x^r + y^r = C z^p.

A FreyFamily holds the Weierstrass coefficients as binary forms in (a, b)
over K+ (or over Q after descent); FreyCurve is a specialization at a
coprime pair.
"""
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple, Union

from .diophantine import BinaryForm, quadratic_factors
from .logger import get_logger
from .numfield import FieldContext, FieldElement, get_context
from .weierstrass import WeierstrassModel

logger = get_logger('frey')

FAMILIES = ('I', 'II', 'III+', 'III-')


class FreyConstructionError(ValueError):
    """A defining identity failed or the parameters do not admit the family."""


def _context(r: Union[int, FieldContext]) -> FieldContext:
    return r if isinstance(r, FieldContext) else get_context(r)


def _as_rational(c: Any) -> Any:
    if isinstance(c, FieldElement):
        return c.to_fraction()
    if isinstance(c, int):
        return Fraction(c)
    return c


def _conjugate(ctx: FieldContext, m: int, c: Any) -> Any:
    return ctx.sigma(m, c) if isinstance(c, FieldElement) else c


class CoefficientTriple:
    """alpha, beta, gamma in K+ (gamma is None for family III)."""

    def __init__(self, alpha: FieldElement, beta: FieldElement, gamma: Optional[FieldElement] = None):
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma)

    def to_text(self, ctx: FieldContext) -> str:
        parts = [f"alpha = {ctx.format_z(self.alpha)}", f"beta = {ctx.format_z(self.beta)}"]
        if self.gamma is not None:
            parts.append(f"gamma = {ctx.format_z(self.gamma)}")
        return ', '.join(parts)


class FreyFamily:
    """Symbolic Frey family: Weierstrass coefficients as forms in (a, b)."""

    def __init__(self, ctx: FieldContext, family: str, indices: Tuple[int, ...],
                 coefficients: CoefficientTriple, model: WeierstrassModel,
                 parts: Optional[Tuple[BinaryForm, BinaryForm, BinaryForm]] = None,
                 base_field: str = 'K+', descended: bool = False):
        self.ctx = ctx
        self.r = ctx.r
        self.family = family
        self.indices = tuple(indices)
        self.coefficients = coefficients
        self.model = model
        self.parts = parts
        self.base_field = base_field
        self.descended = descended

    @property
    def sign(self) -> Optional[str]:
        return self.family[-1] if self.family.startswith('III') else None

    @property
    def descriptor(self) -> Tuple:
        return (self.r, self.family, self.indices, self.descended)

    @property
    def label(self) -> str:
        idx = ','.join(str(k) for k in self.indices)
        suffix = f"/{self.base_field}" if self.descended else ''
        return f"{self.family}({idx}){suffix}"

    @property
    def scaling_invariant(self) -> bool:
        """E(la, lb) is E(a, b) rescaled by u = l: every a_i is zero or a form of degree i."""
        for weight, c in zip((1, 2, 3, 4, 6), self.model.a_invariants):
            if isinstance(c, BinaryForm):
                if not c.is_zero() and c.degree != weight:
                    return False
            elif c != 0:
                return False
        return True

    def __repr__(self):
        return f"FreyFamily(r={self.r}, {self.label})"

    def at(self, a: int, b: int) -> 'FreyCurve':
        if a == 0 and b == 0:
            raise FreyConstructionError("(a, b) must not be (0, 0)")
        model = self.model.evaluate(a, b)
        if self.base_field == 'Q':
            model = model.map(_as_rational)
        values = None
        if self.parts is not None:
            values = tuple(part.evaluate(a, b) for part in self.parts)
        return FreyCurve(self, a, b, model, values)


class FreyCurve:
    """A Frey curve at a specific pair (a, b)."""

    def __init__(self, family: FreyFamily, a: int, b: int, model: WeierstrassModel,
                 values: Optional[Tuple[Any, Any, Any]] = None):
        self.family = family
        self.a = a
        self.b = b
        self.model = model
        self.values = values

    @property
    def ctx(self) -> FieldContext:
        return self.family.ctx

    @property
    def r(self) -> int:
        return self.family.r

    @property
    def tag(self) -> str:
        return self.family.family

    @property
    def indices(self) -> Tuple[int, ...]:
        return self.family.indices

    @property
    def base_field(self) -> str:
        return self.family.base_field

    @property
    def A(self):
        return self.values[0] if self.values else None

    @property
    def B(self):
        return self.values[1] if self.values else None

    @property
    def C(self):
        return self.values[2] if self.values else None

    @cached_property
    def discriminant(self):
        return self.model.discriminant

    @cached_property
    def c4(self):
        return self.model.c4

    @cached_property
    def c6(self):
        return self.model.c6

    @property
    def singular(self) -> bool:
        return self.discriminant == 0

    @cached_property
    def j_invariant(self):
        return None if self.singular else self.model.j_invariant

    def formula_invariants(self) -> Dict[str, Any]:
        """Delta, c4, c6 from the closed formulas of the family."""
        if self.tag in ('I', 'II') and not self.family.descended:
            A, B, C = self.values
            return {
                'discriminant': 16 * (A * B * C) * (A * B * C),
                'c4': -16 * (A * B + B * C + C * A),
                'c6': -32 * (C + 2 * B) * (A + 2 * B) * (2 * A + B),
            }
        if self.tag.startswith('III'):
            ctx = self.ctx
            k1, n2 = self.indices
            f1 = self.a * self.a + ctx.cos_sum(k1) * self.a * self.b + self.b * self.b
            f2 = self.a * self.a + ctx.cos_sum(n2) * self.a * self.b + self.b * self.b
            alpha, beta = self.family.coefficients.alpha, self.family.coefficients.beta
            s = self.a + self.b if self.tag == 'III+' else self.a - self.b
            return {
                'discriminant': 64 * alpha * alpha * beta * f1 * f1 * f2,
                'c4': 16 * (alpha * f1 + 4 * beta * f2),
                'c6': 64 * s * (alpha * f1 - 8 * beta * f2),
            }
        raise FreyConstructionError(f"no closed formulas for {self.family.label}")

    def galois(self, a: int) -> WeierstrassModel:
        return self.model.galois(a)

    def _format(self, c: Any) -> str:
        if isinstance(c, FieldElement):
            if c.in_kplus():
                return f"{c.to_text()}  (z: {self.ctx.format_z(c)})"
            return c.to_text()
        return str(c)

    def to_text(self) -> str:
        """Canonical text serialization used by the CLI."""
        lines = [
            f"family {self.tag}",
            f"r {self.r}",
            f"indices {','.join(str(k) for k in self.indices)}",
            f"a {self.a}",
            f"b {self.b}",
            f"base {self.base_field}",
        ]
        for name, c in zip(('a1', 'a2', 'a3', 'a4', 'a6'), self.model.a_invariants):
            lines.append(f"{name} {self._format(c)}")
        lines.append(f"c4 {self._format(self.c4)}")
        lines.append(f"c6 {self._format(self.c6)}")
        lines.append(f"discriminant {self._format(self.discriminant)}")
        lines.append(f"singular {'true' if self.singular else 'false'}")
        return '\n'.join(lines) + '\n'


# -- family I ---------------------------------------------------------------

def suitable_triples(r: int) -> List[Tuple[int, int, int]]:
    """All 1 <= k1 < k2 < k3 <= (r-1)/2."""
    ctx = _context(r)
    return list(combinations(range(1, ctx.kplus_degree + 1), 3))


def _check_indices(ctx: FieldContext, indices, length: int):
    n = ctx.kplus_degree
    if len(indices) != length or list(indices) != sorted(set(indices)):
        raise FreyConstructionError(f"indices {indices} must be {length} strictly increasing values")
    if indices[0] < 1 or indices[-1] > n:
        raise FreyConstructionError(f"indices {indices} must lie in [1, {n}]")


def family_I(r: Union[int, FieldContext], triple: Tuple[int, int, int]) -> FreyFamily:
    ctx = _context(r)
    _check_indices(ctx, tuple(triple), 3)
    k1, k2, k3 = triple
    w1, w2, w3 = ctx.cos_sum(k1), ctx.cos_sum(k2), ctx.cos_sum(k3)
    coeffs = CoefficientTriple(w3 - w2, w1 - w3, w2 - w1)
    forms = quadratic_factors(ctx)
    A = forms[k1 - 1] * coeffs.alpha
    B = forms[k2 - 1] * coeffs.beta
    C = forms[k3 - 1] * coeffs.gamma
    if not (A + B + C).is_zero():
        raise FreyConstructionError(f"alpha f_k1 + beta f_k2 + gamma f_k3 != 0 for {triple}")
    model = WeierstrassModel(0, B - A, 0, -(A * B), 0)
    return FreyFamily(ctx, 'I', tuple(triple), coeffs, model, parts=(A, B, C))


def build_I(r: Union[int, FieldContext], triple: Tuple[int, int, int], a: int, b: int) -> FreyCurve:
    return family_I(r, triple).at(a, b)


def descent_triple(r: Union[int, FieldContext]) -> Tuple[int, int, int]:
    """(1, n2, n3) with zeta^n2 = sigma^(2k)(zeta), zeta^n3 = sigma^(4k)(zeta), r = 6k + 1."""
    ctx = _context(r)
    if not ctx.has_k0:
        raise FreyConstructionError(f"r={ctx.r} is not 1 mod 6; K0 does not exist")
    k = (ctx.r - 1) // 6
    n = ctx.kplus_degree

    def fold(x: int) -> int:
        x %= ctx.r
        return x if x <= n else ctx.r - x

    n2 = fold(pow(ctx.g, 2 * k, ctx.r))
    n3 = fold(pow(ctx.g, 4 * k, ctx.r))
    return tuple(sorted((1, n2, n3)))


def descend_family(family: FreyFamily) -> FreyFamily:
    """Short model Y^2 = X^3 - 27 c4 X - 54 c6 over K0 (over Q when r = 7)."""
    ctx = family.ctx
    if family.family != 'I' or family.descended:
        raise FreyConstructionError("descent applies to family I only")
    if family.indices != descent_triple(ctx):
        raise FreyConstructionError(
            f"triple {family.indices} is not Galois-stable; use {descent_triple(ctx)}")
    a4 = -27 * family.model.c4
    a6 = -54 * family.model.c6
    m = 2 * ((ctx.r - 1) // 6)
    for form in (a4, a6):
        if form.map(lambda c: _conjugate(ctx, m, c)) != form:
            raise FreyConstructionError("descended coefficients are not fixed by sigma^(2k)")
    base = 'K0'
    if ctx.r == 7:
        a4 = a4.map(_as_rational)
        a6 = a6.map(_as_rational)
        base = 'Q'
    model = WeierstrassModel.short(a4, a6)
    logger.debug(f"Descended {family.label} to {base}")
    return FreyFamily(ctx, 'I', family.indices, family.coefficients, model,
                      parts=family.parts, base_field=base, descended=True)


def descend_to_K0(curve: FreyCurve) -> FreyCurve:
    return descend_family(curve.family).at(curve.a, curve.b)


# -- family II --------------------------------------------------------------

def family_II(r: Union[int, FieldContext], pair: Tuple[int, int]) -> FreyFamily:
    ctx = _context(r)
    _check_indices(ctx, tuple(pair), 2)
    k1, k2 = pair
    w1, w2 = ctx.cos_sum(k1), ctx.cos_sum(k2)
    coeffs = CoefficientTriple(w2 - w1, 2 - w2, w1 - 2)
    forms = quadratic_factors(ctx)
    A = BinaryForm([1, 2, 1]) * coeffs.alpha
    B = forms[k1 - 1] * coeffs.beta
    C = forms[k2 - 1] * coeffs.gamma
    if not (A + B + C).is_zero():
        raise FreyConstructionError(f"alpha (x+y)^2 + beta f_k1 + gamma f_k2 != 0 for {pair}")
    model = WeierstrassModel(0, B - A, 0, -(A * B), 0)
    return FreyFamily(ctx, 'II', tuple(pair), coeffs, model, parts=(A, B, C))


def build_II(r: Union[int, FieldContext], pair: Tuple[int, int], a: int, b: int) -> FreyCurve:
    return family_II(r, pair).at(a, b)


# -- family III -------------------------------------------------------------

def kcurve_pair(r: Union[int, FieldContext], k1: int) -> Tuple[int, int]:
    """(k1, n2) with sigma^m(zeta^k1 + zeta^-k1) = zeta^n2 + zeta^-n2, m = (r-1)/4."""
    ctx = _context(r)
    if not ctx.has_k:
        raise FreyConstructionError(f"r={ctx.r} is not 1 mod 4; no k-curves")
    n = ctx.kplus_degree
    if not 1 <= k1 <= n:
        raise FreyConstructionError(f"k1 must lie in [1, {n}]")
    m = (ctx.r - 1) // 4
    n2 = (k1 * pow(ctx.g, m, ctx.r)) % ctx.r
    if n2 > n:
        n2 = ctx.r - n2
    return (k1, n2)


def family_III(r: Union[int, FieldContext], k1: int, sign: str = '+') -> FreyFamily:
    ctx = _context(r)
    if sign not in ('+', '-'):
        raise FreyConstructionError(f"sign must be '+' or '-', got {sign!r}")
    _, n2 = kcurve_pair(ctx, k1)
    w1, w2 = ctx.cos_sum(k1), ctx.cos_sum(n2)
    denom = w2 - w1
    if sign == '+':
        coeffs = CoefficientTriple((w2 - 2) / denom, (2 - w1) / denom)
        square = BinaryForm([1, 2, 1])
        a2 = BinaryForm([2, 2])
    else:
        coeffs = CoefficientTriple((w2 + 2) / denom, -(w1 + 2) / denom)
        square = BinaryForm([1, -2, 1])
        a2 = BinaryForm([2, -2])
    forms = quadratic_factors(ctx)
    a4 = forms[k1 - 1] * coeffs.alpha
    if a4 + forms[n2 - 1] * coeffs.beta - square.map(ctx.from_rational) != 0:
        raise FreyConstructionError(f"alpha f_k1 + beta f_n2 != (x{sign}y)^2 for k1={k1}")
    model = WeierstrassModel(0, a2, 0, a4, 0)
    return FreyFamily(ctx, 'III' + sign, (k1, n2), coeffs, model)


def build_III(r: Union[int, FieldContext], k1: int, sign: str, a: int, b: int) -> FreyCurve:
    return family_III(r, k1, sign).at(a, b)


# -- conjugation structure ----------------------------------------------------

class ConjugationReport:
    """Outcome of the sigma^m checks on a family II or III curve."""

    def __init__(self, label: str, m: int):
        self.label = label
        self.m = m
        self.checks: Dict[str, bool] = {}
        self.valuations_at_pi: Dict[str, int] = {}

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.label, 'm': self.m, 'checks': self.checks,
                'valuations_at_pi': self.valuations_at_pi}


def conjugation_check(obj: Union[FreyFamily, FreyCurve]) -> ConjugationReport:
    """Verify the sigma^m action on a family II pair or a family III k-curve.

    For family III at a specific (a, b) the 2-isogenous image of the
    conjugate curve must have the same j-invariant.
    """
    curve = obj if isinstance(obj, FreyCurve) else None
    family = curve.family if curve else obj
    ctx = family.ctx
    if not ctx.has_k:
        raise FreyConstructionError(f"r={ctx.r} is not 1 mod 4; sigma^m is undefined")
    m = (ctx.r - 1) // 4
    report = ConjugationReport(family.label, m)

    def conj(form: BinaryForm) -> BinaryForm:
        return form.map(lambda c: _conjugate(ctx, m, c))

    if family.family == 'II':
        k1, k2 = family.indices
        if kcurve_pair(ctx, k1)[1] != k2:
            raise FreyConstructionError(f"{family.indices} is not a k-curve pair")
        A, B, C = family.parts
        report.checks['sigma(A) = -A'] = conj(A) == -A
        report.checks['sigma(B) = -C'] = conj(B) == -C
    elif family.family.startswith('III'):
        alpha, beta = family.coefficients.alpha, family.coefficients.beta
        report.checks['sigma(alpha) = beta'] = ctx.sigma(m, alpha) == beta
        report.checks['sigma(beta) = alpha'] = ctx.sigma(m, beta) == alpha
        report.valuations_at_pi = {
            'alpha': ctx.pi_r.valuation(alpha),
            'beta': ctx.pi_r.valuation(beta),
        }
        if curve is not None and not curve.singular:
            conjugate = curve.model.galois(pow(ctx.g, m, ctx.r))
            image = conjugate.two_isogenous()
            report.checks['j(isogenous image) = j(E)'] = image.j_invariant == curve.j_invariant
    else:
        raise FreyConstructionError("conjugation_check applies to family II or III")

    if not report.ok:
        failed = [name for name, passed in report.checks.items() if not passed]
        raise FreyConstructionError(f"conjugation identities failed: {failed}")
    return report


@lru_cache(maxsize=64)
def get_family(r: int, family: str, indices: Tuple[int, ...], descended: bool = False) -> FreyFamily:
    """Rebuild a family from its descriptor (shared by worker processes)."""
    if family == 'I':
        built = family_I(r, tuple(indices))
        return descend_family(built) if descended else built
    if family == 'II':
        return family_II(r, tuple(indices))
    if family in ('III+', 'III-'):
        return family_III(r, indices[0], family[-1])
    raise FreyConstructionError(f"unknown family {family!r}; expected one of {FAMILIES}")
