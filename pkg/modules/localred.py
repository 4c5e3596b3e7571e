"""Local reduction data, Tate's algorithm and conductor tables."""
import math
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .frey import FreyCurve, FreyFamily, get_family
from .logger import get_logger
from .numfield import (
    FieldContext,
    FieldElement,
    PrimeIdeal,
    ResidueField,
    prime_factors,
    rational_valuation,
)
from .parallel import parallel_map
from .weierstrass import WeierstrassModel

logger = get_logger('localred')

INF = math.inf


class LocalDataError(ValueError):
    """Singular curve, unsupported place, or potentially multiplicative reduction where good was required."""


# -- places -----------------------------------------------------------------

class RationalPlace:
    """A rational prime p acting on Fraction-valued models."""

    def __init__(self, p: int):
        self.p = p
        self.characteristic = p
        self.label = str(p)
        self.uniformizer = Fraction(p)
        self.residue_field = ResidueField(p, [1, 0])

    def coerce(self, c: Any) -> Fraction:
        if isinstance(c, FieldElement):
            return c.to_fraction()
        return Fraction(c)

    def valuation(self, x: Any) -> float:
        if x == 0:
            return INF
        return rational_valuation(x, self.p)

    def reduce(self, x: Fraction) -> int:
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise LocalDataError(f"{x} is not {self.p}-integral")
        return x.numerator * pow(x.denominator, -1, self.p) % self.p

    def lift(self, code: int) -> Fraction:
        return Fraction(code)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def pi_power(self, k: int) -> Fraction:
        return Fraction(self.p) ** k


class IdealPlace:
    """A principal prime of K+ acting on FieldElement-valued models."""

    def __init__(self, prime: PrimeIdeal):
        self.prime = prime
        self.ctx = prime.ctx
        self.characteristic = prime.q
        self.label = prime.label
        self.uniformizer = prime.generator
        self.residue_field = prime.residue_field
        self._pi_inverse = prime.generator.inverse()

    def coerce(self, c: Any) -> FieldElement:
        if isinstance(c, FieldElement):
            return c
        return self.ctx.from_rational(c)

    def valuation(self, x: Any) -> float:
        if x == 0:
            return INF
        return self.prime.valuation(self.coerce(x))

    def reduce(self, x: FieldElement) -> int:
        return self.prime.reduce(self.coerce(x))

    def lift(self, code: int) -> FieldElement:
        return self.prime.lift(code)

    def from_int(self, n: int) -> FieldElement:
        return self.ctx.from_rational(n)

    def pi_power(self, k: int) -> FieldElement:
        if k >= 0:
            return self.uniformizer ** k
        return self._pi_inverse ** (-k)


Place = Union[RationalPlace, IdealPlace]


def unpack_curve(curve: Union[FreyCurve, WeierstrassModel]) -> Tuple[WeierstrassModel, Optional[FieldContext], str]:
    if isinstance(curve, FreyCurve):
        return curve.model, curve.ctx, curve.base_field
    model = curve
    for c in model.a_invariants:
        if isinstance(c, FieldElement):
            return model, c.ctx, 'K+'
    return model, None, 'Q'


def make_place(place: Union[int, PrimeIdeal, Place], ctx: Optional[FieldContext], base_field: str) -> Place:
    """Resolve an int or PrimeIdeal into a place acting on the curve's coefficients."""
    if isinstance(place, (RationalPlace, IdealPlace)):
        return place
    if isinstance(place, PrimeIdeal):
        if base_field == 'Q':
            raise LocalDataError("curve is over Q; pass a rational prime")
        return IdealPlace(place)
    if base_field == 'Q':
        return RationalPlace(int(place))
    if base_field != 'K+':
        raise LocalDataError(f"local data over {base_field} needs an explicit ideal of K0")
    if place == ctx.r:
        return IdealPlace(ctx.pi_r)
    ideals = ctx.split_prime(int(place))
    if len(ideals) != 1:
        raise LocalDataError(f"{place} splits in K+; pass one of {[P.label for P in ideals]}")
    return IdealPlace(ideals[0])


# -- Tate's algorithm ---------------------------------------------------------

class TateResult:
    """Exact local data from Tate's algorithm."""

    def __init__(self, exponent: int, kodaira: str, discriminant_valuation: int,
                 tamagawa: int, model: WeierstrassModel, split: Optional[bool] = None):
        self.exponent = exponent
        self.kodaira = kodaira
        self.discriminant_valuation = discriminant_valuation
        self.tamagawa = tamagawa
        self.model = model
        self.split = split

    def __repr__(self):
        return (f"TateResult(f={self.exponent}, {self.kodaira}, "
                f"v(Dmin)={self.discriminant_valuation}, c={self.tamagawa})")

    def to_dict(self) -> Dict[str, Any]:
        return {'exponent': self.exponent, 'kodaira': self.kodaira,
                'discriminant_valuation': self.discriminant_valuation,
                'tamagawa': self.tamagawa, 'split': self.split}


def tate_local(model: WeierstrassModel, place: Place) -> TateResult:
    """Tate's algorithm at a principal prime with uniformizer place.uniformizer."""
    R = place
    F = R.residue_field
    p = R.characteristic
    pi = R.uniformizer
    val = R.valuation

    def pdiv(x) -> bool:
        return val(x) > 0

    def preduce(x):
        return R.lift(R.reduce(x))

    def pinv(x):
        return R.lift(F.inv(R.reduce(x)))

    def proot(x):
        return R.lift(F.pth_root(R.reduce(x)))

    def divpi(x, k: int):
        return x * R.pi_power(-k)

    def quadroots(a, b, c) -> bool:
        a, b, c = R.reduce(a), R.reduce(b), R.reduce(c)
        if a == 0:
            return b != 0 or c == 0
        if p == 2:
            return bool(F.roots([a, b, c]))
        disc = F.sub(F.mul(b, b), F.mul(F.from_int(4), F.mul(a, c)))
        return F.is_square(disc)

    def cubic_roots(b, c, d) -> int:
        return len(F.roots([1, R.reduce(b), R.reduce(c), R.reduce(d)]))

    half = R.from_int(0) if p == 2 else pinv(R.from_int(2))

    A = [R.coerce(c) for c in model.a_invariants]
    weights = (1, 2, 3, 4, 6)
    nonzero = [(w, c) for w, c in zip(weights, A) if c != 0]
    if nonzero and min(val(c) for _, c in nonzero) < 0:
        e = max(math.ceil(-val(c) / w) for w, c in nonzero)
        A = [c * R.pi_power(e * w) for w, c in zip(weights, A)]
    C = WeierstrassModel(*A)

    while True:
        a1, a2, a3, a4, a6 = C.a_invariants
        b2, b4, b6, b8 = C.b_invariants
        vD = val(C.discriminant)
        if vD == 0:
            return TateResult(0, 'I0', 0, 1, C)

        # move the singular point to (0, 0)
        if p == 2:
            if pdiv(b2):
                r = proot(a4)
                t = proot(((r + a2) * r + a4) * r + a6)
            else:
                a1inv = pinv(a1)
                r = a1inv * a3
                t = a1inv * (a4 + r * r)
        elif p == 3:
            if pdiv(b2):
                r = proot(-b6)
            else:
                r = -pinv(b2) * b4
            t = a1 * r + a3
        else:
            c4, c6 = C.c4, C.c6
            if pdiv(c4):
                r = -pinv(R.from_int(12)) * b2
            else:
                r = -pinv(12 * c4) * (c6 + b2 * c4)
            t = -half * (a1 * r + a3)
        C = C.rst_transform(preduce(r), 0, preduce(t))
        a1, a2, a3, a4, a6 = C.a_invariants
        b2, b4, b6, b8 = C.b_invariants

        if not pdiv(b2):
            split = quadroots(1, a1, -a2)
            if split:
                cp = vD
            else:
                cp = 2 if vD % 2 == 0 else 1
            return TateResult(1, f'I{vD}', vD, cp, C, split)

        if val(a6) < 2:
            return TateResult(vD, 'II', vD, 1, C)
        if val(b8) < 3:
            return TateResult(vD - 1, 'III', vD, 2, C)
        if val(b6) < 3:
            cp = 3 if quadroots(1, divpi(a3, 1), -divpi(a6, 2)) else 1
            return TateResult(vD - 2, 'IV', vD, cp, C)

        # p | a1, a2; p^2 | a3, a4; p^3 | a6
        if p == 2:
            s = proot(a2)
            t = pi * proot(divpi(a6, 2))
        elif p == 3:
            s = a1
            t = a3
        else:
            s = -a1 * half
            t = -a3 * half
        C = C.rst_transform(0, s, t)
        a1, a2, a3, a4, a6 = C.a_invariants

        b = divpi(a2, 1)
        c = divpi(a4, 2)
        d = divpi(a6, 3)
        w = 27 * d * d - b * b * c * c + 4 * b * b * b * d - 18 * b * c * d + 4 * c * c * c
        x = 3 * c - b * b
        if pdiv(w):
            sw = 3 if pdiv(x) else 2
        else:
            sw = 1

        if sw == 1:
            cp = 1 + cubic_roots(b, c, d)
            return TateResult(vD - 4, 'I0*', vD, cp, C)

        if sw == 2:
            if p == 2:
                r = proot(c)
            elif p == 3:
                r = c * pinv(b)
            else:
                r = (b * c - 9 * d) * pinv(2 * x)
            C = C.rst_transform(pi * preduce(r), 0, 0)
            ix, iy = 3, 3
            while True:
                a1, a2, a3, a4, a6 = C.a_invariants
                a2t = divpi(a2, 1)
                a3t = divpi(a3, iy - 1)
                a4t = divpi(a4, ix)
                a6t = divpi(a6, ix + iy - 2)
                if pdiv(a3t * a3t + 4 * a6t):
                    if p == 2:
                        t = R.pi_power(iy - 1) * proot(a6t)
                    else:
                        t = R.pi_power(iy - 1) * preduce(-a3t * half)
                    C = C.rst_transform(0, 0, t)
                    iy += 1
                    a1, a2, a3, a4, a6 = C.a_invariants
                    a2t = divpi(a2, 1)
                    a4t = divpi(a4, ix)
                    a6t = divpi(a6, ix + iy - 2)
                    if pdiv(a4t * a4t - 4 * a6t * a2t):
                        if p == 2:
                            r = R.pi_power(ix - 1) * proot(a6t * pinv(a2t))
                        else:
                            r = R.pi_power(ix - 1) * preduce(-a4t * pinv(2 * a2t))
                        C = C.rst_transform(r, 0, 0)
                        ix += 1
                    else:
                        cp = 4 if quadroots(a2t, a4t, a6t) else 2
                        break
                else:
                    cp = 4 if quadroots(1, a3t, -a6t) else 2
                    break
            return TateResult(vD - ix - iy + 1, f'I{ix + iy - 5}*', vD, cp, C)

        # triple root
        if p == 2:
            r = b
        elif p == 3:
            r = proot(-d)
        else:
            r = -b * pinv(R.from_int(3))
        C = C.rst_transform(pi * preduce(r), 0, 0)
        a1, a2, a3, a4, a6 = C.a_invariants
        a3t = divpi(a3, 2)
        a6t = divpi(a6, 4)
        if not pdiv(a3t * a3t + 4 * a6t):
            cp = 3 if quadroots(1, a3t, -a6t) else 1
            return TateResult(vD - 6, 'IV*', vD, cp, C)
        if p == 2:
            t = -(pi * pi) * proot(a6t)
        else:
            t = (pi * pi) * preduce(-a3t * half)
        C = C.rst_transform(0, 0, t)
        a1, a2, a3, a4, a6 = C.a_invariants
        if val(a4) < 4:
            return TateResult(vD - 7, 'III*', vD, 2, C)
        if val(a6) < 6:
            return TateResult(vD - 8, 'II*', vD, 1, C)

        logger.debug(f"Non-minimal model at {R.label}; dividing by the uniformizer")
        C = C.scaled(pi)


def tate_Q(curve: Union[FreyCurve, WeierstrassModel], p: int) -> TateResult:
    """Tate's algorithm for a curve over Q at the rational prime p."""
    model, _, base = unpack_curve(curve)
    if base != 'Q':
        raise LocalDataError("tate_Q needs a curve over Q")
    if model.is_singular:
        raise LocalDataError("curve is singular")
    return tate_local(model, RationalPlace(p))


# -- valuation-based classification -----------------------------------------

class Char2Lookup:
    """Result of the residue-characteristic-2 valuation table."""

    def __init__(self, status: str, candidates: FrozenSet[int] = frozenset()):
        self.status = status
        self.candidates = candidates

    def __repr__(self):
        return f"Char2Lookup({self.status}, {sorted(self.candidates)})"

    def __eq__(self, other):
        return (isinstance(other, Char2Lookup) and other.status == self.status
                and other.candidates == self.candidates)


def char2_table_lookup(vc4: float, vc6: float, vdisc: float) -> Char2Lookup:
    """Conductor exponents at an unramified prime above 2 for the encoded valuation patterns."""
    if vdisc == 4 and vc6 == 5 and vc4 >= 4:
        return Char2Lookup('candidates', frozenset({2, 3, 4}))
    if vdisc == 16 and vc6 == 11 and vc4 >= 8:
        return Char2Lookup('non-minimal')
    if vc4 == 4 and vc6 == 6 and vdisc == 6:
        return Char2Lookup('candidates', frozenset({5, 6}))
    if vc4 == 4 and vc6 == 6 and vdisc >= 8:
        return Char2Lookup('non-minimal-or-candidates', frozenset({2, 3, 4}))
    return Char2Lookup('outside-table')


class LocalData:
    """Reduction type and conductor exponent (or candidate set) at one prime."""

    def __init__(self, place: str, characteristic: int, valuations: Tuple[float, float, float],
                 rescalings: int, reduction_type: str, candidates: FrozenSet[int],
                 method: str = 'valuations', kodaira: Optional[str] = None, note: str = ''):
        self.place = place
        self.characteristic = characteristic
        self.valuations = valuations
        self.rescalings = rescalings
        self.reduction_type = reduction_type
        self.candidates = frozenset(candidates)
        self.method = method
        self.kodaira = kodaira
        self.note = note

    @property
    def exponent(self) -> Optional[int]:
        if len(self.candidates) == 1:
            return next(iter(self.candidates))
        return None

    @property
    def is_exact(self) -> bool:
        return self.exponent is not None

    def exponent_text(self) -> str:
        if self.is_exact:
            return str(self.exponent)
        return '{' + ','.join(str(e) for e in sorted(self.candidates)) + '}'

    def to_dict(self) -> Dict[str, Any]:
        vD, vc4, vc6 = self.valuations
        return {
            'place': self.place, 'characteristic': self.characteristic,
            'v_disc': vD, 'v_c4': vc4 if vc4 != INF else None, 'v_c6': vc6 if vc6 != INF else None,
            'rescalings': self.rescalings, 'reduction': self.reduction_type,
            'exponent': self.exponent_text(), 'method': self.method,
            'kodaira': self.kodaira, 'note': self.note,
        }


def _from_tate(place: Place, result: TateResult, rescalings: int) -> LocalData:
    if result.exponent == 0:
        reduction = 'good'
    elif result.exponent == 1:
        reduction = 'multiplicative'
    else:
        reduction = 'additive'
    C = result.model
    vals = (result.discriminant_valuation, place.valuation(C.c4), place.valuation(C.c6))
    return LocalData(place.label, place.characteristic, vals, rescalings, reduction,
                     frozenset({result.exponent}), method='tate', kodaira=result.kodaira)


def local_data(curve: Union[FreyCurve, WeierstrassModel], place: Union[int, PrimeIdeal, Place],
               refine: bool = False) -> LocalData:
    """Classify reduction at a principal prime.

    Residue characteristic >= 5 is decided from valuations alone. Over Q
    characteristics 2 and 3 go through Tate's algorithm; over K+ the
    char-2 table is consulted unless refine asks for Tate.
    """
    model, ctx, base = unpack_curve(curve)
    if model.is_singular:
        raise LocalDataError("curve is singular")
    P = make_place(place, ctx, base)
    p = P.characteristic

    vD = P.valuation(model.discriminant)
    vc4 = P.valuation(model.c4)
    vc6 = P.valuation(model.c6)
    rescalings = 0
    while vc4 >= 4 and vc6 >= 6 and vD >= 12:
        vc4, vc6, vD = vc4 - 4, vc6 - 6, vD - 12
        rescalings += 1

    if p in (2, 3) and (base == 'Q' or refine):
        return _from_tate(P, tate_local(model, P), rescalings)

    vals = (vD, vc4, vc6)
    if vD == 0:
        return LocalData(P.label, p, vals, rescalings, 'good', frozenset({0}))
    if vc4 == 0:
        return LocalData(P.label, p, vals, rescalings, 'multiplicative', frozenset({1}))
    if p >= 5:
        return LocalData(P.label, p, vals, rescalings, 'additive', frozenset({2}))
    if p == 3:
        return LocalData(P.label, p, vals, rescalings, 'additive', frozenset({2, 3, 4, 5}),
                         note='char 3 exponent not decided by valuations')
    lookup = char2_table_lookup(vc4, vc6, vD)
    everything = frozenset(range(0, 9))
    if lookup.status == 'candidates':
        return LocalData(P.label, p, vals, rescalings, 'additive', lookup.candidates, method='table')
    if lookup.status == 'non-minimal-or-candidates':
        return LocalData(P.label, p, vals, rescalings, 'ambiguous', lookup.candidates | {0, 1},
                         method='table', note='model may be non-minimal')
    return LocalData(P.label, p, vals, rescalings, 'ambiguous', everything, method='table',
                     note=f"char-2 pattern {lookup.status}")


def phi_group_order(curve: Union[FreyCurve, WeierstrassModel], place: Union[int, PrimeIdeal, Place]) -> int:
    """Denominator of v(Delta_min)/12 at a prime of potentially good reduction."""
    model, ctx, base = unpack_curve(curve)
    if model.is_singular:
        raise LocalDataError("curve is singular")
    P = make_place(place, ctx, base)
    if model.c4 != 0:
        vj = 3 * P.valuation(model.c4) - P.valuation(model.discriminant)
        if vj < 0:
            raise LocalDataError(f"potentially multiplicative reduction at {P.label}")
    if base == 'Q' or P.characteristic in (2, 3):
        vmin = tate_local(model, P).discriminant_valuation
    else:
        vmin = local_data(curve, P).valuations[0]
    return 12 // math.gcd(12, int(vmin))


# -- conductor profiles ---------------------------------------------------------

class ConductorProfile:
    """Per-prime local data assembled into a formal conductor."""

    def __init__(self, curve_label: str):
        self.curve_label = curve_label
        self.entries: Dict[str, LocalData] = {}
        self.unverified: List[str] = []

    def add(self, data: LocalData):
        self.entries[data.place] = data

    @property
    def assembled(self) -> str:
        parts = []
        for label, data in self.entries.items():
            if data.candidates == {0}:
                continue
            parts.append(f"{label}^{data.exponent_text()}")
        return ' '.join(parts) if parts else '1'

    def to_dict(self) -> Dict[str, Any]:
        return {'curve': self.curve_label, 'conductor': self.assembled,
                'local': {k: v.to_dict() for k, v in self.entries.items()},
                'unverified': self.unverified}

    def to_text(self) -> str:
        lines = [f"conductor {self.assembled}"]
        for data in self.entries.values():
            lines.append(f"  {data.place:>24}  {data.reduction_type:<14} f={data.exponent_text():<10} "
                         f"v(D)={data.valuations[0]} [{data.method}] {data.note}".rstrip())
        for note in self.unverified:
            lines.append(f"  unverified: {note}")
        return '\n'.join(lines) + '\n'


def _default_support(model: WeierstrassModel, ctx: Optional[FieldContext], base: str,
                     trial_bound: int) -> Tuple[List[Any], List[str]]:
    unverified = []
    if base == 'Q':
        disc = Fraction(model.discriminant)
        factors, complete = prime_factors(disc.numerator, trial_bound)
        if not complete:
            unverified.append(f"discriminant only partly factored below {trial_bound}")
        primes = sorted(set(factors) | {2, 3})
        return primes, unverified
    norm = model.discriminant.norm_kplus() if isinstance(model.discriminant, FieldElement) else Fraction(model.discriminant)
    factors, complete = prime_factors(Fraction(norm).numerator, trial_bound)
    if not complete:
        unverified.append(f"norm of discriminant only partly factored below {trial_bound}")
    support: List[Any] = []
    for q in sorted(set(factors) | {2, ctx.r}):
        if q == ctx.r:
            support.append(ctx.pi_r)
        else:
            support.extend(ctx.split_prime(q))
    return support, unverified


def conductor_profile(curve: Union[FreyCurve, WeierstrassModel], support: Optional[Sequence[Any]] = None,
                      refine: bool = True, trial_bound: int = 10 ** 6) -> ConductorProfile:
    """Local data at each prime of the support (default: 2, r and the primes of the discriminant)."""
    model, ctx, base = unpack_curve(curve)
    if model.is_singular:
        raise LocalDataError("curve is singular")
    label = curve.family.label + f" at ({curve.a},{curve.b})" if isinstance(curve, FreyCurve) else repr(model)
    profile = ConductorProfile(label)
    if support is None:
        support, profile.unverified = _default_support(model, ctx, base, trial_bound)
    for place in support:
        profile.add(local_data(curve, place, refine=refine))
    return profile


# -- residual enumeration of conductor exponents -------------------------------

class ConductorClass:
    """Exponent of one residue class (x, y) mod 2^k, taken over four lifts."""

    def __init__(self, x: int, y: int, exponents: Tuple[int, ...]):
        self.x = x
        self.y = y
        self.exponents = tuple(exponents)

    @property
    def stable(self) -> bool:
        return len(set(self.exponents)) == 1

    def category(self) -> str:
        return divisibility_category(self.x, self.y)


def divisibility_category(x: int, y: int) -> str:
    """The class of (x, y) used by the 2-adic conductor statements."""
    s = x + y
    if s % 2:
        even = x if x % 2 == 0 else y
        return '2∤a+b, 4|even' if even % 4 == 0 else '2∤a+b, 2‖even'
    return '4|a+b' if s % 4 == 0 else '2‖a+b'


class ConductorTable:
    """Exponents at a prime above 2 for every class (x, y) mod 2^k, not both even."""

    def __init__(self, label: str, modulus_exponent: int, place: str, rows: List[ConductorClass]):
        self.label = label
        self.modulus_exponent = modulus_exponent
        self.place = place
        self.rows = rows

    @property
    def modulus(self) -> int:
        return 2 ** self.modulus_exponent

    @property
    def unstable(self) -> List[ConductorClass]:
        return [row for row in self.rows if not row.stable]

    def categories(self) -> Dict[str, FrozenSet[int]]:
        """Observed exponents per divisibility category (all lifts included)."""
        seen: Dict[str, set] = {}
        for row in self.rows:
            seen.setdefault(row.category(), set()).update(row.exponents)
        return {k: frozenset(v) for k, v in sorted(seen.items())}

    def records(self) -> List[Tuple[int, int, int]]:
        """(x, y, exponent) for stable classes."""
        return [(row.x, row.y, row.exponents[0]) for row in self.rows if row.stable]

    def to_text(self) -> str:
        lines = [f"# conductor exponents of {self.label} at {self.place}, classes mod 2^{self.modulus_exponent}"]
        for category, exps in self.categories().items():
            lines.append(f"{category:<18} {{{','.join(str(e) for e in sorted(exps))}}}")
        lines.append(f"unstable classes: {len(self.unstable)}")
        for row in self.rows:
            flag = '' if row.stable else '  UNSTABLE ' + ','.join(str(e) for e in row.exponents)
            lines.append(f"{row.x:>5} {row.y:>5} : {row.exponents[0]}{flag}")
        return '\n'.join(lines) + '\n'


def _exponent_at(family: FreyFamily, place: Place, a: int, b: int) -> int:
    curve = family.at(a, b)
    return tate_local(curve.model, place).exponent


def _conductor_exponents(job: Tuple) -> List[int]:
    descriptor, pairs = job
    family = get_family(*descriptor)
    place = make_place(2, family.ctx, family.base_field)
    return [_exponent_at(family, place, a, b) for a, b in pairs]


def projective_point(a: int, b: int, modulus: int) -> Tuple[int, int]:
    """(1, b/a) or (a/b, 1) mod an even modulus, for (a, b) not both even."""
    if a % 2:
        return 1, b * pow(a, -1, modulus) % modulus
    return a * pow(b, -1, modulus) % modulus, 1


def enumerate_conductor_classes(family: FreyFamily, modulus_exponent: int = 8,
                                workers: int = 1) -> ConductorTable:
    """Exponent at the prime above 2 for every primitive class of (a, b) mod 2^k.

    Each class is evaluated at four lifts mod 2^(k+1); disagreeing lifts
    flag the class as unstable. For scaling-invariant families the exponent
    is computed once per point (a : b) of the projective line mod 2^(k+1).
    """
    if family.base_field not in ('Q', 'K+'):
        raise LocalDataError(f"enumeration over {family.base_field} is not supported")
    modulus = 2 ** modulus_exponent
    lift = 2 * modulus
    classes = [(x, y) for x in range(modulus) for y in range(modulus) if x % 2 or y % 2]

    def lifts(x: int, y: int) -> List[Tuple[int, int]]:
        return [(x + i * modulus, y + j * modulus) for i in (0, 1) for j in (0, 1)]

    projective = family.scaling_invariant
    if projective:
        pairs = [(1, t) for t in range(lift)] + [(t, 1) for t in range(0, lift, 2)]
    else:
        pairs = [pair for x, y in classes for pair in lifts(x, y)]
    chunks = max(1, workers) * 4
    jobs = [(family.descriptor, pairs[i::chunks]) for i in range(chunks)]
    exponent: Dict[Tuple[int, int], int] = {}
    for (_, chunk), values in zip(jobs, parallel_map(_conductor_exponents, jobs, workers)):
        exponent.update(zip(chunk, values))
    logger.debug(f"{len(exponent)} Tate runs for {family.label} mod 2^{modulus_exponent}"
                 f"{' (projective)' if projective else ''}")

    rows = []
    for x, y in classes:
        if projective:
            exps = tuple(exponent[projective_point(a, b, lift)] for a, b in lifts(x, y))
        else:
            exps = tuple(exponent[pair] for pair in lifts(x, y))
        rows.append(ConductorClass(x, y, exps))
    place_label = make_place(2, family.ctx, family.base_field).label
    table = ConductorTable(family.label, modulus_exponent, place_label, rows)
    if table.unstable:
        logger.warning(f"{len(table.unstable)} classes of {family.label} mod 2^{modulus_exponent} did not stabilize")
    logger.info(f"Enumerated {len(rows)} classes of {family.label} mod 2^{modulus_exponent}")
    return table
