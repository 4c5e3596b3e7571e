"""Exact arithmetic in Q(zeta_r) and its real subfields.

Elements of Q(zeta_r) are integer vectors over the power basis
1, zeta, ..., zeta^(r-2) with a shared positive denominator. The ring of
integers of the maximal real subfield K+ is Z[w] with w = zeta + zeta^-1, so
primes of K+ are read off from the factorization of the minimal polynomial
of w modulo q.
"""
import itertools
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from sympy import Poly, Rational, Symbol, factorint, isprime, multiplicity, primitive_root
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_add,
    gf_factor,
    gf_from_int_poly,
    gf_mul,
    gf_pow_mod,
    gf_rem,
    gf_sub,
)

from .logger import get_logger

logger = get_logger('numfield')

Number = Union[int, Fraction]

_Z = Symbol('z')
_PARSE_RULES = standard_transformations + (implicit_multiplication_application, convert_xor)


class FieldError(ValueError):
    """Invalid field operation: bad prime, context mismatch, non-integral reduction."""


class GeneratorSearchError(FieldError):
    """No principal generator found inside the configured coordinate box."""

    def __init__(self, q: int, shape: List[Tuple[int, int]], bound: int):
        self.q = q
        self.shape = shape
        self.bound = bound
        super().__init__(
            f"No generator found for a prime above {q} "
            f"(factorization shape {shape}, coordinate bound {bound}); "
            f"supply one with FieldContext.prime_from_generator()"
        )


def _fold(ctx: 'FieldContext', acc: List[int]) -> List[int]:
    """Reduce a length-r vector using 1 + zeta + ... + zeta^(r-1) = 0."""
    top = acc[ctx.r - 1]
    if top:
        return [c - top for c in acc[:ctx.r - 1]]
    return acc[:ctx.r - 1]


class FieldElement:
    """An element of Q(zeta_r) stored as (integer vector) / den."""

    __slots__ = ('ctx', 'num', 'den')

    def __init__(self, ctx: 'FieldContext', num: Sequence[int], den: int = 1):
        if den == 0:
            raise ZeroDivisionError("denominator is zero")
        if len(num) != ctx.degree:
            raise FieldError(f"expected {ctx.degree} coordinates, got {len(num)}")
        if den < 0:
            num = [-c for c in num]
            den = -den
        g = reduce(gcd, num, den)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        self.ctx = ctx
        self.num = tuple(int(c) for c in num)
        self.den = int(den)

    # -- coercion -------------------------------------------------------

    def _coerce(self, other) -> Optional['FieldElement']:
        if isinstance(other, FieldElement):
            if other.ctx.r != self.ctx.r:
                raise FieldError(f"context mismatch: r={self.ctx.r} vs r={other.ctx.r}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.from_rational(other)
        return None

    # -- ring operations ------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        den = self.den * other.den
        num = [a * other.den + b * self.den for a, b in zip(self.num, other.num)]
        return FieldElement(self.ctx, num, den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.ctx, [-c for c in self.num], self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            return FieldElement(self.ctx, [c * other for c in self.num], self.den)
        if isinstance(other, Fraction):
            return FieldElement(self.ctx, [c * other.numerator for c in self.num],
                                self.den * other.denominator)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        r = self.ctx.r
        acc = [0] * r
        for i, x in enumerate(self.num):
            if x:
                for j, y in enumerate(other.num):
                    if y:
                        acc[(i + j) % r] += x * y
        return FieldElement(self.ctx, _fold(self.ctx, acc), self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of a field element by zero")
            return self * (Fraction(1) / other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ctx.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> 'FieldElement':
        """Multiplicative inverse via the product of the other conjugates."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        conj = self.ctx.one
        for a in range(2, self.ctx.r):
            conj = conj * self.galois(a)
        norm = (self * conj).to_fraction()
        return conj * (Fraction(1) / norm)

    # -- comparisons ----------------------------------------------------

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except FieldError:
            return False
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.ctx.r, self.num, self.den))

    def __bool__(self):
        return not self.is_zero()

    def is_zero(self) -> bool:
        return not any(self.num)

    # -- predicates -----------------------------------------------------

    def is_integral(self) -> bool:
        return self.den == 1

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def in_kplus(self) -> bool:
        return self == self.galois(-1)

    def in_k0(self) -> bool:
        ctx = self.ctx
        if not ctx.has_k0:
            raise FieldError(f"K0 does not exist for r={ctx.r}")
        return self == self.galois(pow(ctx.g, (ctx.r - 1) // 6, ctx.r))

    def in_k(self) -> bool:
        ctx = self.ctx
        if not ctx.has_k:
            raise FieldError(f"k does not exist for r={ctx.r}")
        return self == self.galois(pow(ctx.g, (ctx.r - 1) // 4, ctx.r))

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise FieldError("element is not rational")
        return Fraction(self.num[0], self.den)

    # -- Galois action and norms ----------------------------------------

    def galois(self, a: int) -> 'FieldElement':
        """Apply zeta -> zeta^a."""
        r = self.ctx.r
        a %= r
        if a == 0:
            raise FieldError("Galois exponent must be a unit mod r")
        acc = [0] * r
        for i, c in enumerate(self.num):
            if c:
                acc[(a * i) % r] += c
        return FieldElement(self.ctx, _fold(self.ctx, acc), self.den)

    def norm(self) -> Fraction:
        """Norm from Q(zeta_r) to Q."""
        result = self.ctx.one
        for a in range(1, self.ctx.r):
            result = result * self.galois(a)
        return result.to_fraction()

    def norm_kplus(self) -> Fraction:
        """Norm from K+ to Q; the element must lie in K+."""
        if not self.in_kplus():
            raise FieldError("norm_kplus requires an element of K+")
        result = self.ctx.one
        for a in range(1, self.ctx.kplus_degree + 1):
            result = result * self.galois(a)
        return result.to_fraction()

    def __repr__(self):
        return f"FieldElement(r={self.ctx.r}, {list(self.num)}/{self.den})"

    def to_text(self) -> str:
        """Power-basis coordinates as a bracketed list of rationals."""
        return '[' + ', '.join(str(Fraction(c, self.den)) for c in self.num) + ']'


class ResidueField:
    """F_{q^f} presented as F_q[t]/(h); elements are integer codes sum c_i q^i."""

    def __init__(self, q: int, modulus: Sequence[int]):
        self.q = q
        self.modulus = [int(c) % q for c in modulus]
        self.degree = len(self.modulus) - 1
        self.size = q ** self.degree
        self._chi: Optional[List[int]] = None

    def __repr__(self):
        return f"ResidueField(q={self.q}, f={self.degree})"

    # codes <-> dense descending polynomials
    def _encode(self, poly: Sequence[int]) -> int:
        code = 0
        for c in poly:
            code = code * self.q + int(c)
        return code

    def _decode(self, code: int) -> List[int]:
        digits = []
        while code:
            code, d = divmod(code, self.q)
            digits.append(d)
        return digits[::-1]

    def from_poly(self, poly: Sequence[int]) -> int:
        """Code of a descending integer polynomial in t reduced mod (q, h)."""
        reduced = gf_rem(gf_from_int_poly([int(c) for c in poly], self.q), self.modulus, self.q, ZZ)
        return self._encode(reduced)

    def from_int(self, n: int) -> int:
        return int(n) % self.q

    def is_zero(self, a: int) -> bool:
        return a == 0

    def add(self, a: int, b: int) -> int:
        if self.degree == 1:
            return (a + b) % self.q
        return self._encode(gf_add(self._decode(a), self._decode(b), self.q, ZZ))

    def sub(self, a: int, b: int) -> int:
        if self.degree == 1:
            return (a - b) % self.q
        return self._encode(gf_sub(self._decode(a), self._decode(b), self.q, ZZ))

    def neg(self, a: int) -> int:
        return self.sub(0, a)

    def mul(self, a: int, b: int) -> int:
        if self.degree == 1:
            return (a * b) % self.q
        prod = gf_mul(self._decode(a), self._decode(b), self.q, ZZ)
        return self._encode(gf_rem(prod, self.modulus, self.q, ZZ))

    def pow(self, a: int, n: int) -> int:
        if self.degree == 1:
            return pow(a, n, self.q)
        if n == 0:
            return 1
        return self._encode(gf_pow_mod(self._decode(a), n, self.modulus, self.q, ZZ))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in residue field")
        return self.pow(a, self.size - 2)

    def pth_root(self, a: int) -> int:
        """Inverse Frobenius: the unique b with b^q = a."""
        return self.pow(a, self.size // self.q)

    def chi(self, a: int) -> int:
        """Quadratic character (0, 1 or -1); odd characteristic only."""
        if self.q == 2:
            raise FieldError("quadratic character needs odd characteristic")
        if self._chi is None:
            table = [-1] * self.size
            table[0] = 0
            for x in range(1, self.size):
                table[self.mul(x, x)] = 1
            self._chi = table
        return self._chi[a]

    def is_square(self, a: int) -> bool:
        if self.q == 2:
            return True
        return self.chi(a) >= 0

    def elements(self) -> range:
        return range(self.size)

    def evaluate(self, coeffs: Sequence[int], x: int) -> int:
        """Horner evaluation of a descending polynomial with code coefficients."""
        acc = 0
        for c in coeffs:
            acc = self.add(self.mul(acc, x), c)
        return acc

    def roots(self, coeffs: Sequence[int]) -> List[int]:
        """Distinct roots in the field, by exhaustion."""
        return [x for x in self.elements() if self.evaluate(coeffs, x) == 0]


class PrimeIdeal:
    """A prime of K+ with a principal generator."""

    def __init__(self, ctx: 'FieldContext', q: int, modulus: Sequence[int],
                 generator: 'FieldElement', ramification: int = 1, label: str = None):
        self.ctx = ctx
        self.q = q
        self.modulus = tuple(int(c) for c in modulus)
        self.residue_degree = len(self.modulus) - 1
        self.ramification = ramification
        self.generator = generator
        self.norm = q ** self.residue_degree
        self.residue_field = ResidueField(q, self.modulus)
        self.label = label or ctx.prime_label(q, generator, inert=self.residue_degree == ctx.kplus_degree)
        self._gen_inverse: Optional[FieldElement] = None

    @property
    def key(self) -> str:
        """Embedding-free identifier: q and the residue polynomial of w."""
        return f"{self.q}:" + ','.join(str(c) for c in self.modulus)

    def __repr__(self):
        return f"PrimeIdeal({self.label}, N={self.norm}, e={self.ramification})"

    def __eq__(self, other):
        return isinstance(other, PrimeIdeal) and other.ctx.r == self.ctx.r and other.key == self.key

    def __hash__(self):
        return hash((self.ctx.r, self.key))

    def reduce(self, x: FieldElement) -> int:
        """Image of an element of K+ in the residue field."""
        wpoly = self.ctx.to_w_poly(x)
        q = self.q
        coeffs = []
        for c in reversed(wpoly):
            if c.denominator % q == 0:
                raise FieldError(f"element is not integral at {self.label}")
            coeffs.append(c.numerator * pow(c.denominator, -1, q) % q)
        return self.residue_field.from_poly(coeffs)

    def lift(self, code: int) -> FieldElement:
        """An element of Z[w] reducing to the given residue code."""
        digits = []
        while code:
            code, d = divmod(code, self.q)
            digits.append(d)
        result = self.ctx.zero
        for i, d in enumerate(digits):
            if d:
                result = result + self.ctx.w_power(i) * d
        return result

    def valuation(self, x: FieldElement) -> int:
        if x.is_zero():
            raise FieldError("valuation of zero is infinite")
        e = self.ramification
        v = -e * multiplicity(self.q, x.den)
        content = reduce(gcd, x.num)
        v += e * multiplicity(self.q, content)
        y = FieldElement(self.ctx, [c // content for c in x.num], 1)
        if self.generator.is_rational():
            # P = (q): content coprime to q means y/q is not integral
            return v
        bound = multiplicity(self.q, abs(y.norm_kplus().numerator)) // self.residue_degree
        if self._gen_inverse is None:
            self._gen_inverse = self.generator.inverse()
        k = 0
        while k < bound:
            z = y * self._gen_inverse
            if not z.is_integral():
                break
            y = z
            k += 1
        return v + k


class FieldContext:
    """Q(zeta_r) together with its Galois data and the real subfield K+."""

    def __init__(self, r: int, generator_bound: int = 5, norm_bound: int = 10 ** 6):
        if not isinstance(r, int) or r < 7 or not isprime(r):
            raise FieldError(f"r must be a prime >= 7, got {r}")
        self.r = r
        self.degree = r - 1
        self.kplus_degree = (r - 1) // 2
        self.has_k0 = r % 6 == 1
        self.has_k = r % 4 == 1
        self.g = int(primitive_root(r))
        self.generator_bound = generator_bound
        self.norm_bound = norm_bound

        self.zero = FieldElement(self, [0] * self.degree)
        self.one = self.from_rational(1)
        self.zeta = self.zeta_power(1)
        self.w = self.cos_sum(1)
        self.z = -self.w
        self._w_powers = [self.one]
        for _ in range(1, self.kplus_degree):
            self._w_powers.append(self._w_powers[-1] * self.w)
        self.w_minpoly = self._minpoly_of_w()
        n = self.kplus_degree
        self.z_minpoly = [c * (-1) ** (n + i) for i, c in enumerate(self.w_minpoly)]
        self._dickson = self._dickson_polys()
        self.pi_r = PrimeIdeal(self, r, [1, r - 2], 2 - self.w, ramification=n, label='pi')
        self._split_cache: Dict[int, List[PrimeIdeal]] = {}
        logger.debug(f"Field context r={r}: g={self.g}, K+ degree {n}, m_w={self.w_minpoly}")

    def __repr__(self):
        return f"FieldContext(r={self.r})"

    def __reduce__(self):
        return (get_context, (self.r, self.generator_bound, self.norm_bound))

    # -- constructors ---------------------------------------------------

    def from_rational(self, value: Number) -> FieldElement:
        value = Fraction(value)
        num = [0] * self.degree
        num[0] = value.numerator
        return FieldElement(self, num, value.denominator)

    def zeta_power(self, k: int) -> FieldElement:
        k %= self.r
        if k == 0:
            return self.one
        if k == self.r - 1:
            return FieldElement(self, [-1] * self.degree)
        num = [0] * self.degree
        num[k] = 1
        return FieldElement(self, num)

    def cos_sum(self, k: int) -> FieldElement:
        """w_k = zeta^k + zeta^-k."""
        return self.zeta_power(k) + self.zeta_power(-k)

    def w_power(self, i: int) -> FieldElement:
        if i < len(self._w_powers):
            return self._w_powers[i]
        return self.w ** i

    def element_from_w(self, coeffs: Sequence[Number]) -> FieldElement:
        """sum c_i w^i for ascending coefficients."""
        result = self.zero
        for c in reversed(coeffs):
            result = result * self.w + self.from_rational(c)
        return result

    def element_from_z(self, coeffs: Sequence[Number]) -> FieldElement:
        """sum c_i z^i for ascending coefficients, z = -(zeta + zeta^-1)."""
        return self.element_from_w([c * (-1) ** i for i, c in enumerate(coeffs)])

    def sigma(self, m: int, x: FieldElement) -> FieldElement:
        """Apply sigma_g^m."""
        return x.galois(pow(self.g, m % (self.r - 1), self.r))

    # -- K+ coordinates -------------------------------------------------

    def _minpoly_of_w(self) -> List[int]:
        """Ascending integer coefficients of prod (t - w_k), k = 1..(r-1)/2."""
        poly = [self.one]
        for k in range(1, self.kplus_degree + 1):
            wk = self.cos_sum(k)
            nxt = [self.zero] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] = nxt[i + 1] + c
                nxt[i] = nxt[i] - c * wk
            poly = nxt
        coeffs = []
        for c in poly:
            value = c.to_fraction()
            if value.denominator != 1:
                raise FieldError("minimal polynomial of w is not integral")
            coeffs.append(value.numerator)
        return coeffs

    def _dickson_polys(self) -> List[List[int]]:
        """D_k with zeta^k + zeta^-k = D_k(w), ascending integer coefficients."""
        polys = [[2], [0, 1]]
        for _ in range(2, self.kplus_degree + 1):
            shifted = [0] + polys[-1]
            prev = polys[-2] + [0] * (len(shifted) - len(polys[-2]))
            polys.append([a - b for a, b in zip(shifted, prev)])
        return polys

    def _reduce_w_poly(self, poly: List[int]) -> List[int]:
        n = self.kplus_degree
        poly = list(poly)
        for d in range(len(poly) - 1, n - 1, -1):
            c = poly[d]
            if c:
                for i, m in enumerate(self.w_minpoly):
                    poly[d - n + i] -= c * m
        return (poly + [0] * n)[:n]

    def to_w_poly(self, x: FieldElement) -> List[Fraction]:
        """Coordinates of x in K+ over the basis 1, w, ..., w^(n-1)."""
        if not x.in_kplus():
            raise FieldError("element is not in K+")
        r, n = self.r, self.kplus_degree
        v = list(x.num) + [0]
        doubled = [v[i] + v[(r - i) % r] for i in range(n + 1)]
        poly = [0] * (n + 1)
        poly[0] += doubled[0]
        for k in range(1, n + 1):
            for i, c in enumerate(self._dickson[k]):
                poly[i] += doubled[k] * c
        reduced = self._reduce_w_poly(poly)
        return [Fraction(c, 2 * x.den) for c in reduced]

    def to_z_poly(self, x: FieldElement) -> List[Fraction]:
        return [c * (-1) ** i for i, c in enumerate(self.to_w_poly(x))]

    def format_z(self, x: FieldElement) -> str:
        """Compact polynomial in z, e.g. 'z^2+z-3'."""
        coeffs = self.to_z_poly(x)
        expr = sum(Rational(c.numerator, c.denominator) * _Z ** i for i, c in enumerate(coeffs))
        return str(expr).replace('**', '^').replace('*', '').replace(' ', '')

    def parse_z(self, text: str) -> FieldElement:
        """Parse a polynomial in z such as 'z^2+z-3' or '-2z^2+3z+4'."""
        try:
            expr = parse_expr(text, local_dict={'z': _Z}, transformations=_PARSE_RULES)
            poly = Poly(expr, _Z)
        except Exception as e:
            raise FieldError(f"cannot parse '{text}' as a polynomial in z: {e}")
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
        return self.element_from_z(coeffs)

    # -- primes ---------------------------------------------------------

    def prime_label(self, q: int, generator: FieldElement, inert: bool = False) -> str:
        if q == self.r:
            return 'pi'
        if inert:
            return f"P{q}"
        return f"P{q}[{self.format_z(generator)}]"

    def _residue_factors(self, q: int) -> List[Tuple[List[int], int]]:
        dense = gf_from_int_poly(list(reversed(self.w_minpoly)), q)
        _, factors = gf_factor(dense, q, ZZ)
        return sorted(([int(c) for c in h], e) for h, e in factors)

    def _candidate_generators(self) -> Iterator[Tuple[int, ...]]:
        n = self.kplus_degree
        for height in range(1, self.generator_bound + 1):
            for coeffs in itertools.product(range(-height, height + 1), repeat=n):
                if max(abs(c) for c in coeffs) == height:
                    yield coeffs

    def _search_generator(self, q: int, h: List[int], shape) -> FieldElement:
        f = len(h) - 1
        target = q ** f
        for coeffs in self._candidate_generators():
            wpoly = [(c * (-1) ** i) % q for i, c in enumerate(coeffs)]
            if gf_rem(gf_from_int_poly(list(reversed(wpoly)), q), h, q, ZZ):
                continue
            elem = self.element_from_z(coeffs)
            if abs(elem.norm_kplus()) == target:
                return elem
        raise GeneratorSearchError(q, shape, self.generator_bound)

    def split_prime(self, q: int) -> List[PrimeIdeal]:
        """Primes of K+ above an unramified rational prime q."""
        if q == self.r:
            raise FieldError(f"{q} ramifies in K+; use ctx.pi_r")
        if not isprime(q):
            raise FieldError(f"{q} is not prime")
        if q in self._split_cache:
            return self._split_cache[q]
        factors = self._residue_factors(q)
        shape = [(len(h) - 1, e) for h, e in factors]
        ideals = []
        for h, e in factors:
            if e != 1:
                raise FieldError(f"{q} ramifies in K+")
            if len(factors) == 1:
                gen = self.from_rational(q)
            else:
                gen = self._search_generator(q, h, shape)
            ideals.append(PrimeIdeal(self, q, h, gen))
        logger.debug(f"Split {q} in K+ (r={self.r}): {[P.label for P in ideals]}")
        self._split_cache[q] = ideals
        return ideals

    def prime_from_generator(self, q: int, generator: Union[FieldElement, str]) -> PrimeIdeal:
        """The prime above q generated by a user-supplied element."""
        if isinstance(generator, str):
            generator = self.parse_z(generator)
        if not generator.in_kplus() or not generator.is_integral():
            raise FieldError("generator must be an integral element of K+")
        norm = abs(generator.norm_kplus())
        if q == self.r:
            if norm == q:
                return self.pi_r
            raise FieldError(f"element of norm {norm} does not generate pi")
        factors = self._residue_factors(q)
        if len(factors) == 1 and generator.is_rational():
            return self.split_prime(q)[0]
        wpoly = self.to_w_poly(generator)
        dense = list(reversed([int(c) % q for c in wpoly]))
        for h, _ in factors:
            f = len(h) - 1
            if not gf_rem(gf_from_int_poly(dense, q), h, q, ZZ) and norm == q ** f:
                return PrimeIdeal(self, q, h, generator)
        raise FieldError(f"{self.format_z(generator)} does not generate a prime above {q}")


@lru_cache(maxsize=None)
def get_context(r: int, generator_bound: int = 5, norm_bound: int = 10 ** 6) -> FieldContext:
    """Shared FieldContext per parameter set."""
    return FieldContext(r, generator_bound, norm_bound)


def field_arith(op: str, x: FieldElement, y: Union[FieldElement, int, None] = None) -> FieldElement:
    """Dispatch add / mul / inv / pow."""
    if op == 'add':
        return x + y
    if op == 'mul':
        return x * y
    if op == 'inv':
        return x.inverse()
    if op == 'pow':
        return x ** y
    raise FieldError(f"unknown field operation '{op}'")


def galois_apply(a: int, x: FieldElement) -> FieldElement:
    return x.galois(a)


def norm_to_Q(x: FieldElement, over: str = 'Q(zeta)') -> Fraction:
    """Absolute norm, computed from Q(zeta) or from K+."""
    if over == 'K+':
        return x.norm_kplus()
    return x.norm()


def split_prime(ctx: FieldContext, q: int) -> List[PrimeIdeal]:
    return ctx.split_prime(q)


def valuation(x: FieldElement, P: PrimeIdeal) -> int:
    return P.valuation(x)


def reduce_mod(x: FieldElement, P: PrimeIdeal) -> int:
    return P.reduce(x)


def rational_valuation(n: Number, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    n = Fraction(n)
    if n == 0:
        raise FieldError("valuation of zero is infinite")
    return multiplicity(p, abs(n.numerator)) - multiplicity(p, n.denominator)


def prime_factors(n: int, limit: Optional[int] = None) -> Tuple[Dict[int, int], bool]:
    """Factor |n| with sympy, trial division capped at limit.

    Returns:
        (factorization, complete) where complete is False when a composite
        cofactor remained.
    """
    n = abs(int(n))
    if n <= 1:
        return {}, True
    factors = factorint(n, limit=limit) if limit else factorint(n)
    complete = all(isprime(p) for p in factors)
    return {int(p): int(e) for p, e in factors.items()}, complete
