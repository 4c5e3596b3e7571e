"""The binary form phi_r, its quadratic factors, and solution bookkeeping for x^r + y^r = C z^p."""
from math import gcd
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import gcdex, integer_nthroot, isprime, multiplicity

from .logger import get_logger
from .numfield import FieldContext, FieldElement, get_context, prime_factors
from .parallel import parallel_map

logger = get_logger('diophantine')


class DiophantineError(ValueError):
    """Invalid equation data (non-primitive triple, identity fails, forbidden prime in C)."""


class BinaryForm:
    """Homogeneous form sum c_i x^(d-i) y^i.

    Coefficients may be ints, Fractions or FieldElements; arithmetic keeps
    the degree bookkeeping so that Weierstrass invariants can be computed
    symbolically in (x, y).
    """

    def __init__(self, coefficients: Sequence[Any]):
        if not coefficients:
            raise DiophantineError("a binary form needs at least one coefficient")
        self.coefficients = tuple(coefficients)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def __repr__(self):
        return f"BinaryForm(deg={self.degree}, {list(self.coefficients)})"

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, BinaryForm):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and all(
            a == b for a, b in zip(self.coefficients, other.coefficients))

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, BinaryForm):
            if other == 0:
                return self
            if self.degree == 0:
                return BinaryForm([self.coefficients[0] + other])
            raise DiophantineError("cannot add a nonzero constant to a form of positive degree")
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if other.degree != self.degree:
            raise DiophantineError(f"degree mismatch: {self.degree} vs {other.degree}")
        return BinaryForm([a + b for a, b in zip(self.coefficients, other.coefficients)])

    __radd__ = __add__

    def __neg__(self):
        return BinaryForm([-c for c in self.coefficients])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BinaryForm):
            acc = [0] * (self.degree + other.degree + 1)
            for i, a in enumerate(self.coefficients):
                if a == 0:
                    continue
                for j, b in enumerate(other.coefficients):
                    if b == 0:
                        continue
                    acc[i + j] = acc[i + j] + a * b
            return BinaryForm(acc)
        return BinaryForm([c * other for c in self.coefficients])

    def __rmul__(self, other):
        return BinaryForm([other * c for c in self.coefficients])

    def __pow__(self, n: int):
        if n < 0:
            raise DiophantineError("negative powers of forms are not defined")
        result = BinaryForm([1])
        for _ in range(n):
            result = result * self
        return result

    def evaluate(self, x, y):
        """Value at (x, y)."""
        d = self.degree
        total = 0
        for i, c in enumerate(self.coefficients):
            if c != 0:
                total = total + c * (x ** (d - i)) * (y ** i)
        return total

    def map(self, fn) -> 'BinaryForm':
        """Apply fn to every coefficient (Galois action, reduction, ...)."""
        return BinaryForm([fn(c) for c in self.coefficients])


class QuadraticForm(BinaryForm):
    """u x^2 + v xy + w y^2."""

    def __init__(self, u, v, w):
        super().__init__([u, v, w])

    @property
    def u(self):
        return self.coefficients[0]

    @property
    def v(self):
        return self.coefficients[1]

    @property
    def w(self):
        return self.coefficients[2]

    def discriminant(self):
        return self.v * self.v - 4 * self.u * self.w


def _check_r(r: int):
    if not isinstance(r, int) or r < 3 or not isprime(r):
        raise DiophantineError(f"r must be an odd prime, got {r}")


def phi_eval(r: int, a: int, b: int) -> int:
    """phi_r(a, b) = (a^r + b^r) / (a + b), with phi_r(a, -a) = r a^(r-1)."""
    _check_r(r)
    s = a + b
    if s == 0:
        return r * a ** (r - 1)
    return (a ** r + b ** r) // s


def phi_form(r: int) -> BinaryForm:
    return BinaryForm([(-1) ** i for i in range(r)])


def quadratic_factors(ctx: FieldContext) -> List[QuadraticForm]:
    """f_k = x^2 + (zeta^k + zeta^-k) xy + y^2 for k = 1..(r-1)/2; their product is phi_r."""
    return [QuadraticForm(ctx.one, ctx.cos_sum(k), ctx.one)
            for k in range(1, ctx.kplus_degree + 1)]


class SolutionClass:
    """Classification of a putative solution (a, b, c) of a^r + b^r = C c^p."""

    def __init__(self, r: int, C: int, p: int, a: int, b: int, c: int):
        self.r = r
        self.C = C
        self.p = p
        self.a = a
        self.b = b
        self.c = c
        self.trivial = abs(c) <= 1
        self.case = 'B' if (a + b) % r == 0 else 'A'
        self.first_case = c % r != 0
        self.r_exponent: Optional[int] = None
        self.sum_root: Optional[int] = None
        self.phi: int = phi_eval(r, a, b)
        self.phi_root: Optional[int] = None
        self.phi_support: Dict[int, int] = {}
        self.support_ok = True
        self.complete = True
        self.notes: List[str] = []

    def to_dict(self) -> Dict[str, Any]:
        return {
            'r': self.r, 'C': self.C, 'p': self.p,
            'a': self.a, 'b': self.b, 'c': self.c,
            'trivial': self.trivial,
            'case': self.case,
            'first_case': self.first_case,
            'r_exponent': self.r_exponent,
            'sum_root': self.sum_root,
            'phi': self.phi,
            'phi_root': self.phi_root,
            'phi_support': self.phi_support,
            'support_ok': self.support_ok,
            'status': 'complete' if self.complete else 'incomplete',
            'notes': self.notes,
        }


def _signed_root(n: int, p: int) -> Optional[int]:
    if n < 0 and p % 2 == 0:
        return None
    root, exact = integer_nthroot(abs(n), p)
    if not exact:
        return None
    return int(root) if n >= 0 else -int(root)


def classify_solution(r: int, C: int, p: int, a: int, b: int, c: int,
                      trial_bound: int = 10 ** 6) -> SolutionClass:
    """Check and classify (a, b, c).

    Case A is r not dividing a+b, where a+b = C c0^p and phi = c1^p.
    Case B is r | a+b, where a+b = C r^k c0^p and phi = r c1^p.
    """
    _check_r(r)
    if C < 1 or p < 1:
        raise DiophantineError("C and p must be positive")
    if gcd(a, b) != 1:
        raise DiophantineError(f"({a}, {b}) is not primitive")
    if a ** r + b ** r != C * c ** p:
        raise DiophantineError(f"{a}^{r} + {b}^{r} != {C}*{c}^{p}")
    C_factors, _ = prime_factors(C)
    for q in C_factors:
        if q == r or q % r == 1:
            raise DiophantineError(f"C={C} has forbidden prime factor {q}")

    result = SolutionClass(r, C, p, a, b, c)
    s = a + b
    if s != 0:
        result.r_exponent = multiplicity(r, abs(s))

    if not result.trivial:
        if result.case == 'A':
            if s % C == 0:
                result.sum_root = _signed_root(s // C, p)
            result.phi_root = _signed_root(result.phi, p)
        else:
            denominator = C * r ** result.r_exponent
            if s % denominator == 0:
                result.sum_root = _signed_root(s // denominator, p)
            if result.phi % r == 0:
                result.phi_root = _signed_root(result.phi // r, p)
        if result.sum_root is None or result.phi_root is None:
            result.notes.append("factor shape does not match the p-th power pattern")

    support, complete = prime_factors(result.phi, trial_bound)
    result.phi_support = support
    result.complete = complete
    result.support_ok = all(q == r or q % r == 1 for q in support)
    if not complete:
        result.notes.append(f"phi not fully factored below trial bound {trial_bound}")
    logger.debug(f"Classified ({a}, {b}, {c}): case {result.case}, trivial={result.trivial}")
    return result


class TrivialSearchResult:
    """Pairs with phi_r(a, b) in {1, r} found in a height box."""

    def __init__(self, r: int, height: int, unit_pairs: List[Tuple[int, int]],
                 r_pairs: List[Tuple[int, int]]):
        self.r = r
        self.height = height
        self.unit_pairs = sorted(unit_pairs)
        self.r_pairs = sorted(r_pairs)

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return sorted(self.unit_pairs + self.r_pairs)

    def to_dict(self) -> Dict[str, Any]:
        return {'r': self.r, 'height': self.height,
                'phi_equals_1': self.unit_pairs, 'phi_equals_r': self.r_pairs}


def _trivial_rows(job: Tuple[int, int, List[int]]) -> List[Tuple[int, int, int]]:
    r, height, rows = job
    hits = []
    for a in rows:
        for b in range(-height, height + 1):
            if a == 0 and b == 0:
                continue
            value = phi_eval(r, a, b)
            if value == 1 or value == r:
                hits.append((a, b, value))
    return hits


def search_trivial(r: int, height: int, workers: int = 1) -> TrivialSearchResult:
    """Exhaustive scan of |a|, |b| <= height for phi_r(a, b) in {1, r}."""
    _check_r(r)
    rows = list(range(-height, height + 1))
    chunks = max(1, workers) * 4
    jobs = [(r, height, rows[i::chunks]) for i in range(chunks)]
    unit_pairs, r_pairs = [], []
    for hits in parallel_map(_trivial_rows, jobs, workers):
        for a, b, value in hits:
            (unit_pairs if value == 1 else r_pairs).append((a, b))
    logger.info(f"Trivial search r={r}, H={height}: {len(unit_pairs)} with phi=1, {len(r_pairs)} with phi=r")
    return TrivialSearchResult(r, height, unit_pairs, r_pairs)


class CoprimalityReport:
    """Checks on the factors a + zeta^i b of a^r + b^r."""

    def __init__(self, r: int, a: int, b: int):
        self.r = r
        self.a = a
        self.b = b
        self.pairwise_ok = True
        self.lambda_valuations: Optional[List[int]] = None
        self.phi_r_valuation: Optional[int] = None
        self.offending_primes: List[int] = []
        self.complete = True

    @property
    def ok(self) -> bool:
        if not self.pairwise_ok or self.offending_primes:
            return False
        if self.lambda_valuations is not None:
            return self.phi_r_valuation == 1 and all(v == 1 for v in self.lambda_valuations)
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            'r': self.r, 'a': self.a, 'b': self.b,
            'pairwise_gcd_divides_lambda': self.pairwise_ok,
            'lambda_valuations': self.lambda_valuations,
            'phi_r_valuation': self.phi_r_valuation,
            'offending_primes': self.offending_primes,
            'status': 'complete' if self.complete else 'incomplete',
            'ok': self.ok,
        }


def _lambda_valuation(x: FieldElement, lam_inv: FieldElement, limit: int) -> int:
    v = 0
    while v < limit:
        y = x * lam_inv
        if not y.is_integral():
            break
        x = y
        v += 1
    return v


def factor_coprimality_report(r: int, a: int, b: int, trial_bound: int = 10 ** 6) -> CoprimalityReport:
    """Verify the coprimality structure of the ideals (a + zeta^i b).

    A Bezout certificate shows each pairwise gcd divides (zeta^j - zeta^i),
    which lies over r. When r | a+b each factor is divisible by 1 - zeta
    exactly once, and v_r(phi) = 1. Rational primes of phi away from a+b
    must be 1 mod r.
    """
    if gcd(a, b) != 1:
        raise DiophantineError(f"({a}, {b}) is not primitive")
    ctx = get_context(r)
    report = CoprimalityReport(r, a, b)
    u, v, g = gcdex(a, b)
    u, v = (int(u), int(v)) if g > 0 else (-int(u), -int(v))
    factors = [a + ctx.zeta_power(i) * b for i in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            zi, zj = ctx.zeta_power(i), ctx.zeta_power(j)
            lhs = (zj * u - v) * factors[i] + (v - zi * u) * factors[j]
            if lhs != zj - zi:
                report.pairwise_ok = False

    s = a + b
    phi = phi_eval(r, a, b)
    if s % r == 0:
        report.phi_r_valuation = multiplicity(r, abs(phi))
        lam_inv = (1 - ctx.zeta).inverse()
        report.lambda_valuations = [_lambda_valuation(f, lam_inv, r) for f in factors[1:]]

    support, complete = prime_factors(phi, trial_bound)
    report.complete = complete
    report.offending_primes = sorted(q for q in support if q != r and s % q != 0 and q % r != 1)
    return report


def square_sum_obstructions(moduli: Iterable[int] = (3, 4, 7)) -> Dict[int, bool]:
    """For each m, whether m can divide a^2 + b^2 with gcd(a, b) = 1.

    Used for x^(2r) + y^(2r) = d z^p, where the Frey curve is built from
    (a^2, b^2) and a^2 + b^2 plays the role of a + b.
    """
    result = {}
    for m in moduli:
        result[m] = any(
            (x * x + y * y) % m == 0
            for x in range(m) for y in range(m)
            if gcd(gcd(x, y), m) == 1
        )
    return result
