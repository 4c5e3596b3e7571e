"""Traces of Frobenius of Frey curves and grouped trace tables."""
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .diophantine import BinaryForm
from .frey import FreyCurve, FreyFamily, get_family
from .localred import IdealPlace, LocalDataError, Place, RationalPlace, make_place, tate_local, unpack_curve
from .logger import get_logger
from .numfield import FieldError, PrimeIdeal, ResidueField
from .parallel import parallel_map
from .weierstrass import WeierstrassModel

logger = get_logger('traces')

MULT = 'MULT'
ADD = 'ADD'
CONSTRAINTS = ('nonzero', 'sum-nonzero', 'sum-zero', 'good')

Entry = Union[int, str]


class TraceError(ValueError):
    """Unsupported reduction place or residue field too large to enumerate."""


def parse_constraint(text: Optional[str]) -> Tuple[str, ...]:
    """Split a comma-separated constraint such as 'sum-nonzero,good'."""
    if not text:
        return ('nonzero',)
    parts = tuple(p.strip() for p in text.split(',') if p.strip())
    unknown = [p for p in parts if p not in CONSTRAINTS]
    if unknown:
        raise TraceError(f"unknown constraint(s) {unknown}; expected {CONSTRAINTS}")
    return parts


def _class_allowed(x: int, y: int, q: int, parts: Sequence[str]) -> bool:
    if x % q == 0 and y % q == 0:
        return False
    s = (x + y) % q
    if 'sum-nonzero' in parts and s == 0:
        return False
    if 'sum-zero' in parts and s != 0:
        return False
    return True


# -- point counting ------------------------------------------------------------

def _residual_trace(F: ResidueField, a: Sequence[int]) -> Entry:
    """Trace of y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F, or a reduction marker."""
    a1, a2, a3, a4, a6 = a
    mul, add = F.mul, F.add
    b2 = add(mul(a1, a1), mul(4 % F.q, a2))
    b4 = add(mul(2, a4), mul(a1, a3))
    b6 = add(mul(a3, a3), mul(4 % F.q, a6))
    b8 = F.sub(add(add(mul(mul(a1, a1), a6), mul(mul(4 % F.q, a2), a6)),
                   F.sub(mul(a2, mul(a3, a3)), mul(a1, mul(a3, a4)))),
               mul(a4, a4))
    disc = F.sub(F.sub(F.neg(mul(mul(b2, b2), b8)), mul(8 % F.q, mul(b4, mul(b4, b4)))),
                 F.sub(mul(27 % F.q, mul(b6, b6)), mul(9 % F.q, mul(b2, mul(b4, b6)))))
    if disc == 0:
        c4 = F.sub(mul(b2, b2), mul(24 % F.q, b4))
        return MULT if c4 != 0 else ADD

    if F.degree == 1:
        q = F.q
        chi = [F.chi(t) for t in range(q)]
        c3, c2, c1, c0 = 4 % q, b2 % q, (2 * b4) % q, b6 % q
        total = 0
        for x in range(q):
            total += chi[(((c3 * x + c2) * x + c1) * x + c0) % q]
        return -total

    cubic = [4 % F.q, b2, mul(2, b4), b6]
    return -sum(F.chi(F.evaluate(cubic, x)) for x in F.elements())


def _check_place(P: Place, norm_bound: int):
    if P.characteristic == 2:
        raise TraceError("point counting in characteristic 2 is not supported")
    size = P.residue_field.size
    if size > norm_bound:
        raise TraceError(f"residue field of size {size} exceeds the norm bound {norm_bound}")


def _hasse(t: Entry, norm: int) -> Entry:
    if isinstance(t, int) and t * t > 4 * norm:
        raise TraceError(f"trace {t} violates the Hasse bound for norm {norm}")
    return t


def _trace_at(model: WeierstrassModel, P: Place, minimize: bool) -> Entry:
    if minimize and P.valuation(model.discriminant) > 0:
        result = tate_local(model, P)
        if result.exponent == 1:
            return MULT
        if result.exponent > 1:
            return ADD
        model = result.model
    try:
        codes = [P.reduce(c) for c in model.a_invariants]
    except (FieldError, LocalDataError) as e:
        raise TraceError(f"model is not integral at {P.label}: {e}")
    return _hasse(_residual_trace(P.residue_field, codes), P.residue_field.size)


def count_trace(curve: Union[FreyCurve, WeierstrassModel], place: Union[int, PrimeIdeal, Place],
                norm_bound: int = 10 ** 6) -> Entry:
    """a_P(E) = Norm(P) + 1 - #E(F_P), or MULT / ADD at bad reduction.

    Curves over Q are first brought to a minimal model at p; curves over K+
    are reduced as given.
    """
    model, ctx, base = unpack_curve(curve)
    try:
        P = make_place(place, ctx, base)
    except LocalDataError as e:
        raise TraceError(str(e))
    _check_place(P, norm_bound)
    return _trace_at(model, P, minimize=base == 'Q')


# -- tables --------------------------------------------------------------------

class TraceTable:
    """Trace vectors across the primes above q for every allowed class (x, y) mod q."""

    def __init__(self, family: str, r: int, indices: Tuple[int, ...], descended: bool, q: int,
                 ideals: List[str], keys: List[str], norms: List[int], constraint: str,
                 rows: Dict[Tuple[int, int], Tuple[Entry, ...]]):
        self.family = family
        self.r = r
        self.indices = tuple(indices)
        self.descended = descended
        self.q = q
        self.ideals = list(ideals)
        self.keys = list(keys)
        self.norms = list(norms)
        self.constraint = constraint
        self.rows = dict(sorted(rows.items()))

    @property
    def descriptor(self) -> str:
        """Cache key: family, r, indices, q and constraint."""
        idx = ','.join(str(k) for k in self.indices)
        return f"{self.family}|{self.r}|{idx}|{int(self.descended)}|{self.q}|{self.constraint}"

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        return isinstance(other, TraceTable) and other.to_text() == self.to_text()

    def column(self, i: int) -> List[Entry]:
        return [row[i] for row in self.rows.values()]

    def has_multiplicative(self, i: int) -> bool:
        return any(entry == MULT for entry in self.column(i))

    def trace_set(self, i: Optional[int] = None) -> Set[int]:
        """Traces at good classes, for one ideal or for all of them."""
        cols = range(len(self.ideals)) if i is None else [i]
        return {row[c] for row in self.rows.values() for c in cols if isinstance(row[c], int)}

    def vectors(self) -> Set[Tuple[Entry, ...]]:
        return set(self.rows.values())

    def to_text(self) -> str:
        lines = [
            "# trace table",
            f"family {self.family}",
            f"r {self.r}",
            f"indices {','.join(str(k) for k in self.indices)}",
            f"descended {'true' if self.descended else 'false'}",
            f"q {self.q}",
            f"ideals {' '.join(self.ideals)}",
            f"keys {' '.join(self.keys)}",
            f"norms {' '.join(str(n) for n in self.norms)}",
            f"constraint {self.constraint}",
        ]
        for (x, y), row in self.rows.items():
            if all(entry == MULT for entry in row):
                body = MULT
            else:
                body = ' '.join(str(entry) for entry in row)
            lines.append(f"{x} {y} : {body}")
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_text(cls, text: str) -> 'TraceTable':
        header: Dict[str, str] = {}
        rows: Dict[Tuple[int, int], Tuple[Entry, ...]] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            if ':' in line and line[0] in '-0123456789':
                left, right = line.split(':', 1)
                x, y = (int(v) for v in left.split())
                tokens = right.split()
                if tokens == [MULT]:
                    n = len(header.get('ideals', '').split())
                    rows[(x, y)] = (MULT,) * n
                else:
                    rows[(x, y)] = tuple(t if t in (MULT, ADD) else int(t) for t in tokens)
                continue
            key, _, value = line.partition(' ')
            if key not in ('family', 'r', 'indices', 'descended', 'q', 'ideals', 'keys', 'norms', 'constraint'):
                raise TraceError(f"line {lineno}: unknown header field '{key}'")
            header[key] = value.strip()
        return cls(
            family=header['family'],
            r=int(header['r']),
            indices=tuple(int(k) for k in header['indices'].split(',')),
            descended=header.get('descended') == 'true',
            q=int(header['q']),
            ideals=header['ideals'].split(),
            keys=header['keys'].split(),
            norms=[int(n) for n in header['norms'].split()],
            constraint=header['constraint'],
            rows=rows,
        )


def places_above(family: FreyFamily, q: int) -> List[Place]:
    """Places of the family's base field above q."""
    if family.base_field == 'Q':
        return [RationalPlace(q)]
    if family.base_field != 'K+':
        raise TraceError(f"trace tables over {family.base_field} are not supported")
    try:
        return [IdealPlace(P) for P in family.ctx.split_prime(q)]
    except FieldError as e:
        raise TraceError(str(e))


def _reduce_forms(model: WeierstrassModel, P: Place) -> List[Any]:
    reduced = []
    for c in model.a_invariants:
        if isinstance(c, BinaryForm):
            reduced.append(tuple(P.reduce(k) for k in c.coefficients))
        else:
            reduced.append(P.reduce(c))
    return reduced


def _evaluate_reduced(F: ResidueField, form: Any, x: int, y: int) -> int:
    if not isinstance(form, tuple):
        return form
    d = len(form) - 1
    total = 0
    for i, c in enumerate(form):
        if c:
            total = F.add(total, F.mul(c, F.mul(F.pow(x, d - i), F.pow(y, i))))
    return total


def _table_rows(job: Tuple) -> List[Tuple[int, int, Tuple[Entry, ...]]]:
    descriptor, q, xs, parts, norm_bound = job
    family = get_family(*descriptor)
    places = places_above(family, q)
    for P in places:
        _check_place(P, norm_bound)
    # the descended model over Q is not minimal at 3
    per_class = family.base_field == 'Q' and q == 3
    reduced = None if per_class else [_reduce_forms(family.model, P) for P in places]
    rows = []
    for x in xs:
        for y in range(q):
            if not _class_allowed(x, y, q, parts):
                continue
            if per_class:
                model = family.at(x, y).model
                row = tuple(_trace_at(model, P, minimize=True) for P in places)
            else:
                entries = []
                for P, forms in zip(places, reduced):
                    F = P.residue_field
                    codes = [_evaluate_reduced(F, form, F.from_int(x), F.from_int(y)) for form in forms]
                    entries.append(_hasse(_residual_trace(F, codes), F.size))
                row = tuple(entries)
            if 'good' in parts and any(not isinstance(e, int) for e in row):
                continue
            rows.append((x, y, row))
    return rows


def table_descriptor(family: FreyFamily, q: int, constraint: Optional[str] = None) -> str:
    """The descriptor grouped_table(family, q, constraint) will carry."""
    idx = ','.join(str(k) for k in family.indices)
    return (f"{family.family}|{family.r}|{idx}|{int(family.descended)}|{q}|"
            f"{','.join(parse_constraint(constraint))}")


def grouped_table(family: FreyFamily, q: int, constraint: Optional[str] = None,
                  workers: int = 1, norm_bound: int = 10 ** 6) -> TraceTable:
    """Traces at every prime above q, grouped per class (x, y) mod q."""
    if q % 2 == 0 or q == family.r:
        raise TraceError(f"auxiliary prime {q} must not divide 2r = {2 * family.r}")
    parts = parse_constraint(constraint)
    places = places_above(family, q)
    for P in places:
        _check_place(P, norm_bound)
    chunks = max(1, workers) * 4
    jobs = [(family.descriptor, q, list(range(i, q, chunks)), parts, norm_bound)
            for i in range(min(chunks, q))]
    rows: Dict[Tuple[int, int], Tuple[Entry, ...]] = {}
    for chunk in parallel_map(_table_rows, jobs, workers):
        for x, y, row in chunk:
            rows[(x, y)] = row
    if family.base_field == 'Q':
        keys = [str(q)]
    else:
        keys = [P.prime.key for P in places]
    table = TraceTable(family.family, family.r, family.indices, family.descended, q,
                       [P.label for P in places], keys,
                       [P.residue_field.size for P in places], ','.join(parts), rows)
    logger.info(f"Trace table {family.label} at q={q} [{table.constraint}]: {len(table)} classes, "
                f"{len(places)} prime(s)")
    return table


def trace_spectrum(family: FreyFamily, ell: int, constraint: str = 'good',
                   workers: int = 1) -> Set[int]:
    """Union of traces at primes above ell over the allowed classes."""
    parts = set(parse_constraint(constraint)) | {'good'}
    table = grouped_table(family, ell, ','.join(p for p in CONSTRAINTS if p in parts), workers)
    return table.trace_set()
