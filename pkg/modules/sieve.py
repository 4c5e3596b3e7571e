"""Newform elimination against Frey-curve trace tables and assembly of exponent bounds."""
from functools import lru_cache, reduce
from math import gcd
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from sympy import primerange

from .logger import get_logger
from .newforms import EigenvalueEntry, NewformCollection, NewformRecord, canonical_level
from .numfield import prime_factors
from .parallel import parallel_map
from .traces import ADD, MULT, TraceTable

logger = get_logger('sieve')


class SieveError(ValueError):
    """A newform shares no prime with a trace table, or the bound configuration is invalid."""


@lru_cache(maxsize=65536)
def _support(n: int) -> FrozenSet[int]:
    factors, _ = prime_factors(n)
    return frozenset(factors)


def _product(primes: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b, primes, 1)


def _overlap(record: NewformRecord, table: TraceTable) -> List[Tuple[int, EigenvalueEntry]]:
    return [(i, record.eigenvalues[key]) for i, key in enumerate(table.keys) if key in record.eigenvalues]


def _entry_value(entry: EigenvalueEntry, trace: Any, norm: int) -> Optional[int]:
    if trace == ADD:
        return None
    if trace == MULT:
        return abs(entry.evaluate(norm + 1) * entry.evaluate(-norm - 1))
    return abs(entry.evaluate(trace))


def a_xy(record: NewformRecord, table: TraceTable, xy: Tuple[int, int]) -> int:
    """gcd over the shared primes of |Norm(a_P(E) - a_P(f))| at the class (x, y).

    Multiplicative entries contribute |P(N+1) P(-N-1)|; additive entries are skipped.
    """
    overlap = _overlap(record, table)
    if not overlap:
        raise SieveError(f"{record.label} has no eigenvalue at any prime of the q={table.q} table")
    row = table.rows[tuple(xy)]
    g = 0
    for i, entry in overlap:
        value = _entry_value(entry, row[i], table.norms[i])
        if value is not None:
            g = gcd(g, value)
    return g


class TableResult:
    """B_q(f) for one table with the prime support of its factors."""

    def __init__(self, q: int, value: int, primes: FrozenSet[int], zero_witness: Optional[Tuple[int, int]]):
        self.q = q
        self.value = value
        self.primes = primes
        self.zero_witness = zero_witness

    def to_dict(self) -> Dict[str, Any]:
        return {'q': self.q, 'nonzero': self.value != 0, 'primes': sorted(self.primes),
                'zero_witness': list(self.zero_witness) if self.zero_witness else None}


def table_result(record: NewformRecord, table: TraceTable) -> TableResult:
    value = 1
    primes: set = set()
    witness = None
    for xy in table.rows:
        a = a_xy(record, table, xy)
        if a == 0:
            value = 0
            if witness is None:
                witness = xy
            continue
        value *= a
        primes |= _support(a)
    if value == 0:
        primes = set()
    return TableResult(table.q, value, frozenset(primes), witness)


def b_q(record: NewformRecord, table: TraceTable) -> int:
    """Product of a_xy over the table's classes; zero iff some class matches f."""
    return table_result(record, table).value


class EliminationOutcome:
    """Per-newform result of the sieve."""

    def __init__(self, label: str, level: str, status: str, obstructions: Dict[int, int],
                 exceptional_primes: FrozenSet[int], union_primes: FrozenSet[int],
                 witnesses: Dict[int, Tuple[int, int]], methods: List[str], note: str = ''):
        self.label = label
        self.level = level
        self.status = status
        self.obstructions = obstructions
        self.exceptional_primes = exceptional_primes
        self.union_primes = union_primes
        self.witnesses = witnesses
        self.methods = methods
        self.note = note

    @property
    def eliminated(self) -> bool:
        return self.status == 'eliminated'

    @property
    def exceptional_product(self) -> int:
        return _product(self.exceptional_primes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'newform': self.label,
            'level': self.level,
            'status': self.status,
            'methods': self.methods,
            'obstructions': {str(q): ('nonzero' if v else '0') for q, v in self.obstructions.items()},
            'exceptional_primes': sorted(self.exceptional_primes),
            'union_primes': sorted(self.union_primes),
            'witnesses': {str(q): list(xy) for q, xy in self.witnesses.items()},
            'note': self.note,
        }

    def __repr__(self):
        return f"EliminationOutcome({self.label}, {self.status}, p in {sorted(self.exceptional_primes)})"


def kraus_order(v: int) -> int:
    """Denominator of v/12."""
    return 12 // gcd(12, v)


def _eliminate_one(job: Tuple) -> EliminationOutcome:
    record, tables, inertia = job
    obstructions: Dict[int, int] = {}
    witnesses: Dict[int, Tuple[int, int]] = {}
    prime_sets: List[FrozenSet[int]] = []
    methods: List[str] = []
    notes: List[str] = []

    for table in tables:
        if not _overlap(record, table):
            notes.append(f"no eigenvalue above {table.q}")
            continue
        result = table_result(record, table)
        obstructions[table.q] = result.value
        if result.value:
            prime_sets.append(result.primes)
            methods.append(f"B_{table.q}")
        else:
            witnesses[table.q] = result.zero_witness

    if inertia:
        ell, expected = int(inertia['prime']), int(inertia['expected_order'])
        v = record.delta_valuations.get(ell)
        if v is not None:
            order = kraus_order(v)
            if order != expected:
                prime_sets.append(frozenset(primerange(2, ell + 1)))
                methods.append(f"inertia at {ell}: {order} != {expected}")

    if not obstructions and not methods:
        return EliminationOutcome(record.label, record.level, 'survivor', {}, frozenset(), frozenset(),
                                  {}, [], note='; '.join(notes) or 'no applicable test')

    if methods:
        exceptional = reduce(lambda a, b: a & b, prime_sets)
        union = reduce(lambda a, b: a | b, prime_sets)
        status = 'eliminated'
    else:
        exceptional = union = frozenset()
        status = 'survivor'
    return EliminationOutcome(record.label, record.level, status, obstructions, frozenset(exceptional),
                              frozenset(union), witnesses, methods, '; '.join(notes))


def eliminate(records: Sequence[NewformRecord], tables: Sequence[TraceTable],
              inertia: Optional[Dict[str, int]] = None, workers: int = 1) -> List[EliminationOutcome]:
    """Sieve each newform against every table (and the inertia test when configured).

    A newform is eliminated when some B_q is nonzero or its inertia order
    differs; the exceptional primes are those dividing every nonzero
    obstruction.
    """
    if not tables and not inertia:
        raise SieveError("eliminate needs at least one trace table")
    outcomes = parallel_map(_eliminate_one, [(rec, list(tables), inertia) for rec in records], workers)
    survivors = [o.label for o in outcomes if not o.eliminated]
    logger.info(f"Sieved {len(outcomes)} newform(s): {len(outcomes) - len(survivors)} eliminated, "
                f"{len(survivors)} survivor(s)")
    for o in outcomes:
        logger.debug(f"  {o.label}: {o.status} {sorted(o.exceptional_primes)} {o.note}")
    return outcomes


class NonrationalBound:
    """Primes p for which a non-rational newform can still match."""

    def __init__(self, label: str, values: Dict[str, Dict[int, int]], per_ideal: Dict[str, FrozenSet[int]],
                 skipped: List[str]):
        self.label = label
        self.values = values
        self.per_ideal = per_ideal
        self.skipped = skipped

    @property
    def status(self) -> str:
        return 'bounded' if self.per_ideal else 'survivor'

    @property
    def primes(self) -> FrozenSet[int]:
        if not self.per_ideal:
            return frozenset()
        return reduce(lambda a, b: a & b, self.per_ideal.values())

    @property
    def M(self) -> Optional[int]:
        return _product(sorted(self.primes)) if self.per_ideal else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'newform': self.label,
            'status': self.status,
            'M_f': self.M,
            'primes': sorted(self.primes),
            'values': {k: {str(t): v for t, v in vals.items()} for k, vals in self.values.items()},
            'skipped': self.skipped,
        }


def nonrational_bound(record: NewformRecord, tables: Sequence[TraceTable]) -> NonrationalBound:
    """M_f from P(t) over the possible traces t and, where multiplicative reduction occurs, t = +-(N+1)."""
    values: Dict[str, Dict[int, int]] = {}
    per_ideal: Dict[str, FrozenSet[int]] = {}
    skipped: List[str] = []
    found = False
    for table in tables:
        for i, entry in _overlap(record, table):
            if entry.is_rational:
                continue
            found = True
            label = table.ideals[i]
            candidates = set(table.trace_set(i))
            if table.has_multiplicative(i):
                n1 = table.norms[i] + 1
                candidates |= {n1, -n1}
            vals = {t: entry.evaluate(t) for t in sorted(candidates)}
            values[label] = vals
            if any(v == 0 for v in vals.values()):
                skipped.append(label)
                continue
            primes: set = set()
            for v in vals.values():
                primes |= _support(abs(v))
            per_ideal[label] = frozenset(primes)
    if not found:
        raise SieveError(f"{record.label} has no non-rational eigenvalue at the tables' primes")
    bound = NonrationalBound(record.label, values, per_ideal, skipped)
    logger.info(f"Non-rational {record.label}: M_f = {bound.M} ({sorted(bound.primes)})")
    return bound


# -- exponent bounds -----------------------------------------------------------

class Irreducibility:
    """The threshold I above which the mod-p representation is irreducible."""

    VARIANTS = ('formula', 'stated', 'threshold')

    def __init__(self, variant: str, degree: int = 3, class_number: int = 1, exponent: int = 18,
                 threshold: Optional[int] = None):
        if variant not in self.VARIANTS:
            raise SieveError(f"irreducibility variant must be one of {self.VARIANTS}, got {variant!r}")
        self.variant = variant
        if variant == 'formula':
            e = degree * class_number
            self.value = (1 + 3 ** e) ** 2
            self.text = f"(1+3^{e})^2"
        elif variant == 'stated':
            self.value = (1 + 3 ** exponent) ** 2
            self.text = f"(1+3^{exponent})^2"
        else:
            if threshold is None:
                raise SieveError("threshold variant needs 'threshold'")
            self.value = int(threshold)
            self.text = str(self.value)

    @classmethod
    def from_config(cls, block: Dict[str, Any]) -> 'Irreducibility':
        return cls(block.get('variant', 'stated'), block.get('degree', 3), block.get('class_number', 1),
                   block.get('exponent', 18), block.get('threshold'))


class ExponentBound:
    """Combined statement 'no solutions for p > I and p not dividing M'."""

    def __init__(self, irreducibility: Irreducibility, modularity_note: str,
                 records: List[Tuple[str, FrozenSet[int]]], M: int, absorbed: FrozenSet[int],
                 effective: FrozenSet[int], conditional: bool, reasons: List[str]):
        self.irreducibility = irreducibility
        self.modularity_note = modularity_note
        self.records = records
        self.M = M
        self.absorbed = absorbed
        self.effective = effective
        self.conditional = conditional
        self.reasons = reasons

    @property
    def threshold(self) -> int:
        return self.irreducibility.value

    @property
    def statement(self) -> str:
        base = f"no non-trivial primitive solutions for p > {self.irreducibility.text}"
        if self.effective:
            base += f" and p not dividing {_product(sorted(self.effective))}"
        if self.conditional:
            return f"CONDITIONAL: {base}, provided: " + '; '.join(self.reasons)
        return base

    def to_dict(self) -> Dict[str, Any]:
        return {
            'statement': self.statement,
            'conditional': self.conditional,
            'reasons': self.reasons,
            'irreducibility': {'variant': self.irreducibility.variant, 'I': self.irreducibility.text},
            'modularity': self.modularity_note,
            'M': self.M,
            'absorbed_primes': sorted(self.absorbed),
            'effective_primes': sorted(self.effective),
            'records': [{'newform': label, 'primes': sorted(p)} for label, p in self.records],
        }


def assemble_bound(outcomes: Sequence[EliminationOutcome], config: Dict[str, Any],
                   missing: Sequence[str] = (), complete: bool = False,
                   nonrational: Sequence[NonrationalBound] = (),
                   deferred: Sequence[Tuple[str, 'ExponentBound']] = (),
                   failed: Sequence[str] = ()) -> ExponentBound:
    """Combine outcomes into an exponent bound.

    M is the lcm of the exceptional products and the configured b_r_divisors;
    primes at or below I are absorbed by irreducibility. Survivors, missing
    newform data, failed cases or an empty run make the statement conditional.
    Bounds of deferred profiles contribute their primes and conditions.
    """
    irr = Irreducibility.from_config(config.get('irreducibility', {}))
    reasons: List[str] = []
    records: List[Tuple[str, FrozenSet[int]]] = []
    primes: set = set(int(p) for p in config.get('b_r_divisors', []))
    for o in outcomes:
        if o.eliminated:
            records.append((o.label, o.exceptional_primes))
            primes |= o.exceptional_primes
        else:
            reasons.append(f"newform {o.label} ({o.level}) survives")
    for nb in nonrational:
        if nb.status == 'survivor':
            reasons.append(f"non-rational newform {nb.label} survives")
        else:
            primes |= nb.primes
    for level in missing:
        reasons.append(f"newforms at level {level} are eliminated")
    for name, other in deferred:
        primes |= other.absorbed | other.effective
        reasons.extend(f"{reason} ({name})" for reason in other.reasons)
    for label in failed:
        reasons.append(f"case {label} is settled")
    if not outcomes and not complete and not missing and not deferred and not failed:
        reasons.append("some newform data is supplied")
    M = _product(sorted(primes))
    absorbed = frozenset(p for p in primes if p <= irr.value)
    effective = frozenset(p for p in primes if p > irr.value)
    bound = ExponentBound(irr, config.get('modularity_note', ''), records, M, absorbed, effective,
                          bool(reasons), reasons)
    logger.info(f"Bound: {bound.statement}")
    return bound


# -- per-case driver -------------------------------------------------------------

class CaseReport:
    """Sieve results for one divisibility case of a run."""

    def __init__(self, label: str, description: str, levels: List[str]):
        self.label = label
        self.description = description
        self.levels = levels
        self.outcomes: List[EliminationOutcome] = []
        self.nonrational: List[NonrationalBound] = []
        self.missing: List[str] = []
        self.deferred_to: Optional[str] = None
        self.error: Optional[str] = None

    @property
    def settled(self) -> bool:
        return (self.error is None and not self.missing
                and all(o.eliminated for o in self.outcomes)
                and all(nb.status == 'bounded' for nb in self.nonrational))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'case': self.label,
            'description': self.description,
            'levels': self.levels,
            'outcomes': [o.to_dict() for o in self.outcomes],
            'nonrational': [nb.to_dict() for nb in self.nonrational],
            'missing': self.missing,
            'deferred_to': self.deferred_to,
            'error': self.error,
        }


def sieve_case(label: str, description: str, levels: Sequence[str], newforms: NewformCollection,
               tables: Sequence[TraceTable], inertia: Optional[Dict[str, int]] = None,
               workers: int = 1, base_field: Optional[str] = None, r: Optional[int] = None) -> CaseReport:
    """Sieve every newform at the case's predicted levels.

    With base_field (and r) given, records over other fields are ignored.
    """
    report = CaseReport(label, description, [canonical_level(level) for level in levels])
    selected: List[NewformRecord] = []
    seen = set()
    for level in levels:
        exact = [rec for rec in newforms.exact_level(level)
                 if base_field is None or rec.base_field == base_field]
        if not exact and not newforms.is_complete(level):
            report.missing.append(canonical_level(level))
            logger.warning(f"Case {label}: no newform data at level {canonical_level(level)}")
        for rec in newforms.at_level(level):
            if base_field is not None and rec.base_field != base_field:
                continue
            if r is not None and rec.r is not None and rec.r != r:
                continue
            if id(rec) not in seen:
                seen.add(id(rec))
                selected.append(rec)
    if selected:
        report.outcomes = eliminate(selected, tables, inertia, workers)
        for rec in selected:
            if not rec.is_rational and any(_overlap(rec, t) for t in tables):
                report.nonrational.append(nonrational_bound(rec, tables))
    return report
