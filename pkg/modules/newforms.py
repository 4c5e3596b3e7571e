"""Newform eigenvalue files.

Grammar (one directive per line, '#' starts a comment)::

    space <level> complete
    newform <label>
    base_field Q | K+(<r>)
    level <label^exp ...> | *
    degree <d>
    eigenvalue <prime label>: <integer>
    eigenvalue <prime label>: minpoly [c0, c1, ..., 1]
    delta_valuation <p> = <v>
    end

Prime labels are rational primes over Q. Over K+ they are 'pi', 'P<q>' for
an inert q, or 'P<q>[<generator as a polynomial in z>]'. A 'space ...
complete' line declares that the listed records are every newform of that
level (possibly none).
"""
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

from sympy import Poly, Symbol, factor_list, isprime

from .logger import get_logger
from .numfield import FieldContext, FieldError, get_context

logger = get_logger('newforms')

_X = Symbol('x')
_BASE_RE = re.compile(r'^(Q|K\+\((\d+)\))$')
_SPLIT_LABEL_RE = re.compile(r'^P(\d+)\[(.+)\]$')
_INERT_LABEL_RE = re.compile(r'^P(\d+)$')
_EIGEN_RE = re.compile(r'^(\S+)\s*:\s*(.+)$')
_MINPOLY_RE = re.compile(r'^minpoly\s*\[(.*)\]$')
_DELTA_RE = re.compile(r'^(\d+)\s*=\s*(-?\d+)$')


class NewformFormatError(ValueError):
    """Malformed newform file; carries the offending line number."""

    def __init__(self, message: str, line: int = 0, path: str = ''):
        self.line = line
        self.path = path
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")


def resolve_label(label: str, base_field: str, ctx: Optional[FieldContext]) -> str:
    """Map a prime label to the embedding-free key used by trace tables."""
    if base_field == 'Q':
        if not label.isdigit() or not isprime(int(label)):
            raise FieldError(f"'{label}' is not a rational prime")
        return label
    if label == 'pi':
        return ctx.pi_r.key
    m = _SPLIT_LABEL_RE.match(label)
    if m:
        return ctx.prime_from_generator(int(m.group(1)), m.group(2)).key
    m = _INERT_LABEL_RE.match(label)
    if m:
        q = int(m.group(1))
        ideals = ctx.split_prime(q)
        if len(ideals) != 1:
            raise FieldError(f"{q} splits in K+; name the prime by a generator, e.g. P{q}[...]")
        return ideals[0].key
    raise FieldError(f"unknown prime label '{label}'")


def _label_order(label: str):
    return (0, int(label), '') if label.isdigit() else (1, 0, label)


def canonical_level(text: str) -> str:
    """Normalize 'P2 pi' / 'pi^1 P2^1' / '2^2 7^2' to a sorted 'label^exp' string."""
    text = text.strip()
    if text == '*':
        return '*'
    exps: Dict[str, int] = {}
    for token in text.split():
        label, _, exp = token.partition('^')
        if not label:
            raise ValueError(f"bad level token '{token}'")
        exps[label] = exps.get(label, 0) + (int(exp) if exp else 1)
    return ' '.join(f"{label}^{exps[label]}" for label in sorted(exps, key=_label_order))


class EigenvalueEntry:
    """a_P(f) at one prime: an integer or the minimal polynomial of an algebraic integer."""

    def __init__(self, label: str, key: str, value: Optional[int] = None,
                 minpoly: Optional[Tuple[int, ...]] = None):
        self.label = label
        self.key = key
        if value is None and minpoly is not None and len(minpoly) == 2:
            value, minpoly = -minpoly[0], None
        self.value = value
        self.minpoly = tuple(minpoly) if minpoly is not None else None

    @property
    def is_rational(self) -> bool:
        return self.minpoly is None

    @property
    def poly(self) -> Tuple[int, ...]:
        """Ascending monic coefficients; (-a, 1) for a rational value a."""
        if self.is_rational:
            return (-self.value, 1)
        return self.minpoly

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def evaluate(self, t: int) -> int:
        """P(t), i.e. +-Norm(t - a_P(f)) from Q(a_P(f))."""
        acc = 0
        for c in reversed(self.poly):
            acc = acc * t + c
        return acc

    def to_text(self) -> str:
        if self.is_rational:
            return f"eigenvalue {self.label}: {self.value}"
        return f"eigenvalue {self.label}: minpoly [{', '.join(str(c) for c in self.minpoly)}]"

    def __repr__(self):
        return f"EigenvalueEntry({self.to_text()[11:]})"


class NewformRecord:
    """One newform (or Galois orbit) with the eigenvalues the sieve consumes."""

    def __init__(self, label: str, base_field: str, r: Optional[int], level: str,
                 degree: int = 1, eigenvalues: Optional[Dict[str, EigenvalueEntry]] = None,
                 delta_valuations: Optional[Dict[int, int]] = None, line: int = 0):
        self.label = label
        self.base_field = base_field
        self.r = r
        self.level = level
        self.degree = degree
        self.eigenvalues = eigenvalues or {}
        self.delta_valuations = delta_valuations or {}
        self.line = line

    @property
    def is_rational(self) -> bool:
        return all(e.is_rational for e in self.eigenvalues.values())

    def entry(self, key: str) -> Optional[EigenvalueEntry]:
        return self.eigenvalues.get(key)

    def matches_level(self, level: str) -> bool:
        return self.level == '*' or self.level == canonical_level(level)

    def to_text(self) -> str:
        base = 'Q' if self.base_field == 'Q' else f"K+({self.r})"
        lines = [f"newform {self.label}", f"base_field {base}", f"level {self.level}",
                 f"degree {self.degree}"]
        lines.extend(e.to_text() for e in self.eigenvalues.values())
        lines.extend(f"delta_valuation {p} = {v}" for p, v in sorted(self.delta_valuations.items()))
        lines.append("end")
        return '\n'.join(lines) + '\n'

    def __repr__(self):
        return f"NewformRecord({self.label}, level {self.level}, {len(self.eigenvalues)} eigenvalue(s))"


class NewformCollection:
    """Records plus the levels whose newform spaces are declared complete."""

    def __init__(self, records: Optional[List[NewformRecord]] = None,
                 complete_levels: Optional[Set[str]] = None, sources: Optional[List[str]] = None):
        self.records = records or []
        self.complete_levels = complete_levels or set()
        self.sources = sources or []

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def at_level(self, level: str) -> List[NewformRecord]:
        return [rec for rec in self.records if rec.matches_level(level)]

    def exact_level(self, level: str) -> List[NewformRecord]:
        """Records stored at exactly this level (wildcards excluded)."""
        key = canonical_level(level)
        return [rec for rec in self.records if rec.level == key]

    def is_complete(self, level: str) -> bool:
        return canonical_level(level) in self.complete_levels

    def merge(self, other: 'NewformCollection') -> 'NewformCollection':
        return NewformCollection(self.records + other.records,
                                 self.complete_levels | other.complete_levels,
                                 self.sources + other.sources)


def _parse_minpoly(text: str) -> Tuple[int, ...]:
    coeffs = tuple(int(c) for c in text.replace(' ', '').split(',') if c)
    if len(coeffs) < 2:
        raise ValueError("minimal polynomial must be nonconstant")
    if coeffs[-1] != 1:
        raise ValueError("minimal polynomial must be monic")
    return coeffs


def _check_irrational(coeffs: Tuple[int, ...]):
    if len(coeffs) <= 2:
        return
    _, factors = factor_list(Poly(list(reversed(coeffs)), _X))
    if any(f.degree() == 1 for f, _ in factors):
        raise ValueError(f"minimal polynomial {list(coeffs)} has a rational root")
    if len(factors) > 1 or factors[0][1] > 1:
        raise ValueError(f"minimal polynomial {list(coeffs)} is reducible")


class _Parser:
    def __init__(self, path: str):
        self.path = path
        self.records: List[NewformRecord] = []
        self.complete: Set[str] = set()
        self.current: Optional[dict] = None

    def fail(self, message: str, lineno: int):
        raise NewformFormatError(message, lineno, self.path)

    def context(self, fields: dict, lineno: int) -> Optional[FieldContext]:
        if fields['base'] == 'Q':
            return None
        try:
            return get_context(fields['r'])
        except FieldError as e:
            self.fail(str(e), lineno)

    def parse(self, text: str):
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            keyword, _, rest = line.partition(' ')
            rest = rest.strip()
            handler = getattr(self, f"on_{keyword}", None)
            if handler is None:
                self.fail(f"unknown directive '{keyword}'", lineno)
            handler(rest, lineno)
        if self.current is not None:
            self.fail(f"newform {self.current['label']} is missing 'end'", self.current['line'])

    def require_record(self, lineno: int) -> dict:
        if self.current is None:
            self.fail("directive outside a newform block", lineno)
        return self.current

    def on_space(self, rest: str, lineno: int):
        if not rest.endswith('complete'):
            self.fail("expected 'space <level> complete'", lineno)
        level = rest[:-len('complete')].strip()
        try:
            self.complete.add(canonical_level(level))
        except ValueError as e:
            self.fail(str(e), lineno)

    def on_newform(self, rest: str, lineno: int):
        if self.current is not None:
            self.fail(f"newform {self.current['label']} is missing 'end'", lineno)
        if not rest:
            self.fail("newform needs a label", lineno)
        self.current = {'label': rest, 'line': lineno, 'base': None, 'r': None, 'level': None,
                        'degree': 1, 'eigen': [], 'delta': {}}

    def on_base_field(self, rest: str, lineno: int):
        rec = self.require_record(lineno)
        m = _BASE_RE.match(rest.replace(' ', ''))
        if not m:
            self.fail(f"base_field must be Q or K+(r), got '{rest}'", lineno)
        rec['base'] = 'Q' if m.group(1) == 'Q' else 'K+'
        rec['r'] = int(m.group(2)) if m.group(2) else None

    def on_level(self, rest: str, lineno: int):
        rec = self.require_record(lineno)
        try:
            rec['level'] = canonical_level(rest)
        except ValueError as e:
            self.fail(str(e), lineno)

    def on_degree(self, rest: str, lineno: int):
        rec = self.require_record(lineno)
        if not rest.isdigit() or int(rest) < 1:
            self.fail(f"degree must be a positive integer, got '{rest}'", lineno)
        rec['degree'] = int(rest)

    def on_eigenvalue(self, rest: str, lineno: int):
        rec = self.require_record(lineno)
        m = _EIGEN_RE.match(rest)
        if not m:
            self.fail("expected 'eigenvalue <label>: <value>'", lineno)
        rec['eigen'].append((m.group(1), m.group(2).strip(), lineno))

    def on_delta_valuation(self, rest: str, lineno: int):
        rec = self.require_record(lineno)
        m = _DELTA_RE.match(rest)
        if not m:
            self.fail("expected 'delta_valuation <p> = <v>'", lineno)
        rec['delta'][int(m.group(1))] = int(m.group(2))

    def on_end(self, rest: str, lineno: int):
        rec = self.require_record(lineno)
        if rec['base'] is None:
            self.fail(f"newform {rec['label']} has no base_field", lineno)
        if rec['level'] is None:
            self.fail(f"newform {rec['label']} has no level", lineno)
        ctx = self.context(rec, lineno)
        if ctx is not None and rec['level'] != '*':
            for token in rec['level'].split():
                try:
                    resolve_label(token.partition('^')[0], rec['base'], ctx)
                except FieldError as e:
                    self.fail(str(e), lineno)
        eigenvalues: Dict[str, EigenvalueEntry] = {}
        for label, value, eline in rec['eigen']:
            try:
                key = resolve_label(label, rec['base'], ctx)
            except FieldError as e:
                self.fail(str(e), eline)
            entry = self._entry(label, key, value, rec['degree'], eline)
            if key in eigenvalues:
                self.fail(f"duplicate eigenvalue at {label}", eline)
            eigenvalues[key] = entry
        self.records.append(NewformRecord(rec['label'], rec['base'], rec['r'], rec['level'], rec['degree'],
                                          eigenvalues, rec['delta'], rec['line']))
        self.current = None

    def _entry(self, label: str, key: str, value: str, degree: int, lineno: int) -> EigenvalueEntry:
        m = _MINPOLY_RE.match(value)
        if not m:
            try:
                return EigenvalueEntry(label, key, value=int(value))
            except ValueError:
                self.fail(f"eigenvalue must be an integer or 'minpoly [...]', got '{value}'", lineno)
        try:
            coeffs = _parse_minpoly(m.group(1))
            if degree % (len(coeffs) - 1):
                raise ValueError(f"minimal polynomial degree {len(coeffs) - 1} does not divide {degree}")
            _check_irrational(coeffs)
        except ValueError as e:
            self.fail(str(e), lineno)
        return EigenvalueEntry(label, key, minpoly=coeffs)


def parse_newforms(text: str, path: str = '<string>') -> NewformCollection:
    parser = _Parser(path)
    parser.parse(text)
    return NewformCollection(parser.records, parser.complete, [path])


def load_newform_file(path: Union[str, Path]) -> NewformCollection:
    """Parse one newform file, keeping its 'space ... complete' declarations."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"newform file not found: {path}")
    collection = parse_newforms(path.read_text(encoding='utf-8'), str(path))
    logger.info(f"Loaded {len(collection)} newform record(s) from {path.name}")
    return collection


def load_newform_files(paths: Iterable[Union[str, Path]]) -> NewformCollection:
    """Merge files; a directory contributes every *.nf file inside it."""
    collection = NewformCollection()
    for path in paths:
        path = Path(path)
        if path.is_dir():
            files = sorted(path.glob("*.nf"))
            if not files:
                logger.warning(f"No newform files in {path}")
            for nf in files:
                collection = collection.merge(load_newform_file(nf))
            continue
        collection = collection.merge(load_newform_file(path))
    return collection


def load_newforms(path: Union[str, Path]) -> List[NewformRecord]:
    """Validated records of a newform file."""
    return load_newform_file(path).records
