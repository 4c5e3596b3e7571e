"""Command-line front end and sieve-run orchestrator."""
import argparse
import json
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

from sympy import isprime

from .config_manager import Config, get_config, reset_config
from .document_generator import ReportGenerator
from .frey import FAMILIES, FreyConstructionError, FreyFamily, get_family
from .localred import conductor_profile, enumerate_conductor_classes
from .logger import get_logger, log_context, log_timing, setup_logging
from .newforms import NewformCollection, NewformFormatError, load_newform_files
from .numfield import GeneratorSearchError, get_context
from .sieve import CaseReport, ExponentBound, SieveError, assemble_bound, sieve_case
from .table_cache import TraceTableCache
from .traces import TraceTable, grouped_table, table_descriptor

logger = get_logger('cli')

DEFAULT_SPLIT_PRIMES = (2, 3, 13)


class SieveRunner:
    """Runs every case of one profile and assembles the exponent bound."""

    def __init__(self, config_path: str = None, profile: str = None,
                 extra_newforms: Sequence[str] = (), aux_primes: Optional[Sequence[int]] = None,
                 workers: Optional[int] = None, _visited: Optional[Set[str]] = None):
        """Initialize the runner.

        Args:
            config_path: Optional path to config file.
            profile: Profile name (e.g. 'r7_part2').
            extra_newforms: Newform files or directories added to the profile's list.
            aux_primes: If given, only tables at these primes are built.
            workers: Process-pool width; overrides enumeration.workers.
        """
        reset_config()
        self.config_path = config_path
        self.config = get_config(config_path, profile)
        self.profile = self.config.profile_name
        self.extra_newforms = list(extra_newforms)
        self.aux_primes = set(aux_primes) if aux_primes else None
        self.visited = set(_visited or ()) | {self.profile}

        self.logger = _setup_logging(self.config)
        self.logger.info("=" * 60)
        self.logger.info(f"Frey sieve starting: profile {self.profile}")
        self.logger.info("=" * 60)

        self.workers = workers or self.config.get('enumeration', 'workers') or 1
        self.norm_bound = self.config.get('arithmetic', 'norm_bound') or 10 ** 6
        self._init_components()

    def _init_components(self):
        self.cache = None
        if self.config.get('cache', 'enabled'):
            db_path = self.config.resolve_path(self.config.get('cache', 'path'))
            self.cache = TraceTableCache(db_path=str(db_path))

        output_dir = self.config.resolve_path(self.config.get('output', 'directory') or 'output')
        self.report_generator = ReportGenerator(
            output_dir=str(output_dir),
            filename_pattern=self.config.get('output', 'filename_pattern')
        )
        self.logger.debug(f"Components initialized for profile: {self.profile}")

    # -- building blocks --------------------------------------------------

    def load_newforms(self) -> NewformCollection:
        paths = self.config.newform_paths() + [Path(p) for p in self.extra_newforms]
        return load_newform_files(paths)

    def family_for(self, case: Dict[str, Any]) -> FreyFamily:
        run = self.config.run
        tag = case.get('family', run.get('family', 'I'))
        if tag == 'III':
            tag += case.get('sign', run.get('sign', '+'))
        indices = tuple(case.get('indices', run.get('indices', [])))
        descend = bool(case.get('descend', run.get('descend', False)))
        return get_family(run['r'], tag, indices, descend)

    def table(self, family: FreyFamily, q: int, constraint: Optional[str], stats: Dict[str, int]) -> TraceTable:
        """A trace table from the cache, or computed and stored."""
        descriptor = table_descriptor(family, q, constraint)
        if self.cache is not None:
            cached = self.cache.get_table(descriptor)
            if cached is not None:
                stats['tables_cached'] += 1
                self.logger.info(f"Trace table {descriptor} from cache")
                return cached
        with log_timing(self.logger, f"Trace table {descriptor}"):
            table = grouped_table(family, q, constraint, self.workers, self.norm_bound)
        stats['tables_built'] += 1
        if self.cache is not None:
            self.cache.put_table(table)
        return table

    def run_case(self, case: Dict[str, Any], newforms: NewformCollection,
                 stats: Dict[str, int]) -> Tuple[CaseReport, Optional[ExponentBound]]:
        """Sieve one case, or run the profile it defers to."""
        label = case['label']
        description = case.get('description', '')
        target = case.get('defer_to')
        if target:
            report = CaseReport(label, description, [])
            report.deferred_to = target
            if target in self.visited:
                raise SieveError(f"case {label} defers to {target}, which is already running")
            self.logger.info(f"Case {label}: deferring to profile {target}")
            runner = SieveRunner(self.config_path, target, self.extra_newforms, None, self.workers,
                                 _visited=self.visited)
            try:
                nested = runner.run(write_report=False)
            finally:
                runner.cleanup()
                # the nested runner re-pointed the global config
                reset_config()
                _setup_logging(self.config)
            if nested['errors']:
                raise SieveError(f"profile {target} finished with {len(nested['errors'])} error(s)")
            return report, nested['bound_object']

        family = self.family_for(case)
        self.logger.info(f"Case {label} [{description}]: {family.label}")
        tables = []
        for entry in case.get('tables', []):
            q = int(entry['q'])
            if self.aux_primes is not None and q not in self.aux_primes:
                continue
            tables.append(self.table(family, q, entry.get('constraint'), stats))
        with log_timing(self.logger, f"Sieve of case {label}"):
            report = sieve_case(label, description, case.get('levels', []), newforms, tables,
                                case.get('inertia'), self.workers, family.base_field, family.r)
        return report, None

    # -- pipeline ---------------------------------------------------------

    def run(self, write_report: bool = None) -> Dict[str, Any]:
        """Run the complete sieve for the profile.

        Returns:
            Dictionary with execution results and statistics.
        """
        with log_context(self.profile):
            return self._run(write_report)

    def _run(self, write_report: bool = None) -> Dict[str, Any]:
        start_time = datetime.now()
        self.logger.info(f"Starting run at {start_time}")
        if write_report is None:
            write_report = bool(self.config.get('output', 'write_docx'))

        run = self.config.run
        results: Dict[str, Any] = {
            'profile': self.profile,
            'description': run.get('description', ''),
            'start_time': start_time.isoformat(),
            'cases': [],
            'bound': None,
            'bound_object': None,
            'tables_built': 0,
            'tables_cached': 0,
            'errors': []
        }
        stats = {'tables_built': 0, 'tables_cached': 0}

        try:
            newforms = self.load_newforms()
            self.logger.info(f"{len(newforms)} newform record(s), "
                             f"{len(newforms.complete_levels)} complete level(s)")

            outcomes, nonrational, missing, deferred, failed = [], [], [], [], []
            complete = True
            for case in run.get('cases', []):
                try:
                    with log_context(case.get('label', '?')):
                        report, nested = self.run_case(case, newforms, stats)
                except Exception as e:
                    self.logger.error(f"Error in case {case.get('label')}: {e}")
                    results['errors'].append({'case': case.get('label'), 'error': str(e)})
                    report = CaseReport(case.get('label', '?'), case.get('description', ''), [])
                    report.error = str(e)
                    failed.append(report.label)
                    nested = None
                if nested is not None:
                    deferred.append((report.deferred_to, nested))
                outcomes.extend(report.outcomes)
                nonrational.extend(report.nonrational)
                missing.extend(report.missing)
                if not report.outcomes and report.deferred_to is None and report.error is None:
                    complete = complete and bool(report.levels) and not report.missing
                results['cases'].append(report.to_dict())

            bound = assemble_bound(outcomes, run, missing, complete and bool(run.get('cases')),
                                   nonrational, deferred, failed)
            results['bound'] = bound.to_dict()
            results['bound_object'] = bound

            if write_report:
                results['report_file'] = self.report_generator.create_report(results)

            if self.cache is not None:
                self.cache.save_run(self.profile, 'conditional' if bound.conditional else 'unconditional',
                                    results['bound'], results.get('report_file'))

        except (NewformFormatError, FileNotFoundError) as e:
            self.logger.error(f"Could not load newform data: {e}")
            results['errors'].append({'critical': True, 'error': str(e)})

        except Exception as e:
            self.logger.error(f"Critical error in run: {e}", exc_info=True)
            results['errors'].append({
                'critical': True,
                'error': str(e)
            })

        finally:
            end_time = datetime.now()
            duration = (end_time - start_time).total_seconds()

            results['end_time'] = end_time.isoformat()
            results['duration_seconds'] = duration
            results.update(stats)

            self.logger.info("=" * 60)
            self.logger.info(f"Run completed in {duration:.2f} seconds")
            self.logger.info(f"Cases: {len(results['cases'])}")
            self.logger.info(f"Tables built: {stats['tables_built']}, from cache: {stats['tables_cached']}")
            if results['bound']:
                self.logger.info(f"Bound: {results['bound']['statement']}")
            self.logger.info(f"Errors: {len(results['errors'])}")
            self.logger.info("=" * 60)

        return results

    def get_stats(self) -> Dict[str, Any]:
        if self.cache is None:
            return {'cache': 'disabled'}
        stats = self.cache.get_stats()
        stats['recent_runs'] = self.cache.get_recent_runs()
        return stats

    def cleanup(self):
        if self.cache is not None:
            self.cache.close()
            self.cache = None
        self.logger.debug("Cleanup completed")


def succeeded(results: Dict[str, Any]) -> bool:
    """True when the run had no errors and its bound is unconditional."""
    bound = results.get('bound')
    return not results.get('errors') and bound is not None and not bound['conditional']


def run_single_profile(config_path: str, profile: str, extra_newforms: Sequence[str] = (),
                       aux_primes: Optional[Sequence[int]] = None, workers: Optional[int] = None,
                       write_report: bool = None) -> Dict[str, Any]:
    """Run the sieve for a single profile."""
    runner = None
    try:
        runner = SieveRunner(config_path, profile, extra_newforms, aux_primes, workers)
        return runner.run(write_report=write_report)
    finally:
        if runner:
            runner.cleanup()


def run_all_profiles(config_path: str, extra_newforms: Sequence[str] = (),
                     workers: Optional[int] = None, write_report: bool = None) -> Dict[str, Any]:
    """Run every profile sequentially; one failure does not stop the others."""
    reset_config()
    profiles = get_config(config_path).available_profiles()
    combined: Dict[str, Any] = {
        'mode': 'all_profiles',
        'profiles_run': [],
        'profiles_failed': [],
        'profile_results': {},
    }

    for profile in profiles:
        print(f"\n{'=' * 60}")
        print(f"Running profile: {profile}")
        print(f"{'=' * 60}")
        try:
            result = run_single_profile(config_path, profile, extra_newforms, None, workers, write_report)
            combined['profiles_run'].append(profile)
            combined['profile_results'][profile] = result
            if not succeeded(result):
                combined['profiles_failed'].append(profile)
            print(f"\n[{profile}] {result['bound']['statement'] if result.get('bound') else 'no bound'}")
        except Exception as e:
            print(f"\n[{profile}] FAILED: {e}")
            combined['profiles_failed'].append(profile)
            combined['profile_results'][profile] = {'profile': profile, 'error': str(e), 'success': False}

    return combined


# ======================================================================
# Subcommands
# ======================================================================

def _setup_logging(config: Config):
    log_file = config.get('logging', 'file')
    return setup_logging(
        log_file=str(config.resolve_path(log_file)) if log_file else None,
        log_level=config.get('logging', 'level') or 'INFO',
        console_output=bool(config.get('logging', 'console_output'))
    )


def _int_list(text: Optional[str]) -> List[int]:
    if not text:
        return []
    return [int(t) for t in text.replace(' ', '').split(',') if t]


def _emit(text: str, out: Optional[str]):
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        print(f"Wrote {path}")
    else:
        sys.stdout.write(text)


def _parse_curve_tokens(tokens: List[str]) -> Dict[str, Any]:
    """Positional form: FAMILY R INDICES [SIGN] A B (SIGN only for family III)."""
    if not tokens:
        return {}
    parsed: Dict[str, Any] = {'family': tokens[0]}
    rest = tokens[1:]
    if rest:
        parsed['r'] = int(rest.pop(0))
    if rest:
        parsed['indices'] = rest.pop(0)
    if tokens[0] == 'III' and rest and rest[0] in ('+', '-'):
        parsed['sign'] = rest.pop(0)
    if len(rest) == 2:
        parsed['a'], parsed['b'] = int(rest[0]), int(rest[1])
    elif rest:
        raise ValueError(f"expected A B after the indices, got {' '.join(rest)}")
    return parsed


def _resolve_family(args: argparse.Namespace, config: Config) -> FreyFamily:
    run = config.run
    tag = args.family or run.get('family', 'I')
    sign = args.sign or run.get('sign', '+')
    if tag == 'III':
        tag += sign
    if tag not in FAMILIES:
        raise FreyConstructionError(f"unknown family {tag!r}; expected one of {FAMILIES}")
    r = args.r or run['r']
    indices = tuple(_int_list(args.indices)) if args.indices else tuple(run.get('indices', []))
    descend = args.descend or (args.family is None and bool(run.get('descend')))
    if descend and tag != 'I':
        raise FreyConstructionError("--descend applies to family I only")
    return get_family(r, tag, indices, descend)


def cmd_field(args: argparse.Namespace, config: Config) -> int:
    r = args.r or config.run['r']
    ctx = get_context(r, config.get('arithmetic', 'generator_search_bound') or 5,
                      config.get('arithmetic', 'norm_bound') or 10 ** 6)
    print(f"Q(zeta_{r}): degree {ctx.degree}, generator g = {ctx.g}")
    print(f"K+ = Q(zeta+zeta^-1): degree {ctx.kplus_degree}")
    print(f"  minimal polynomial of z = -(zeta+zeta^-1): {_poly_text(ctx.z_minpoly, 'z')}")
    print(f"  K0 (degree {ctx.kplus_degree // 3 if ctx.has_k0 else '-'}): {'yes' if ctx.has_k0 else 'no'}")
    print(f"  k  (degree {ctx.kplus_degree // 2 if ctx.has_k else '-'}): {'yes' if ctx.has_k else 'no'}")
    pi = ctx.pi_r
    print(f"pi_{r} = {ctx.format_z(pi.generator)}: norm {r}, e = {pi.ramification}, f = {pi.residue_degree}")

    primes = _int_list(args.q) or [q for q in DEFAULT_SPLIT_PRIMES if q != r]
    status = 0
    for q in primes:
        if q == r:
            print(f"{q}: totally ramified, (r) = pi^{pi.ramification}")
            continue
        try:
            ideals = ctx.split_prime(q)
        except GeneratorSearchError as e:
            print(f"{q}: {e}")
            status = 1
            continue
        if len(ideals) == 1:
            print(f"{q}: inert (f = {ideals[0].residue_degree}), label {ideals[0].label}")
            continue
        print(f"{q}: splits into {len(ideals)} primes of norm {ideals[0].norm}")
        for P in ideals:
            print(f"    {P.label}  key {P.key}")
    return status


def _poly_text(ascending: Sequence[int], var: str) -> str:
    terms = []
    for i in range(len(ascending) - 1, -1, -1):
        c = ascending[i]
        if c == 0:
            continue
        mono = '' if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and abs(c) == 1:
            coeff = '-' if c < 0 else '+'
        else:
            coeff = f"{c:+d}"
        terms.append(f"{coeff}{mono}")
    return ''.join(terms).lstrip('+') or '0'


def _coefficient_report(family: FreyFamily) -> List[str]:
    ctx = family.ctx
    coeffs = family.coefficients
    lines = [f"coefficients {coeffs.to_text(ctx)}"]
    for name, c in (('alpha', coeffs.alpha), ('beta', coeffs.beta), ('gamma', coeffs.gamma)):
        if c is None:
            continue
        norm = c.norm_kplus()
        unit = c.is_integral() and abs(norm) == 1
        v_pi = ctx.pi_r.valuation(c)
        lines.append(f"  {name}: norm {norm}, v_pi {v_pi}, {'unit' if unit else 'non-unit'}")
    return lines


def cmd_frey(args: argparse.Namespace, config: Config) -> int:
    if args.a is None or args.b is None:
        raise ValueError("frey needs --a and --b (or the positional form FAMILY R INDICES [SIGN] A B)")
    family = _resolve_family(args, config)
    curve = family.at(args.a, args.b)
    lines = [curve.to_text().rstrip('\n')]
    if family.coefficients is not None:
        lines.extend(_coefficient_report(family))
    if curve.singular:
        lines.append("conductor - (singular)")
    else:
        trial_bound = config.get('arithmetic', 'trial_division_bound') or 10 ** 6
        lines.append(conductor_profile(curve, trial_bound=trial_bound).to_text().rstrip('\n'))
    _emit('\n'.join(lines) + '\n', args.out)
    return 0


def cmd_traces(args: argparse.Namespace, config: Config) -> int:
    family = _resolve_family(args, config)
    primes = _int_list(args.q) or _int_list(args.aux_primes)
    if not primes:
        raise ValueError("traces needs --q (or --aux-primes)")
    workers = args.workers or config.get('enumeration', 'workers') or 1
    norm_bound = config.get('arithmetic', 'norm_bound') or 10 ** 6
    chunks = []
    for q in primes:
        table = grouped_table(family, q, args.constraint, workers, norm_bound)
        chunks.append(table.to_text())
        for i, label in enumerate(table.ideals):
            mult = ' (+MULT)' if table.has_multiplicative(i) else ''
            print(f"# q={q} {label}: traces {sorted(table.trace_set(i))}{mult}", file=sys.stderr)
    _emit(''.join(chunks), args.out)
    return 0


def cmd_conductor(args: argparse.Namespace, config: Config) -> int:
    family = _resolve_family(args, config)
    k = config.get('enumeration', 'modulus_exponent') or 8
    if args.modulus:
        if args.modulus < 2 or args.modulus & (args.modulus - 1):
            raise ValueError(f"--modulus must be a power of 2, got {args.modulus}")
        k = args.modulus.bit_length() - 1
    workers = args.workers or config.get('enumeration', 'workers') or 1
    table = enumerate_conductor_classes(family, k, workers)
    _emit(table.to_text(), args.out)
    return 1 if table.unstable else 0


def cmd_sieve(args: argparse.Namespace, config_path: Optional[str]) -> int:
    newforms = [args.newforms] if args.newforms else []
    if args.profile and args.profile.lower() == 'all':
        combined = run_all_profiles(config_path, newforms, args.workers)
        print(json.dumps({k: v for k, v in combined.items() if k != 'profile_results'}, indent=2))
        return 0 if not combined['profiles_failed'] else 1

    results = run_single_profile(config_path, args.profile, newforms,
                                 _int_list(args.aux_primes) or None, args.workers)
    text = ReportGenerator().create_simple_text_report(results)
    _emit(text, args.out)
    return 0 if succeeded(results) else 1


def cmd_stats(args: argparse.Namespace, config_path: Optional[str]) -> int:
    runner = SieveRunner(config_path, args.profile)
    try:
        print(json.dumps(runner.get_stats(), indent=2, default=str))
    finally:
        runner.cleanup()
    return 0


# ======================================================================
# Entry point
# ======================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Frey-curve modular method for x^r + y^r = C z^p: fields, curves, traces and sieve runs'
    )
    parser.add_argument('--config', type=str, help='Path to config.json file')
    parser.add_argument('--profile', type=str, default=None,
                        help='Profile to use (r7_part1, r7_part2, ...; "all" for sieve). '
                             'If not specified, uses default_profile from config.')
    parser.add_argument('--workers', type=int, default=None, help='Process-pool width')

    sub = parser.add_subparsers(dest='command', required=True)

    def curve_args(p: argparse.ArgumentParser):
        p.add_argument('--r', type=int, help='Exponent r (prime >= 7)')
        p.add_argument('--family', type=str, help='Frey family: I, II, III, III+ or III-')
        p.add_argument('--indices', type=str, help='Comma-separated indices, e.g. 1,2,3')
        p.add_argument('--sign', type=str, choices=['+', '-'], help='Sign of a family III curve')
        p.add_argument('--descend', action='store_true', help='Use the family I curve over K0 (Q for r=7)')

    p_field = sub.add_parser('field', help='Field data and prime splitting')
    p_field.add_argument('--r', type=int, help='Exponent r (prime >= 7)')
    p_field.add_argument('--q', type=str, help='Comma-separated primes to split')

    p_frey = sub.add_parser('frey', help='Build a Frey curve and its conductor profile')
    p_frey.add_argument('curve', nargs='*', help='FAMILY R INDICES [SIGN] A B')
    curve_args(p_frey)
    p_frey.add_argument('--a', type=int)
    p_frey.add_argument('--b', type=int)
    p_frey.add_argument('--out', type=str)

    p_traces = sub.add_parser('traces', help='Grouped trace table at the primes above q')
    curve_args(p_traces)
    p_traces.add_argument('--q', type=str, help='Auxiliary prime(s), comma-separated')
    p_traces.add_argument('--aux-primes', type=str, help='Same as --q')
    p_traces.add_argument('--constraint', type=str, help='nonzero, sum-nonzero, sum-zero, good (comma-joined)')
    p_traces.add_argument('--out', type=str)

    p_cond = sub.add_parser('conductor', help='Conductor exponents at 2 over classes mod 2^k')
    curve_args(p_cond)
    p_cond.add_argument('--modulus', type=int, help='Power of 2 (default from config)')
    p_cond.add_argument('--out', type=str)

    p_sieve = sub.add_parser('sieve', help='Run the newform sieve for a profile')
    p_sieve.add_argument('--newforms', type=str, help='Extra newform file or directory')
    p_sieve.add_argument('--aux-primes', type=str, help='Only build tables at these primes')
    p_sieve.add_argument('--out', type=str, help='Write the text report here')

    sub.add_parser('stats', help='Trace-table cache statistics and recent runs')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for command-line execution."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == 'frey':
        try:
            for key, value in _parse_curve_tokens(args.curve).items():
                setattr(args, key, value)
        except ValueError as e:
            parser.error(str(e))
    if getattr(args, 'r', None) is not None and (args.r < 7 or not isprime(args.r)):
        parser.error(f"--r must be a prime >= 7, got {args.r}")

    try:
        if args.command == 'sieve':
            return cmd_sieve(args, args.config)
        if args.command == 'stats':
            return cmd_stats(args, args.config)

        reset_config()
        config = get_config(args.config, args.profile)
        _setup_logging(config)
        handler = {'field': cmd_field, 'frey': cmd_frey, 'traces': cmd_traces,
                   'conductor': cmd_conductor}[args.command]
        return handler(args, config)

    except KeyboardInterrupt:
        print("\nInterrupted by user")
        return 130
    except (ValueError, FileNotFoundError) as e:
        # every module's error class derives from ValueError
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
