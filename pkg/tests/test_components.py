#!/usr/bin/env python3
"""
Basic tests for Frey sieve components
"""
import json
import sys
import tempfile
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.cli import SieveRunner, main as cli_main, run_single_profile, succeeded
from modules.config_manager import Config, get_config, reset_config
from modules.document_generator import ReportGenerator
from modules.frey import descend_family, family_I
from modules.logger import current_context, get_logger, log_context, log_timing, setup_logging
from modules.table_cache import TraceTableCache
from modules.traces import grouped_table

PART_II_BOUND = "no non-trivial primitive solutions for p > (1+3^18)^2"


def write_config(directory: Path, **overrides) -> Path:
    """A config.json that keeps cache, reports and logs inside directory."""
    config = {
        "default_profile": "r7_part2",
        "arithmetic": {"generator_search_bound": 5, "trial_division_bound": 100000, "norm_bound": 100000},
        "enumeration": {"workers": 1, "modulus_exponent": 3},
        "cache": {"path": str(directory / "tables.db"), "enabled": True},
        "output": {"directory": str(directory / "output"), "write_docx": False},
        "logging": {"level": "INFO", "console_output": False},
    }
    config.update(overrides)
    path = directory / "config.json"
    path.write_text(json.dumps(config), encoding='utf-8')
    return path


def test_config(tmp_path):
    """Test configuration loading."""
    print("Testing configuration...")
    path = write_config(tmp_path)
    config = Config(str(path), 'r7_part2')
    assert config.profile_name == 'r7_part2'
    assert config.run['r'] == 7
    assert config.get('run', 'family') == 'II'
    assert config.get('enumeration', 'modulus_exponent') == 3
    assert config.aux_primes() == [13]
    assert config.newform_paths()[0].name == 'r7_partII.nf'
    assert 'r7_part1' in config.available_profiles()
    assert config.resolve_path('./data') == config.get_project_root() / 'data'

    reset_config()
    assert get_config(str(path), 'r7_part1') is get_config()
    reset_config()
    print("✓ Config loaded successfully")


def test_config_errors(tmp_path):
    path = write_config(tmp_path)
    with pytest.raises(FileNotFoundError):
        Config(str(path), 'no_such_profile')
    with pytest.raises(FileNotFoundError):
        Config(str(tmp_path / 'missing.json'))

    data = json.loads(path.read_text(encoding='utf-8'))
    del data['arithmetic']
    path.write_text(json.dumps(data), encoding='utf-8')
    with pytest.raises(ValueError):
        Config(str(path), 'r7_part2')


def test_logger(tmp_path):
    """Test logging setup."""
    print("\nTesting logger...")
    log_file = tmp_path / 'logs' / 'sieve.log'
    logger = setup_logging(log_file=str(log_file), log_level="DEBUG", console_output=False)
    assert logger.name == 'frey_sieve'
    get_logger('numfield').info("Test log message")
    with log_context('r7_part2'):
        with log_context('4|a+b') as label:
            assert label == 'r7_part2/4|a+b'
            with log_timing(get_logger('sieve'), "Sieve of case 4|a+b"):
                pass
        get_logger('cli').info("Profile message")
    assert current_context() == ''
    for handler in logger.handlers:
        handler.flush()
    text = log_file.read_text(encoding='utf-8')
    assert 'frey_sieve.numfield' in text
    assert '[-] Test log message' in text
    assert '[r7_part2/4|a+b] Sieve of case 4|a+b took' in text
    assert '[r7_part2] Profile message' in text
    print("✓ Logger working")


def test_table_cache(tmp_path):
    """Test trace table cache."""
    print("\nTesting table cache...")
    table = grouped_table(descend_family(family_I(7, (1, 2, 3))), 5)
    with TraceTableCache(str(tmp_path / 'cache.db')) as cache:
        assert cache.get_table(table.descriptor) is None
        cache.put_table(table)
        assert cache.get_table(table.descriptor) == table
        cache.save_run('r7_part1', 'conditional', {'statement': 'CONDITIONAL: ...'})
        stats = cache.get_stats()
        assert stats['cached_tables'] == 1
        assert stats['cached_classes'] == len(table)
        assert stats['total_runs'] == 1
        assert stats['most_recent_run']['profile'] == 'r7_part1'
        assert cache.get_recent_runs()[0]['bound']['statement'] == 'CONDITIONAL: ...'
    print("✓ Table cache working")


def sample_results():
    return {
        'profile': 'r7_part2',
        'description': 'x^7 + y^7 = 4 z^p',
        'cases': [{
            'case': '4|a+b', 'description': 'semistable at 2', 'levels': ['P2^1 pi^1'],
            'outcomes': [{'newform': '2pi.a', 'level': 'P2^1 pi^1', 'status': 'eliminated',
                          'methods': ['B_13'], 'obstructions': {'13': 'nonzero'},
                          'exceptional_primes': [2, 3], 'union_primes': [2, 3],
                          'witnesses': {}, 'note': ''}],
            'nonrational': [], 'missing': [], 'deferred_to': None, 'error': None,
        }],
        'bound': {'statement': PART_II_BOUND, 'conditional': False, 'reasons': [],
                  'irreducibility': {'variant': 'stated', 'I': '(1+3^18)^2'}, 'modularity': '',
                  'M': 6, 'absorbed_primes': [2, 3], 'effective_primes': [], 'records': []},
        'errors': [],
    }


def test_report_generator(tmp_path):
    """Test report generation."""
    print("\nTesting report generator...")
    generator = ReportGenerator(output_dir=str(tmp_path), filename_pattern="Report_{profile}.docx")
    assert generator.default_path('r7_part2').endswith('Report_r7_part2.docx')
    path = generator.create_report(sample_results())
    assert Path(path).exists()

    text = generator.create_simple_text_report(sample_results())
    assert PART_II_BOUND in text
    assert '2pi.a (P2^1 pi^1): eliminated p in {2,3}' in text
    print("✓ Report generator working")


def test_cli_field(capsys):
    assert cli_main(['field', '--r', '7', '--q', '2,13']) == 0
    out = capsys.readouterr().out
    assert 'P2' in out
    assert 'splits into 3 primes of norm 13' in out
    with pytest.raises(SystemExit):
        cli_main(['field', '--r', '9'])


def test_cli_frey_positional(tmp_path, capsys):
    path = write_config(tmp_path)
    out = tmp_path / 'curve.txt'
    assert cli_main(['--config', str(path), 'frey', 'I', '7', '1,2,3', '0', '1', '--descend',
                     '--out', str(out)]) == 0
    assert 'conductor' in out.read_text(encoding='utf-8')
    capsys.readouterr()
    assert cli_main(['--config', str(path), 'frey', 'II', '7', '1,2']) == 1


def test_sieve_run_part_II(tmp_path):
    """Full run of the r7_part2 profile."""
    print("\nTesting a full sieve run...")
    path = write_config(tmp_path)
    results = run_single_profile(str(path), 'r7_part2')
    assert not results['errors']
    assert results['bound']['statement'] == PART_II_BOUND
    assert succeeded(results)
    assert results['tables_built'] == 1

    runner = SieveRunner(str(path), 'r7_part2')
    try:
        again = runner.run(write_report=False)
        assert again['tables_cached'] == 1
        assert again['tables_built'] == 0
        assert runner.get_stats()['total_runs'] == 2
    finally:
        runner.cleanup()
        reset_config()
    print("✓ Part II run unconditional")


def main():
    """Run all tests."""
    print("=" * 60)
    print("Frey Sieve - Component Tests")
    print("=" * 60)
    print()

    tests = [
        test_config,
        test_config_errors,
        test_logger,
        test_table_cache,
        test_report_generator,
        test_sieve_run_part_II,
    ]
    results = []
    for test in tests:
        try:
            test(Path(tempfile.mkdtemp()))
            results.append(True)
        except Exception as e:
            print(f"❌ {test.__name__} failed: {e}")
            results.append(False)

    print("\n" + "=" * 60)
    print(f"Results: {sum(results)}/{len(results)} tests passed")
    print("=" * 60)
    return all(results)


if __name__ == '__main__':
    success = main()
    sys.exit(0 if success else 1)
