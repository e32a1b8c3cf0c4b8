import json
from io import StringIO
from pathlib import Path

import jsonschema
import pytest
from django.core.management import call_command

PACKAGE = Path(__file__).resolve().parent.parent
FIXTURES = PACKAGE / 'fixtures'
SCHEMA = json.loads((PACKAGE / 'schema' / 'report.schema.json').read_text())


def fixture(name):
    return str(FIXTURES / name)


def run(*args):
    out, err = StringIO(), StringIO()
    call_command('fwrank', *args, stdout=out, stderr=err)
    return out.getvalue(), err.getvalue()


def run_failing(*args):
    out, err = StringIO(), StringIO()
    with pytest.raises(SystemExit) as exc:
        call_command('fwrank', *args, stdout=out, stderr=err)
    return exc.value.code, out.getvalue(), err.getvalue()


def json_report(*args):
    out, _ = run(*args, '--format', 'json')
    report = json.loads(out)
    jsonschema.validate(instance=report, schema=SCHEMA)
    return report


class TestCheck:
    def test_text_report(self):
        out, _ = run('check', fixture('tridiagonal4.txt'), '--k', '2')
        lines = out.splitlines()
        assert 'factor_width.k: 2' in lines
        assert 'factor_width.exactness: exact' in lines
        assert 'membership.status: Member' in lines

    def test_json_report(self):
        report = json_report('check', fixture('allnonzero4.txt'))
        assert report['factor_width']['k'] == 2
        assert report['input'].endswith('allnonzero4.txt')

    def test_json_membership(self):
        report = json_report('check', fixture('tridiagonal4.txt'), '--k', '2')
        assert report['membership']['status'] == 'Member'
        assert report['membership']['decomposition']['k'] == 2
        assert report['undetermined'] is False

    def test_not_psd(self):
        code, _, err = run_failing('check', fixture('notpsd3.txt'))
        assert code == 3
        assert 'NotPSD' in err

    def test_asymmetric(self):
        code, _, err = run_failing('check', fixture('asymmetric2.txt'), '--format', 'json')
        assert code == 2
        assert json.loads(err)['error'] == 'NotSymmetric'

    def test_one_bad_input_does_not_hide_the_others(self):
        code, out, err = run_failing('check', fixture('tridiagonal4.txt'), fixture('notpsd3.txt'))
        assert code == 3
        assert 'factor_width.k: 2' in out
        assert err.startswith(fixture('notpsd3.txt'))


class TestDecompose:
    def test_banded(self):
        report = json_report('decompose', fixture('tridiagonal4.txt'), '--k', '2')
        assert report['source'] == 'banded'
        assert report['decomposition']['term_count'] == 4
        assert all(len(t['support']) <= 2 for t in report['decomposition']['terms'])

    def test_width_inferred(self):
        report = json_report('decompose', fixture('allnonzero4.txt'))
        assert report['k'] == 2 and report['auto_k']
        assert report['decomposition']['term_count'] == 6


class TestBounds:
    def test_all_nonzero(self):
        report = json_report('bounds', fixture('allnonzero4.txt'), '--k', '2')
        assert report['bounds']['exact'] == 6
        assert report['small']['result'] == {'exact': 6}

    def test_cycle_lower_bound(self):
        report = json_report('bounds', fixture('cyclic4.txt'))
        assert max(b['value'] for b in report['bounds']['lower']) == 4


class TestCombinatorial:
    def test_cover(self):
        report = json_report('cover', '7', '--k', '3')
        assert report['value'] == 7
        assert report['certified'] and report['audited']

    def test_cover_needs_k(self):
        code, _, err = run_failing('cover', '7')
        assert code == 3
        assert 'BadArgs' in err

    def test_cliquecover(self):
        out, _ = run('cliquecover', fixture('q3.graph'), '--k', '3')
        lines = out.splitlines()
        assert 'value: 6' in lines
        assert 'certified: True' in lines

    def test_cliquecover_json(self):
        report = json_report('cliquecover', fixture('q3.graph'), '--k', '3')
        assert report['value'] == 6
        assert all(len(c) == 3 for c in report['cover']['cliques'])


class TestHadamard:
    def test_power(self):
        report = json_report('hadamard', fixture('tridiagonal4.txt'), '--s', '2')
        assert report['operation'] == 'integer_power'
        assert report['psd_verdict'] is True

    def test_product(self):
        report = json_report('hadamard', fixture('tridiagonal4.txt'), fixture('allnonzero4.txt'))
        assert report['operation'] == 'product'
        assert report['width_claim']['value'] == 2

    def test_too_many_inputs(self):
        path = fixture('tridiagonal4.txt')
        code, _, _ = run_failing('hadamard', path, path, path, '--s', '2')
        assert code == 3


class TestConjecture:
    def test_records_file(self, tmp_path):
        records = tmp_path / 'trials.jsonl'
        report = json_report('conjecture', '4', '--k', '3', '--s', '2.5', '--trials', '2', '--seed', '3',
                             '--max-iter', '100', '--records', str(records))
        assert report['tested'] == 2
        assert report['counterexamples'] == []
        lines = records.read_text().splitlines()
        assert [json.loads(line)['seed'] for line in lines] == [3, 3]

    def test_integer_power_rejected(self):
        code, _, err = run_failing('conjecture', '4', '--k', '3', '--s', '2', '--trials', '1')
        assert code == 3
        assert 'BadRegime' in err


class TestDeterminism:
    @pytest.mark.parametrize("args", [
        ('conjecture', '4', '--k', '3', '--s', '2.5', '--trials', '3', '--seed', '11', '--max-iter', '100'),
        ('check', fixture('allnonzero4.txt'), fixture('cyclic4.txt'), '--k', '2'),
        ('bounds', fixture('cyclic4.txt')),
    ], ids=['conjecture', 'check', 'bounds'])
    def test_repeated_runs_are_byte_identical(self, args):
        first, _ = run(*args, '--format', 'json')
        second, _ = run(*args, '--format', 'json')
        assert first == second
