import json

import numpy as np
import pytest

from barycentric_treecode.cli import build_parser, main
from barycentric_treecode.harness import RunReport, read_csv, read_json, read_particles, write_outputs


def _reports(path):
    with open(path) as f:
        return read_csv(f)


def test_run(tmp_path):
    output = str(tmp_path / 'run.csv')
    code = main(
        ['run', '--example', '1', '--N', '1000', '--theta', '0.7', '--n', '7', '--N0', '200', '--eps', '0.02',
         '--seed', '1', '--threads', '2', '--output', output]
    )
    assert code == 0
    (report,) = _reports(output)
    assert (report.example, report.N, report.theta, report.n, report.N0, report.eps, report.seed, report.threads) == (
        1,
        1000,
        0.7,
        7,
        200,
        0.02,
        1,
        2,
    )
    assert report.E <= 1e-4


def test_run_to_stdout_as_json(capsys):
    assert main(['run', '--N', '400', '--N0', '100', '--format', 'json']) == 0
    (report,) = [RunReport.from_dict(item) for item in json.loads(capsys.readouterr().out)]
    assert report.kernel == 'stokeslet'
    assert report.theta == 0.7
    assert report.n == 7


def test_invalid_arguments_exit_with_2(capsys):
    """
    Invalid flags and out-of-range parameters are usage errors.
    """
    for argv in [
        ['run', '--theta', '1.5'],
        ['run', '--n', '0'],
        ['run', '--n', '21'],
        ['run', '--N0', '0'],
        ['run', '--eps', '-1'],
        ['run', '--threads', '0'],
        ['run', '--kernel', 'gravity'],
        ['run', '--N', '101'],
        ['run', '--example', '3'],
        ['run', '--bogus'],
        ['sweep', '--theta', '0.8:0.4'],
        ['frobnicate'],
        [],
    ]:
        assert main(argv) == 2, argv
    assert 'usage: treecode' in capsys.readouterr().err


def test_help_exits_with_0(capsys):
    assert main(['--help']) == 0
    assert 'generate' in capsys.readouterr().out


def test_runtime_failures_exit_with_1(tmp_path):
    assert main(['compare', str(tmp_path / 'missing.txt'), str(tmp_path / 'missing.txt')]) == 1

    particles = str(tmp_path / 'particles.txt')
    assert main(['generate', '--N', '100', '--output', particles]) == 0
    assert main(['run', '--input', particles, '--kernel', 'coulomb', '--output', str(tmp_path / 'out.csv')]) == 1


def test_sweep_grid(tmp_path):
    """
    Five theta values times ten degrees give fifty rows.
    """
    output = str(tmp_path / 'sweep.csv')
    argv = ['sweep', '--example', '1', '--N', '200', '--theta', '0.4:0.8:0.1', '--n', '1:10', '--output', output]
    assert main(argv) == 0
    reports = _reports(output)
    assert len(reports) == 50
    assert sorted({report.theta for report in reports}) == [0.4, 0.5, 0.6, 0.7, 0.8]
    assert sorted({report.n for report in reports}) == list(range(1, 11))
    assert len({report.t_direct_s for report in reports}) == 1


def test_sweep_over_n_and_epsilon(tmp_path):
    output = str(tmp_path / 'sweep.csv')
    argv = ['sweep', '--N', '200,400', '--eps', '0.01,0.02', '--ell-equals-eps', '--n', '3,5', '--N0', '50']
    argv += ['--output', output]
    assert main(argv) == 0
    reports = _reports(output)
    assert len(reports) == 8
    assert {(report.N, report.eps) for report in reports} == {(200, 0.01), (400, 0.01), (200, 0.02), (400, 0.02)}


def test_generate_and_run_from_file(tmp_path):
    particles = str(tmp_path / 'particles.txt')
    velocities = str(tmp_path / 'velocities.txt')
    output = str(tmp_path / 'run.csv')
    assert main(['generate', '--example', '2', '--g', '2', '--M', '10', '--output', particles]) == 0
    system = read_particles(particles)
    assert (system.size, system.weight_dim) == (44, 6)

    argv = ['run', '--input', particles, '--eps', '0.3', '--N0', '10', '--save-velocities', velocities]
    argv += ['--output', output]
    assert main(argv) == 0
    (report,) = _reports(output)
    assert report.kernel == 'stokeslet-rotlet'
    assert report.N == 44
    with open(velocities) as f:
        assert f.readline().strip() == '44 6'


def test_compare(tmp_path, capsys):
    reference, approx = str(tmp_path / 'reference.txt'), str(tmp_path / 'approx.txt')
    write_outputs(np.array([[3.0, 4.0]]), reference)
    write_outputs(np.array([[3.0, 0.0]]), approx)
    assert main(['compare', reference, approx]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.8)


def test_thread_count_does_not_change_the_error(tmp_path):
    errors = []
    for threads in ['1', '3']:
        output = str(tmp_path / f'run_{threads}.csv')
        assert main(['run', '--N', '2000', '--N0', '100', '--threads', threads, '--output', output]) == 0
        errors.append(_reports(output)[0].E)
    assert errors[0] == errors[1]


def test_scaling(tmp_path):
    output = str(tmp_path / 'scaling.json')
    argv = ['scaling', '--N', '1000', '--N0', '100', '--thread-counts', '1,2', '--format', 'json', '--output', output]
    assert main(argv) == 0
    with open(output) as f:
        reports = read_json(f)
    assert [report.threads for report in reports] == [1, 2]
    assert reports[0].E == reports[1].E


def test_thread_environment_variable(monkeypatch, tmp_path):
    from barycentric_treecode import cli

    monkeypatch.setattr(cli.settings, 'THREADS', 3)
    output = str(tmp_path / 'run.csv')
    assert main(['run', '--N', '200', '--output', output]) == 0
    assert _reports(output)[0].threads == 3


def test_parser_defaults():
    args = build_parser().parse_args(['run'])
    assert args.example == 1
    assert args.N == [10000]
    assert args.seed == 1
    assert args.format == 'csv'
