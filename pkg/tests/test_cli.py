import json

import pandas as pd
import pytest

from main import main
from src.analytics import CSV_COLUMNS
from src.core import instance_fingerprint, load_instance, save_instance


@pytest.fixture
def instance_file(tmp_path, instance_a):
    path = tmp_path / 'instance_a.json'
    save_instance(instance_a, str(path))
    return str(path)


def _simulate(instance_file, out, *extra):
    return main(['simulate', '--instance', instance_file, '--policy', 'hi-lcb', '--policy', 'hi-lcb-lite',
                 '--policy', 'hedge', '--cost-mode', 'fixed', '--seeds', '3', '-T', '2000',
                 '--checkpoints', '500,1000,2000', '--out', str(out), '--log-level', 'WARNING', *extra])


def test_simulate_writes_csv_and_metadata(tmp_path, instance_file, instance_a):
    assert _simulate(instance_file, tmp_path / 'run', '--threads', '1') == 0
    frame = pd.read_csv(tmp_path / 'run' / 'simulate.csv')
    assert list(frame.columns) == CSV_COLUMNS
    assert len(frame) == 9
    assert frame['t'].tolist()[:3] == [500, 1000, 2000]
    assert frame.loc[frame['policy'] == 'hedge', 'bound_1c'].isna().all()
    assert frame.loc[frame['policy'].str.startswith('hi-lcb'), 'bound_1c'].notna().all()

    meta = json.loads((tmp_path / 'run' / 'simulate.meta.json').read_text(encoding='utf-8'))
    assert meta['instance_sha256'] == instance_fingerprint(instance_a)
    assert meta['seeds'] == [0, 1, 2]
    assert meta['rng'] == 'PCG64'
    assert meta['alpha'] == [0.52]
    assert 'git_describe' in meta and 'version' in meta


def test_simulate_is_byte_identical_across_runs_and_workers(tmp_path, instance_file):
    assert _simulate(instance_file, tmp_path / 'a', '--threads', '1') == 0
    assert _simulate(instance_file, tmp_path / 'b', '--threads', '2') == 0
    first = (tmp_path / 'a' / 'simulate.csv').read_bytes()
    assert first == (tmp_path / 'b' / 'simulate.csv').read_bytes()


def test_echoed_config_reproduces_the_run(tmp_path, instance_file):
    assert _simulate(instance_file, tmp_path / 'a', '--threads', '1', '--seed', '40') == 0
    config = str(tmp_path / 'a' / 'simulate.config.json')
    assert main(['simulate', '--config', config, '--out', str(tmp_path / 'b'), '--threads', '1']) == 0
    assert (tmp_path / 'a' / 'simulate.csv').read_bytes() == (tmp_path / 'b' / 'simulate.csv').read_bytes()


def test_simulate_from_config_file(tmp_path, instance_a):
    config = {
        'instance': {'grid': list(instance_a.grid.values), 'f': list(instance_a.profile.f),
                     'weights': list(instance_a.weights), 'cost': {'variant': 'fixed', 'gamma': 0.5}},
        'policies': [{'policy': 'optimal'}, {'policy': 'always-accept'}],
        'seeds': 2, 'T': 300, 'checkpoints': [100, 300],
    }
    path = tmp_path / 'experiment.json'
    path.write_text(json.dumps(config), encoding='utf-8')
    assert main(['simulate', '--config', str(path), '--out', str(tmp_path / 'out'), '--threads', '1']) == 0
    frame = pd.read_csv(tmp_path / 'out' / 'simulate.csv')
    assert frame.loc[frame['policy'] == 'optimal', 'mean_regret'].tolist() == [0.0, 0.0]


def test_sweep_alpha(tmp_path, instance_file):
    code = main(['sweep', '--axis', 'alpha', '--values', '0.52,2', '--instance', instance_file,
                 '--policy', 'hi-lcb', '--cost-mode', 'fixed', '--seeds', '2', '-T', '500',
                 '--out', str(tmp_path), '--threads', '1'])
    assert code == 0
    frame = pd.read_csv(tmp_path / 'sweep_alpha.csv')
    assert frame['alpha'].tolist() == [0.52, 2.0]
    assert frame['t'].tolist() == [500, 500]
    assert frame['policy'].tolist() == ['hi-lcb(alpha=0.52,fixed)', 'hi-lcb(alpha=2,fixed)']


def test_sweep_gamma(tmp_path, instance_file):
    code = main(['sweep', '--axis', 'gamma', '--values', '0.2,0.8', '--instance', instance_file,
                 '--policy', 'hi-lcb', '--policy', 'always-accept', '--cost-mode', 'fixed',
                 '--seeds', '2', '-T', '400', '--out', str(tmp_path), '--threads', '1'])
    assert code == 0
    frame = pd.read_csv(tmp_path / 'sweep_gamma.csv')
    assert frame['gamma'].tolist() == [0.2, 0.2, 0.8, 0.8]
    # offloading at 0.8 costs more than any local error here, so always-accept is optimal
    accept = frame[frame['policy'] == 'always-accept']
    assert accept['mean_regret'].tolist()[1] == 0.0


def test_sweep_rejects_alpha_at_half(tmp_path, instance_file):
    code = main(['sweep', '--axis', 'alpha', '--values', '0.5,1', '--instance', instance_file,
                 '--policy', 'hi-lcb', '--seeds', '1', '-T', '100', '--out', str(tmp_path), '--threads', '1'])
    assert code == 1
    assert not (tmp_path / 'sweep_alpha.csv').exists()


def test_bench(tmp_path):
    code = main(['bench', '--k-values', '4,8', '-T', '300', '--warmup', '100', '--out', str(tmp_path)])
    assert code == 0
    frame = pd.read_csv(tmp_path / 'bench.csv')
    assert frame['K'].tolist() == [4, 4, 4, 8, 8, 8]
    assert set(frame['policy']) == {'hi-lcb', 'hi-lcb-lite', 'hedge'}


def test_bounds_prints_json(capsys, instance_file):
    assert main(['bounds', '--instance', instance_file, '--alpha', '0.52', '-T', '100000']) == 0
    report = json.loads(capsys.readouterr().out)
    for key in ('bound_1a', 'bound_1c', 'bound_2a', 'bound_2c'):
        assert report[key] > 0
    assert report['phi_H'] == [3, 4, 5, 6, 7]


def test_bounds_rejects_alpha_at_half(instance_file):
    assert main(['bounds', '--instance', instance_file, '--alpha', '0.5']) == 1


def test_ingest_then_replay(tmp_path):
    lines = ['confidence,correct']
    for n in range(400):
        confidence = (n % 100) / 100 + 0.005
        lines.append(f'{confidence:.3f},{int(n % 7 != 0 and confidence > 0.3)}')
    trace = tmp_path / 'trace_in.csv'
    trace.write_text('\n'.join(lines) + '\n', encoding='utf-8')

    out = tmp_path / 'ingested'
    assert main(['ingest', '--input', str(trace), '--bits', '2', '--cost-mean', '0.5',
                 '--cost-variant', 'bimodal', '--out', str(out)]) == 0
    instance = load_instance(str(out / 'instance.json'))
    assert instance.k == 4
    assert instance.weights == pytest.approx((0.25, 0.25, 0.25, 0.25))
    assert instance.cost.support_values() == pytest.approx((0.45, 0.55))
    calibration = pd.read_csv(out / 'calibration.csv')
    assert calibration['count'].tolist() == [100, 100, 100, 100]

    code = main(['simulate', '--instance', str(out / 'instance.json'), '--arrivals', 'trace-replay',
                 '--arrivals-file', str(out / 'trace.csv'), '--policy', 'hi-lcb-lite', '--seeds', '1',
                 '-T', '400', '--checkpoints', '400', '--out', str(tmp_path / 'replay'), '--threads', '1'])
    assert code == 0
    frame = pd.read_csv(tmp_path / 'replay' / 'simulate.csv')
    assert frame['stderr'].isna().all()
    assert frame['bound_2a'].isna().all()


def test_ingest_reports_bad_trace(tmp_path):
    trace = tmp_path / 'bad.csv'
    trace.write_text('0.5,1\n0.7,3\n', encoding='utf-8')
    assert main(['ingest', '--input', str(trace), '--cost-mean', '0.5', '--out', str(tmp_path)]) == 1


def test_trace_replay_longer_than_trace_fails(tmp_path, instance_file):
    seq = tmp_path / 'seq.txt'
    seq.write_text('0\n1\n', encoding='utf-8')
    code = main(['simulate', '--instance', instance_file, '--arrivals', 'adversarial', '--arrivals-file', str(seq),
                 '--policy', 'hi-lcb', '--seeds', '1', '-T', '5', '--out', str(tmp_path), '--threads', '1'])
    assert code == 1


def test_missing_instance_fails(tmp_path):
    assert main(['simulate', '--policy', 'hi-lcb', '--out', str(tmp_path), '--threads', '1']) == 1
    assert main(['simulate', '--instance', str(tmp_path / 'nope.json'), '--out', str(tmp_path)]) == 1


def test_usage_errors_exit_with_two():
    with pytest.raises(SystemExit) as err:
        main(['teleport'])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(['sweep', '--values', '1,2'])
    assert err.value.code == 2
