import argparse
from typing import Any, Dict, List, Tuple

import pandas as pd

from ..config import logger, BENCH_WARMUP, DEFAULT_ALPHA, OUTPUT_DIR, THREADS
from ..analytics.bench import BENCH_POLICIES, benchmark
from ..analytics.bounds import all_bounds
from ..analytics.montecarlo import Aggregate, aggregate_rows, monte_carlo
from ..core.schema import cost_to_dict, instance_fingerprint, instance_to_dict, load_instance
from ..core.types import CostModel, CostVariant, InstanceSpec
from ..environment.stream import RNG_ALGORITHM, ArrivalProcess
from ..errors import ConfigurationError
from ..ingest.trace import (
    bits_to_bins, calibration_table, estimate_instance, quantize, read_trace_frame, write_quantized_trace
)
from ..policies.settings import LCB_POLICIES, PolicyConfig
from ..result_storage import ResultStorage
from .experiment import (
    ExperimentConfig, load_experiment_file, parse_experiment, resolve_arrivals, resolve_instance
)
from .utils import episode_pool, parse_list, print_json, show_progress

DEFAULT_POLICIES = ['hi-lcb', 'hi-lcb-lite', 'hedge']

ARRIVAL_MODES = ['stochastic', 'adversarial', 'trace-replay', 'trace-sample']


# Argument builders, looked up by the registry as <command>_arguments

def _experiment_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--instance', help='Instance JSON file')
    parser.add_argument('--policy', action='append', choices=sorted(
        ['hi-lcb', 'hi-lcb-lite', 'optimal', 'hedge', 'always-offload', 'always-accept']),
        help='Policy to run; repeat for several (default: hi-lcb, hi-lcb-lite, hedge)')
    parser.add_argument('--alpha', type=float, help=f'Exploration parameter (default {DEFAULT_ALPHA})')
    parser.add_argument('--cost-mode', choices=['iid', 'fixed'], help='LCB cost handling')
    parser.add_argument('--gamma', type=float, help='Known offload cost for --cost-mode fixed')
    parser.add_argument('--eta', help='Hedge learning rate or "auto"')
    parser.add_argument('--arrivals', choices=ARRIVAL_MODES, help='Arrival process')
    parser.add_argument('--arrivals-file', help='Index sequence or quantized trace for non-stochastic arrivals')
    parser.add_argument('--seeds', type=int, help='Number of seeds (default 100)')
    parser.add_argument('-T', '--horizon', dest='T', type=int, help='Horizon (default 100000)')
    parser.add_argument('--checkpoints', help='Comma-separated checkpoints, last one <= T')


def simulate_arguments(parser: argparse.ArgumentParser) -> None:
    _experiment_arguments(parser)


def sweep_arguments(parser: argparse.ArgumentParser) -> None:
    _experiment_arguments(parser)
    parser.add_argument('--axis', choices=['gamma', 'alpha'], required=True, help='Swept parameter')
    parser.add_argument('--values', required=True, help='Comma-separated values of the swept parameter')


def bench_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--k-values', default='16,64,256,1024,4096', help='Grid sizes to time')
    parser.add_argument('-T', '--horizon', dest='T', type=int, default=10000, help='Rounds per measurement')
    parser.add_argument('--alpha', type=float, default=DEFAULT_ALPHA)
    parser.add_argument('--warmup', type=int, default=BENCH_WARMUP, help='Rounds excluded from timing')
    parser.add_argument('--policies', default=','.join(BENCH_POLICIES))


def bounds_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--instance', help='Instance JSON file (or the instance of --config)')
    parser.add_argument('--alpha', type=float, default=DEFAULT_ALPHA)
    parser.add_argument('-T', '--horizon', dest='T', type=int, default=100000)


def ingest_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--input', required=True, help='CSV of confidence,correct rows')
    parser.add_argument('--bits', type=int, default=4, help='Quantization bits; K = 2^bits')
    parser.add_argument('--cost-mean', type=float, required=True, help='Mean offloading cost gamma')
    parser.add_argument('--cost-variant', choices=['fixed', 'bernoulli', 'bimodal'], default='fixed')


# Shared helpers

def _policy_dicts(args: argparse.Namespace) -> List[Dict[str, Any]]:
    '''Policy configs from CLI flags'''
    policies = []
    for name in args.policy or DEFAULT_POLICIES:
        entry: Dict[str, Any] = {'policy': name}
        if name in LCB_POLICIES:
            if args.alpha is not None:
                entry['alpha'] = args.alpha
            if args.cost_mode is not None:
                entry['cost_mode'] = args.cost_mode
            if args.gamma is not None:
                entry['gamma'] = args.gamma
        elif name == 'hedge' and args.eta is not None:
            entry['eta'] = args.eta if args.eta == 'auto' else float(args.eta)
        policies.append(entry)
    return policies


def build_experiment(args: argparse.Namespace) -> ExperimentConfig:
    '''Merge --config with command-line overrides and validate'''
    data = load_experiment_file(args.config) if args.config else {}
    if args.instance:
        data['instance'] = args.instance
    if args.policy or 'policies' not in data:
        data['policies'] = _policy_dicts(args)
    elif any(v is not None for v in (args.alpha, args.cost_mode, args.gamma, args.eta)):
        logger.warning('Policy flags are ignored when --config lists policies; pass --policy to override')
    if args.arrivals:
        data['arrivals'] = {'mode': args.arrivals, 'path': args.arrivals_file}
    elif args.arrivals_file:
        raise ConfigurationError('--arrivals-file needs --arrivals.')
    if args.seeds is not None:
        data['seeds'] = args.seeds
    if args.T is not None:
        data['T'] = args.T
        if args.checkpoints is None and 'checkpoints' in data:
            data.pop('checkpoints')
    if args.checkpoints is not None:
        data['checkpoints'] = parse_list(args.checkpoints, int, '--checkpoints')
    if args.seed is not None:
        data['base_seed'] = args.seed
    if args.out:
        data['out'] = args.out
    if 'instance' not in data:
        raise ConfigurationError('No instance given; use --instance or a config with "instance".')
    return parse_experiment(data)


def _run_policies(config: ExperimentConfig, instance: InstanceSpec, arrivals: ArrivalProcess,
                  policies: List[PolicyConfig], checkpoints: List[int],
                  threads: int) -> List[Tuple[PolicyConfig, Aggregate]]:
    results = []
    with episode_pool(threads) as executor:
        for policy in policies:
            logger.info(f'Running {policy.label} over {config.seeds} seeds, T={config.T}')
            aggregate = monte_carlo(instance, arrivals, policy, config.seed_list, config.T,
                                    checkpoints, executor=executor, progress=show_progress())
            results.append((policy, aggregate))
    return results


def _metadata(storage: ResultStorage, config: ExperimentConfig, instance: InstanceSpec,
              **extra: Any) -> Dict[str, Any]:
    return storage.build_metadata(
        instance_sha256=instance_fingerprint(instance),
        instance=instance_to_dict(instance),
        seeds=config.seed_list,
        alpha=sorted({p.alpha for p in config.policies if p.policy in LCB_POLICIES}),
        cost_model=cost_to_dict(instance.cost),
        rng=RNG_ALGORITHM,
        experiment=config.model_dump(mode='json'),
        **extra,
    )


def _with_mean(cost: CostModel, gamma: float) -> CostModel:
    '''Same cost variant with a new mean'''
    if cost.variant is CostVariant.FIXED:
        return CostModel.fixed(gamma)
    if cost.variant is CostVariant.BERNOULLI:
        return CostModel.bernoulli(gamma)
    raise ConfigurationError('A gamma sweep needs a fixed or bernoulli cost model.')


# Command handlers

def simulate_command(args: argparse.Namespace) -> int:
    '''Regret-vs-time CSV for every policy of the experiment'''
    config = build_experiment(args)
    instance = resolve_instance(config)
    arrivals = resolve_arrivals(config, instance)
    storage = ResultStorage(config.out or OUTPUT_DIR)

    results = _run_policies(config, instance, arrivals, config.policies, config.checkpoints,
                            args.threads or THREADS)
    frame = pd.concat([aggregate_rows(agg, instance, policy, arrivals) for policy, agg in results],
                      ignore_index=True)
    storage.save_csv('simulate.csv', frame)
    storage.save_json('simulate.config.json', config.model_dump(mode='json'))
    storage.save_json('simulate.meta.json', _metadata(storage, config, instance))
    logger.info(f'Simulation finished for {len(results)} policies')
    return 0


def sweep_command(args: argparse.Namespace) -> int:
    '''One final-horizon row per swept value per policy'''
    config = build_experiment(args)
    base_instance = resolve_instance(config)
    arrivals = resolve_arrivals(config, base_instance)
    values = parse_list(args.values, float, '--values')
    if args.axis == 'alpha':
        bad = [v for v in values if not v > 0.5]
        if bad:
            raise ConfigurationError(f'alpha values must be > 0.5, got {bad}.')
    storage = ResultStorage(config.out or OUTPUT_DIR)

    frames = []
    for value in values:
        if args.axis == 'gamma':
            instance = base_instance.with_cost(_with_mean(base_instance.cost, value))
            policies = [p.model_copy(update={'gamma': value}) if p.cost_mode == 'fixed' else p
                        for p in config.policies]
        else:
            instance = base_instance
            policies = [p.model_copy(update={'alpha': value}) if p.policy in LCB_POLICIES else p
                        for p in config.policies]
        logger.info(f'Sweep {args.axis}={value:g}')
        for policy, agg in _run_policies(config, instance, arrivals, policies, [config.T],
                                         args.threads or THREADS):
            rows = aggregate_rows(agg, instance, policy, arrivals, only_final=True)
            rows.insert(0, args.axis, value)
            frames.append(rows)

    storage.save_csv(f'sweep_{args.axis}.csv', pd.concat(frames, ignore_index=True))
    storage.save_json(f'sweep_{args.axis}.config.json', config.model_dump(mode='json'))
    storage.save_json(f'sweep_{args.axis}.meta.json',
                      _metadata(storage, config, base_instance, axis=args.axis, values=values))
    return 0


def bench_command(args: argparse.Namespace) -> int:
    '''Per-decision runtime against |Phi|'''
    k_values = parse_list(args.k_values, int, '--k-values')
    if any(k < 1 for k in k_values):
        raise ConfigurationError(f'K values must be >= 1, got {k_values}.')
    policies = parse_list(args.policies, str, '--policies')
    storage = ResultStorage(args.out or OUTPUT_DIR)
    frame = benchmark(k_values, args.T, args.alpha, policies, warmup=args.warmup)
    storage.save_csv('bench.csv', frame)
    storage.save_json('bench.meta.json', storage.build_metadata(
        k_values=k_values, T=args.T, alpha=args.alpha, warmup=args.warmup, policies=policies))
    return 0


def bounds_command(args: argparse.Namespace) -> int:
    '''Print every applicable bound as JSON'''
    if args.instance:
        instance = load_instance(args.instance)
    elif args.config:
        data = load_experiment_file(args.config)
        if 'instance' not in data:
            raise ConfigurationError(f'Config {args.config} has no instance.')
        instance = resolve_instance(parse_experiment({'policies': [{'policy': 'optimal'}], **data}))
    else:
        raise ConfigurationError('No instance given; use --instance or --config.')
    bounds = all_bounds(instance, args.alpha, args.T)
    bounds['instance_sha256'] = instance_fingerprint(instance)
    print_json(bounds)
    return 0


def ingest_command(args: argparse.Namespace) -> int:
    '''Quantize a trace and write the empirical instance, the replayable trace and the calibration table'''
    k = bits_to_bins(args.bits)
    if args.cost_variant == 'fixed':
        cost = CostModel.fixed(args.cost_mean)
    elif args.cost_variant == 'bernoulli':
        cost = CostModel.bernoulli(args.cost_mean)
    else:
        cost = CostModel.bimodal(args.cost_mean)

    frame = read_trace_frame(args.input)
    qt = quantize(frame, k)
    instance = estimate_instance(qt, cost)
    storage = ResultStorage(args.out or OUTPUT_DIR)
    storage.save_json('instance.json', instance_to_dict(instance))
    write_quantized_trace(qt, storage.get_file_path('trace.csv'))
    storage.save_csv('calibration.csv', calibration_table(qt))
    storage.save_json('ingest.meta.json', storage.build_metadata(
        input=args.input, rows=len(qt), bits=args.bits, K=k, cost_model=cost_to_dict(cost),
        monotone=instance.profile.monotone, instance_sha256=instance_fingerprint(instance)))
    logger.info(f'Ingested {len(qt)} rows into {k} bins (monotone={instance.profile.monotone})')
    return 0
