import argparse
import json
import sys
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from joblib import cpu_count

from dynrank.core.batch import BatchSpec, generate_batch, save_batch
from dynrank.core.constants import (DEFAULT_ALPHA, DEFAULT_CHUNK_SIZE, DEFAULT_INSERT_RATIO, DEFAULT_MAX_ITERATIONS,
                                    DEFAULT_REPETITIONS, DEFAULT_TAU)
from dynrank.core.engine import Approach, EmptyGraphError, EngineConfig, RankMode
from dynrank.core.graph import ContractViolationError, add_self_loops, load_graph
from dynrank.core.log import LEVELS, Log, default_log
from dynrank.harness.plan import BOTH_MODES, ExperimentPlan, ExperimentRecord
from dynrank.harness.report import write_csv, write_json
from dynrank.harness.runner import (DEFAULT_TOLERANCE_DIVISORS, add_speedups, frontier_tolerance_sweep,
                                    iter_experiment, iter_scaling_sweep, run_experiment, run_single)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONTRACT = 2
EXIT_INTERRUPTED = 130

SCALING_FRACTION = 1e-4
LOG_LEVELS = tuple(name.upper() for name in LEVELS if name != 'message')


def _log():
    return default_log('dynrank')


@contextmanager
def _output(path: Optional[str]):
    if path is None or path == '-':
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, 'wt', encoding='utf-8', newline='') as file:
            yield file


def _default_thread_sweep() -> List[int]:
    threads = [1]
    while threads[-1] * 2 <= cpu_count():
        threads.append(threads[-1] * 2)
    return threads


def _add_graph_flags(parser: argparse.ArgumentParser, many: bool = False):
    if many:
        parser.add_argument('--graph', dest='graphs', action='append', required=True,
                            help='edge list, MatrixMarket file or random:n=<int>,m=<int>[,seed=<int>]; repeatable')
    else:
        parser.add_argument('--graph', required=True,
                            help='edge list, MatrixMarket file or random:n=<int>,m=<int>[,seed=<int>]')
    parser.add_argument('--base', type=int, choices=(0, 1), default=0, help='id of the first vertex in edge lists')


def _add_batch_flags(parser: argparse.ArgumentParser, insert_ratio: float = DEFAULT_INSERT_RATIO):
    parser.add_argument('--insert-ratio', type=float, default=insert_ratio,
                        help='share of insertions in a batch (1 = insertions only, 0 = deletions only)')
    parser.add_argument('--seed', type=int, default=0, help='batch generator seed')
    strictness = parser.add_mutually_exclusive_group()
    strictness.add_argument('--strict', dest='strict', action='store_true', default=True,
                            help='fail when a batch does not match the graph (default)')
    strictness.add_argument('--lenient', dest='strict', action='store_false',
                            help='skip batch updates that do not match the graph')


def _add_engine_flags(parser: argparse.ArgumentParser, thread_sweep: bool = False):
    parser.add_argument('--alpha', type=float, default=DEFAULT_ALPHA, help='damping factor')
    parser.add_argument('--tau', type=float, default=DEFAULT_TAU, help='iteration tolerance')
    parser.add_argument('--tau-f', type=float, default=None, help='frontier tolerance, defaults to tau/1e5')
    parser.add_argument('--max-iters', type=int, default=DEFAULT_MAX_ITERATIONS, help='iteration cap')
    parser.add_argument('--chunk', type=int, default=DEFAULT_CHUNK_SIZE, help='vertices per unit of work')
    if thread_sweep:
        parser.add_argument('--threads', type=int, nargs='+', default=None, help='thread counts to sweep')
    else:
        parser.add_argument('--threads', type=int, default=None,
                            help='worker threads; defaults to DYNRANK_THREADS or the CPU count')


def _add_plan_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--approach', dest='approaches', nargs='+', choices=[a.value for a in Approach],
                        default=[a.value for a in Approach], help='approaches to run')
    parser.add_argument('--mode', choices=[m.value for m in RankMode] + [BOTH_MODES],
                        default=RankMode.asynchronous.value, help='rank storage mode')
    parser.add_argument('--fractions', '--fraction', dest='fractions', type=float, nargs='+', default=[1e-4],
                        help='batch sizes as fractions of the edge count')
    parser.add_argument('--reps', type=int, default=DEFAULT_REPETITIONS, help='batches per fraction')
    parser.add_argument('--out', default=None, help='output file, standard output by default')
    parser.add_argument('--format', choices=('csv', 'json'), default='csv', help='output format')
    parser.add_argument('--summary', action='store_true', help='append geometric-mean summary rows')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='dynrank', description='Incremental PageRank on dynamic graphs')
    parser.add_argument('--log-level', choices=LOG_LEVELS, default='INFO', help='verbosity of the error stream')
    commands = parser.add_subparsers(dest='command', required=True)

    stats = commands.add_parser('stats', help='print vertex count, edge count and average degree')
    _add_graph_flags(stats)
    stats.add_argument('--format', choices=('text', 'json'), default='text', help='output format')

    run = commands.add_parser('run', help='run one approach on one generated batch')
    _add_graph_flags(run)
    run.add_argument('--approach', choices=[a.value for a in Approach], default=Approach.frontier.value)
    run.add_argument('--mode', choices=[m.value for m in RankMode], default=RankMode.asynchronous.value)
    run.add_argument('--fraction', type=float, default=1e-4, help='batch size as a fraction of the edge count')
    _add_batch_flags(run)
    _add_engine_flags(run)
    run.add_argument('--format', choices=('json', 'csv'), default='json', help='output format')
    run.add_argument('--ranks', dest='ranks', action='store_true', default=True,
                     help='include the rank vector in JSON output (default)')
    run.add_argument('--no-ranks', dest='ranks', action='store_false', help='omit the rank vector')
    run.add_argument('--out', default=None, help='output file, standard output by default')

    bench = commands.add_parser('bench', help='run an experiment grid')
    _add_graph_flags(bench, many=True)
    _add_plan_flags(bench)
    _add_batch_flags(bench)
    _add_engine_flags(bench, thread_sweep=True)
    bench.add_argument('--parallel-cells', action='store_true',
                       help='process graphs concurrently; timings are not meaningful')

    scale = commands.add_parser('scale', help='frontier speedup over thread counts')
    _add_graph_flags(scale, many=True)
    _add_plan_flags(scale)
    scale.set_defaults(fractions=[SCALING_FRACTION], approaches=[Approach.frontier.value])
    _add_batch_flags(scale, insert_ratio=1.0)
    _add_engine_flags(scale, thread_sweep=True)

    gen_batch = commands.add_parser('gen-batch', help='write a generated batch as "+ u v" / "- u v" lines')
    _add_graph_flags(gen_batch)
    gen_batch.add_argument('--fraction', type=float, default=1e-4, help='batch size as a fraction of the edge count')
    _add_batch_flags(gen_batch)
    gen_batch.add_argument('--out', default=None, help='output file, standard output by default')

    tune = commands.add_parser('tune-frontier', help='frontier error and work over frontier tolerances')
    _add_graph_flags(tune, many=True)
    _add_plan_flags(tune)
    tune.set_defaults(approaches=[Approach.static.value, Approach.frontier.value])
    _add_batch_flags(tune)
    _add_engine_flags(tune, thread_sweep=True)
    tune.add_argument('--divisors', type=float, nargs='+', default=list(DEFAULT_TOLERANCE_DIVISORS),
                      help='frontier tolerance is tau divided by each of these')
    return parser


def _engine_config(args: argparse.Namespace, mode: str = RankMode.asynchronous.value,
                   threads: Optional[int] = None) -> EngineConfig:
    return EngineConfig(alpha=args.alpha, tau=args.tau, tau_f=args.tau_f, max_iterations=args.max_iters,
                        mode=mode, chunk_size=args.chunk, threads=threads)


def _plan(args: argparse.Namespace, threads: Sequence[Optional[int]]) -> ExperimentPlan:
    mode = args.mode if args.mode != BOTH_MODES else RankMode.asynchronous.value
    return ExperimentPlan(graphs=args.graphs, approaches=args.approaches, mode=args.mode, fractions=args.fractions,
                          insert_ratio=args.insert_ratio, repetitions=args.reps, seed=args.seed, threads=threads,
                          config=_engine_config(args, mode=mode), base=args.base, strict=args.strict)


def _write_records(records: List[ExperimentRecord], args: argparse.Namespace, plan: Optional[ExperimentPlan]):
    with _output(args.out) as stream:
        if args.format == 'json':
            write_json(records, stream, plan=plan, summary=args.summary)
        else:
            write_csv(records, stream, summary=args.summary)


def _records_status(records: List[ExperimentRecord]) -> int:
    failed = sum(record.failed for record in records)
    if failed:
        _log().error(f'{failed} of {len(records)} cells failed')
        return EXIT_FAILURE
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    graph = add_self_loops(load_graph(args.graph, args.base))
    if graph.n == 0:
        _log().warning(f'Graph {args.graph} has no vertices')
    if args.format == 'json':
        print(json.dumps(dict(n=graph.n, m=graph.m, average_degree=graph.average_degree)))
    else:
        print(f'|V|={graph.n} |E|={graph.m} Davg={graph.average_degree:.2f}')
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    config = _engine_config(args, mode=args.mode, threads=args.threads)
    spec = BatchSpec(fraction=args.fraction, insert_ratio=args.insert_ratio, seed=args.seed)
    record, result = run_single(args.graph, args.approach, spec, config, base=args.base, strict=args.strict)
    with _output(args.out) as stream:
        if args.format == 'csv':
            write_csv([record], stream)
        else:
            document = dict(record.to_dict(), config=config.describe())
            if args.ranks:
                document['ranks'] = result.ranks.tolist()
            json.dump(document, stream, indent=2)
            stream.write('\n')
    if not result.converged:
        _log().warning(f'{args.approach} did not converge within {result.iterations} iterations')
    return EXIT_OK


def _gather(records_iter: Iterator[ExperimentRecord]) -> Tuple[List[ExperimentRecord], bool]:
    """ Records yielded until the sweep ends or is interrupted, and whether it was interrupted """
    records: List[ExperimentRecord] = []
    try:
        for record in records_iter:
            records.append(record)
    except KeyboardInterrupt:
        _log().warning(f'Interrupted, writing {len(records)} records gathered so far')
        return records, True
    return records, False


def cmd_bench(args: argparse.Namespace) -> int:
    plan = _plan(args, args.threads or [None])
    if args.parallel_cells:
        records = run_experiment(plan, parallel_cells=True)
        _write_records(records, args, plan)
        return _records_status(records)
    records, interrupted = _gather(iter_experiment(plan))
    _write_records(records, args, plan)
    return EXIT_INTERRUPTED if interrupted else _records_status(records)


def cmd_scale(args: argparse.Namespace) -> int:
    plan = _plan(args, args.threads or _default_thread_sweep())
    records, interrupted = _gather(iter_scaling_sweep(plan))
    # partial sweeps still get speedups for the thread counts that finished
    add_speedups(records)
    _write_records(records, args, plan)
    for record in records:
        if record.speedup is not None:
            _log().message(f'{record.graph} threads={record.threads}: speedup {record.speedup:.2f}')
    return EXIT_INTERRUPTED if interrupted else _records_status(records)


def cmd_gen_batch(args: argparse.Namespace) -> int:
    graph = add_self_loops(load_graph(args.graph, args.base))
    batch = generate_batch(graph, BatchSpec(fraction=args.fraction, insert_ratio=args.insert_ratio, seed=args.seed))
    save_batch(batch, None if args.out in (None, '-') else args.out)
    _log().info(f'Generated {len(batch.insertions)} insertions and {len(batch.deletions)} deletions')
    return EXIT_OK


def cmd_tune_frontier(args: argparse.Namespace) -> int:
    plan = _plan(args, args.threads or [None])
    records = frontier_tolerance_sweep(plan, divisors=args.divisors)
    _write_records(records, args, plan)
    return _records_status(records)


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    'stats': cmd_stats,
    'run': cmd_run,
    'bench': cmd_bench,
    'scale': cmd_scale,
    'gen-batch': cmd_gen_batch,
    'tune-frontier': cmd_tune_frontier,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    Log().reset_logging_level(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except (ContractViolationError, EmptyGraphError) as ex:
        _log().error(f'{args.command}: {ex}')
        return EXIT_CONTRACT
    except (ValueError, OSError) as ex:
        _log().error(f'{args.command}: {ex}')
        return EXIT_FAILURE
    except KeyboardInterrupt:
        return EXIT_INTERRUPTED
