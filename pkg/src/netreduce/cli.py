"""Command-line entry point.

Subcommands: validate, partition, aggregate, run, viz. Exit codes:
0 success, 1 usage error, 2 config error, 3 data error, 4 infeasible
strategy. Failures print one machine-parseable stderr line:
``stage=<stage> code=<Code> msg=<message>``.
"""

from __future__ import annotations

import argparse
import sys

from . import pipeline
from .errors import EXIT_USAGE, ConfigError, NetReduceError
from .partition import load_busmap


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="netreduce", description="Partition and aggregate network graphs.")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("validate", "parse a config and resolve every referenced strategy"),
        ("partition", "run the pipeline through the busmap"),
        ("run", "run the full pipeline"),
    ):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("config", help="TOML pipeline config")

    sub = commands.add_parser("aggregate", help="aggregate from an existing busmap")
    sub.add_argument("config", help="TOML pipeline config")
    sub.add_argument("--busmap", required=True, help="busmap CSV written by 'partition'")

    sub = commands.add_parser("viz", help="emit a GeoJSON or DOT visualization")
    sub.add_argument("config", help="TOML pipeline config")
    sub.add_argument("--busmap", help="optional busmap CSV to color clusters")
    return parser


def cli_main(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"stage=cli code=UsageError msg={exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    try:
        return _dispatch(args)
    except NetReduceError as exc:
        print(f"stage={exc.stage or 'cli'} code={exc.code} msg={exc}", file=sys.stderr)
        return exc.exit_code


def _dispatch(args: argparse.Namespace) -> int:
    with pipeline._stage("config"):
        config = pipeline.load_config(args.config)

    if args.command == "validate":
        pipeline.validate_config(config)
        print(f"config ok: loader={config.input.name} algorithm={config.partition.algorithm} "
              f"profile={config.profile}")
        return 0

    if args.command == "partition":
        if config.busmap_path is None:
            raise ConfigError("config field 'output.busmap' is required for 'partition'")
        pipeline.validate_config(config)
        net = pipeline.load_input(config)
        result = pipeline.run_partition(config, net)
        pipeline.write_busmap(config, result)
        print(f"partitioned {len(result.assignment)} nodes into {result.cluster_count} clusters "
              f"({result.wall_time:.3f}s) -> {config.busmap_path}")
        return 0

    if args.command == "aggregate":
        reduced, membership = pipeline.aggregate_from_busmap(config, args.busmap)
        print(f"aggregated to {reduced.node_count} nodes / {reduced.edge_count} edges "
              f"({len(membership.dropped_edges)} intra-cluster edges dropped)")
        return 0

    if args.command == "run":
        result, reduced, membership = pipeline.run_pipeline(config)
        print(f"partitioned into {result.cluster_count} clusters; "
              f"aggregated to {reduced.node_count} nodes / {reduced.edge_count} edges")
        return 0

    if args.command == "viz":
        if config.viz_path is None:
            raise ConfigError("config field 'output.viz' is required for 'viz'")
        pipeline.validate_config(config)
        net = pipeline.load_input(config)
        assignment = None
        if args.busmap is not None:
            with pipeline._stage("partition"):
                assignment = load_busmap(args.busmap)
                missing = set(net.node_ids) - set(assignment)
                if missing:
                    from .errors import PartitionDomainMismatch

                    raise PartitionDomainMismatch(
                        f"busmap is missing {len(missing)} network nodes"
                    )
        with pipeline._stage("output"):
            pipeline.emit_viz(net, assignment, config.viz_path)
        print(f"wrote {config.viz_path}")
        return 0

    raise _UsageError(f"unknown command {args.command!r}")


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
