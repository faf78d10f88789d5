"""End-to-end pipeline: TOML config, staged execution, output emission.

Stages run as load -> preprocess -> partition -> aggregate -> output, with
referenced strategy and profile names resolved up front, before any work.
Errors raised inside a stage are tagged with the stage name.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import ingest
from .aggregate import (
    _TRANSFORMS,
    DomainTransform,
    Membership,
    aggregate,
    get_profile,
    save_membership,
    validate_profile,
)
from .distance import DistanceFamily
from .errors import ConfigError, NetReduceError
from .network import Network
from .partition import (
    PartitionResult,
    StrategySpec,
    _PARTITIONERS,
    load_busmap,
    partition,
    save_busmap,
)
from .preprocess import consolidate_parallel_edges
from .viz import export_dot, export_geojson


@dataclass
class PipelineConfig:
    input: ingest.LoaderSpec
    partition: StrategySpec
    consolidate_parallel: bool = False
    profile: str = "generic"
    transforms: list[DomainTransform] = field(default_factory=list)
    busmap_path: Path | None = None
    network_dir: Path | None = None
    membership_path: Path | None = None
    viz_path: Path | None = None


def _expect_table(data: dict, key: str) -> dict:
    section = data.get(key)
    if section is None:
        raise ConfigError(f"config is missing the [{key}] section")
    if not isinstance(section, dict):
        raise ConfigError(f"[{key}] must be a table")
    return section


def _expect(section: dict, table: str, key: str, types, required: bool = False):
    value = section.get(key)
    if value is None:
        if required:
            raise ConfigError(f"config field '{table}.{key}' is required")
        return None
    allowed = _astuple(types)
    bad_bool = isinstance(value, bool) and bool not in allowed
    if bad_bool or not isinstance(value, allowed):
        names = " or ".join(t.__name__ for t in allowed)
        raise ConfigError(f"config field '{table}.{key}' must be {names}")
    return value


def _astuple(types) -> tuple:
    return types if isinstance(types, tuple) else (types,)


def load_config(path) -> PipelineConfig:
    """Parse a TOML pipeline config; relative paths resolve against the file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    base = path.parent

    input_section = _expect_table(data, "input")
    loader = _expect(input_section, "input", "loader", str, required=True)
    params = input_section.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("config field 'input.params' must be a table")
    resolved_params = {}
    for key, value in params.items():
        text = str(value)
        if key in ("dir", "nodes", "edges", "path"):
            text = str((base / text).resolve()) if not Path(text).is_absolute() else text
        resolved_params[key] = text

    partition_section = _expect_table(data, "partition")
    algorithm = _expect(partition_section, "partition", "algorithm", str, required=True)
    family_name = _expect(partition_section, "partition", "family", str) or "geographical"
    try:
        family = DistanceFamily(family_name)
    except ValueError:
        raise ConfigError(
            f"config field 'partition.family' must be 'geographical' or 'electrical', "
            f"got '{family_name}'"
        ) from None
    spec = StrategySpec(
        algorithm=algorithm,
        family=family,
        voltage_aware=bool(_expect(partition_section, "partition", "voltage_aware", bool) or False),
        island_aware=_expect(partition_section, "partition", "island_aware", bool),
        k=_expect(partition_section, "partition", "k", int),
        eps=_expect(partition_section, "partition", "eps", (int, float)),
        min_pts=_expect(partition_section, "partition", "min_pts", int),
        seed=_expect(partition_section, "partition", "seed", int) or 0,
        max_iter=_expect(partition_section, "partition", "max_iter", int) or 300,
    )

    preprocess_section = data.get("preprocess", {})
    consolidate = bool(preprocess_section.get("consolidate_parallel", False))

    aggregation_section = data.get("aggregation", {})
    profile = aggregation_section.get("profile", "generic")
    transforms = []
    for i, raw in enumerate(aggregation_section.get("transforms", [])):
        if not isinstance(raw, dict) or "name" not in raw:
            raise ConfigError(f"config field 'aggregation.transforms[{i}]' needs a name")
        transforms.append(DomainTransform(str(raw["name"]), dict(raw.get("params", {}))))

    output_section = data.get("output", {})

    def _path(key: str) -> Path | None:
        value = output_section.get(key)
        if value is None:
            return None
        p = Path(str(value))
        return p if p.is_absolute() else base / p

    return PipelineConfig(
        input=ingest.LoaderSpec(loader, resolved_params),
        partition=spec,
        consolidate_parallel=consolidate,
        profile=str(profile),
        transforms=transforms,
        busmap_path=_path("busmap"),
        network_dir=_path("network_dir"),
        membership_path=_path("membership"),
        viz_path=_path("viz"),
    )


def validate_config(config: PipelineConfig) -> None:
    """Resolve every referenced strategy/profile name before any work runs."""
    with _stage("config"):
        if config.input.name not in ingest._LOADERS:
            ingest._LOADERS.get(config.input.name)
        if config.partition.algorithm not in _PARTITIONERS:
            _PARTITIONERS.get(config.partition.algorithm)
        profile = get_profile(config.profile)
        validate_profile(profile)
        for transform in config.transforms:
            if transform.name not in _TRANSFORMS:
                _TRANSFORMS.get(transform.name)


@contextmanager
def _stage(name: str):
    try:
        yield
    except NetReduceError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


def load_input(config: PipelineConfig) -> Network:
    """Load and preprocess the input network (the first two pipeline stages)."""
    with _stage("load"):
        net = ingest.load(config.input)
    with _stage("preprocess"):
        if config.consolidate_parallel:
            net = consolidate_parallel_edges(net)
    return net


def run_partition(config: PipelineConfig, net: Network) -> PartitionResult:
    with _stage("partition"):
        return partition(net, config.partition)


def run_aggregation(config: PipelineConfig, net: Network, result) -> tuple[Network, Membership]:
    with _stage("aggregate"):
        return aggregate(net, result, config.profile, config.transforms)


def write_busmap(config: PipelineConfig, result: PartitionResult) -> None:
    if config.busmap_path is None:
        return
    with _stage("output"):
        save_busmap(result, config.busmap_path)


def write_aggregation(config: PipelineConfig, reduced: Network, membership: Membership) -> None:
    with _stage("output"):
        if config.network_dir is not None:
            ingest.export_csv(reduced, config.network_dir)
        if config.membership_path is not None:
            save_membership(membership, config.membership_path)
        if config.viz_path is not None:
            emit_viz(reduced, None, config.viz_path)


def emit_viz(net: Network, partition_result, path: Path) -> None:
    if Path(path).suffix in (".dot", ".gv"):
        export_dot(net, partition_result, path)
    else:
        export_geojson(net, partition_result, path)


def run_pipeline(config: PipelineConfig) -> tuple[PartitionResult, Network, Membership]:
    """Full pipeline; returns (partition result, aggregated network, membership)."""
    validate_config(config)
    net = load_input(config)
    result = run_partition(config, net)
    reduced, membership = run_aggregation(config, net, result)
    write_busmap(config, result)
    write_aggregation(config, reduced, membership)
    return result, reduced, membership


def aggregate_from_busmap(
    config: PipelineConfig, busmap_path
) -> tuple[Network, Membership]:
    """Aggregation stage driven by a persisted busmap (the decoupled path)."""
    validate_config(config)
    net = load_input(config)
    with _stage("partition"):
        assignment = load_busmap(busmap_path)
    reduced, membership = run_aggregation(config, net, assignment)
    write_aggregation(config, reduced, membership)
    return reduced, membership
