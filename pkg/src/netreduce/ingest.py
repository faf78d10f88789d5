"""CSV data loading strategies, loader registry, and CSV export.

Two schemas: a generic one (nodes.csv + edges.csv) and a power-grid one
(buses.csv plus any subset of lines/transformers/converters/links, and an
optional edges.csv for generic edges). Files are RFC 4180, UTF-8, comma
delimited, header first. Unrecognized columns become properties: numeric
parse is attempted first, "true"/"false" become flags, anything else is
text; an empty cell means the property is absent. ``load(export(net))``
is structurally equal to ``net``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .errors import ConfigError, FileNotFound, InvalidCoordinate, IoError, MissingColumn
from .network import Edge, EdgeKind, Network, Node, PropertyValue, build_network
from .registry import Registry


@dataclass(frozen=True)
class LoaderSpec:
    name: str
    params: dict[str, str] = field(default_factory=dict)


_LOADERS: Registry[Callable[[LoaderSpec], Network]] = Registry("data loader")


def register_loader(name: str, loader: Callable[[LoaderSpec], Network]) -> None:
    _LOADERS.register(name, loader)


def loader_names() -> list[str]:
    return _LOADERS.names()


def load(spec: LoaderSpec) -> Network:
    """Load a network via the registered loader named in the spec."""
    return _LOADERS.get(spec.name)(spec)


# --- cell parsing / formatting -------------------------------------------------

def parse_cell(cell: str) -> PropertyValue | None:
    """Empty -> absent, "true"/"false" -> flag, finite number, else text."""
    if cell == "":
        return None
    if cell == "true":
        return True
    if cell == "false":
        return False
    try:
        number = float(cell)
    except ValueError:
        return cell
    if not math.isfinite(number):
        return cell
    return number


def format_cell(value: PropertyValue | None) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_number(cell: str, context: str) -> float | None:
    value = parse_cell(cell)
    if value is None:
        return None
    if not isinstance(value, float):
        raise IoError(f"{context}: expected a number, got {cell!r}")
    return value


def _read_rows(path: Path, required: tuple[str, ...]) -> tuple[list[str], list[dict[str, str]]]:
    if not path.is_file():
        raise FileNotFound(f"file not found: {path}")
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise MissingColumn(f"{path.name} is missing column '{column}'")
        rows = [dict(row) for row in reader]
    return list(header), rows


def _row_properties(row: dict[str, str], known: tuple[str, ...]) -> dict[str, PropertyValue]:
    properties = {}
    for column, cell in row.items():
        if column in known or column is None:
            continue
        value = parse_cell(cell if cell is not None else "")
        if value is not None:
            properties[column] = value
    return properties


def _node_from_row(row: dict[str, str], path_name: str, known: tuple[str, ...]) -> Node:
    node_id = row["id"]
    lon = _parse_number(row.get("x", "") or "", f"{path_name} node '{node_id}' column x")
    lat = _parse_number(row.get("y", "") or "", f"{path_name} node '{node_id}' column y")
    if (lon is None) != (lat is None):
        raise InvalidCoordinate(f"node '{node_id}': both x and y must be set or both empty")
    v_nom = _parse_number(row.get("v_nom", "") or "", f"{path_name} node '{node_id}' column v_nom")
    return Node(
        id=node_id,
        lon=lon,
        lat=lat,
        voltage_level=v_nom,
        properties=_row_properties(row, known),
    )


# --- generic schema --------------------------------------------------------------

_GENERIC_NODE_COLUMNS = ("id", "x", "y", "v_nom")
_GENERIC_EDGE_COLUMNS = ("id", "from", "to")


def load_generic_csv(nodes_path, edges_path) -> Network:
    """Load the generic schema: nodes.csv (id, x, y) and edges.csv (id, from, to)."""
    nodes_path, edges_path = Path(nodes_path), Path(edges_path)
    _, node_rows = _read_rows(nodes_path, ("id",))
    nodes = [_node_from_row(row, nodes_path.name, _GENERIC_NODE_COLUMNS) for row in node_rows]
    _, edge_rows = _read_rows(edges_path, _GENERIC_EDGE_COLUMNS)
    edges = [
        Edge(
            id=row["id"],
            u=row["from"],
            v=row["to"],
            kind=EdgeKind.GENERIC,
            properties=_row_properties(row, _GENERIC_EDGE_COLUMNS),
        )
        for row in edge_rows
    ]
    return build_network(nodes, edges)


# --- power-grid schema ------------------------------------------------------------

_BRANCH_FILES = {
    "lines.csv": EdgeKind.AC_LINE,
    "transformers.csv": EdgeKind.TRANSFORMER,
    "converters.csv": EdgeKind.CONVERTER,
    "links.csv": EdgeKind.DC_LINK,
}
_AC_COLUMNS = ("id", "bus0", "bus1", "x", "r", "s_nom")
_DC_COLUMNS = ("id", "bus0", "bus1", "p_nom")


def load_power_grid_csv(directory) -> Network:
    """Load the power-grid schema: buses.csv plus any subset of branch files."""
    directory = Path(directory)
    buses_path = directory / "buses.csv"
    if not buses_path.is_file():
        raise FileNotFound(f"buses.csv not found in {directory}")
    _, bus_rows = _read_rows(buses_path, ("id", "v_nom", "x", "y"))
    nodes = [_node_from_row(row, "buses.csv", _GENERIC_NODE_COLUMNS) for row in bus_rows]

    edges: list[Edge] = []
    for file_name, kind in _BRANCH_FILES.items():
        path = directory / file_name
        if not path.is_file():
            continue
        ac = kind in (EdgeKind.AC_LINE, EdgeKind.TRANSFORMER)
        known = _AC_COLUMNS if ac else _DC_COLUMNS
        _, rows = _read_rows(path, ("id", "bus0", "bus1", "x") if ac else ("id", "bus0", "bus1"))
        for row in rows:
            context = f"{file_name} edge '{row['id']}'"
            edges.append(
                Edge(
                    id=row["id"],
                    u=row["bus0"],
                    v=row["bus1"],
                    kind=kind,
                    r=_parse_number(row.get("r", "") or "", context) if ac else None,
                    x=_parse_number(row.get("x", "") or "", context) if ac else None,
                    s_nom=_parse_number(row.get("s_nom", "") or "", context) if ac else None,
                    p_nom=None if ac else _parse_number(row.get("p_nom", "") or "", context),
                    properties=_row_properties(row, known),
                )
            )
    generic_path = directory / "edges.csv"
    if generic_path.is_file():
        _, rows = _read_rows(generic_path, _GENERIC_EDGE_COLUMNS)
        for row in rows:
            edges.append(
                Edge(
                    id=row["id"],
                    u=row["from"],
                    v=row["to"],
                    kind=EdgeKind.GENERIC,
                    properties=_row_properties(row, _GENERIC_EDGE_COLUMNS),
                )
            )
    return build_network(nodes, edges)


def load_csv(directory) -> Network:
    """Auto-detect the schema of an exported directory and load it."""
    directory = Path(directory)
    if (directory / "buses.csv").is_file():
        return load_power_grid_csv(directory)
    return load_generic_csv(directory / "nodes.csv", directory / "edges.csv")


register_loader("csv-generic", lambda spec: load_generic_csv(
    _required_param(spec, "nodes"), _required_param(spec, "edges")))
register_loader("csv-power-grid", lambda spec: load_power_grid_csv(_required_param(spec, "dir")))


def _required_param(spec: LoaderSpec, name: str) -> str:
    if name not in spec.params:
        raise ConfigError(f"loader '{spec.name}' requires parameter '{name}'")
    return spec.params[name]


# --- export -----------------------------------------------------------------------

def _property_columns(items, reserved: tuple[str, ...]) -> list[str]:
    names: set[str] = set()
    for item in items:
        names.update(item.properties)
    clash = names.intersection(reserved)
    if clash:
        raise IoError(
            f"property names {sorted(clash)} collide with schema columns {reserved}"
        )
    return sorted(names)


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _node_rows(nodes, prop_columns: list[str], with_voltage: bool) -> list[list[str]]:
    rows = []
    for node in nodes:
        row = [node.id, format_cell(node.lon), format_cell(node.lat)]
        if with_voltage:
            row.insert(1, format_cell(node.voltage_level))
        row.extend(format_cell(node.properties.get(p)) for p in prop_columns)
        rows.append(row)
    return rows


def export_csv(net: Network, directory) -> None:
    """Write the power-grid schema if any edge kind is non-generic, else generic.

    Column sets are a deterministic function of the network: schema columns
    first, then the union of property names sorted alphabetically.
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {directory}: {exc}") from exc

    power_grid = net.is_power_grid()
    node_props = _property_columns(net.nodes, _GENERIC_NODE_COLUMNS)
    if power_grid:
        header = ["id", "v_nom", "x", "y", *node_props]
        _write_csv(directory / "buses.csv", header, _node_rows(net.nodes, node_props, True))
        for file_name, kind in _BRANCH_FILES.items():
            edges = [e for e in net.edges if e.kind is kind]
            if not edges:
                continue
            ac = kind in (EdgeKind.AC_LINE, EdgeKind.TRANSFORMER)
            reserved = _AC_COLUMNS if ac else _DC_COLUMNS
            props = _property_columns(edges, reserved)
            rows = []
            for e in edges:
                fields = [e.x, e.r, e.s_nom] if ac else [e.p_nom]
                rows.append(
                    [e.id, e.u, e.v, *(format_cell(f) for f in fields)]
                    + [format_cell(e.properties.get(p)) for p in props]
                )
            header = ["id", "bus0", "bus1", *(("x", "r", "s_nom") if ac else ("p_nom",)), *props]
            _write_csv(directory / file_name, header, rows)
        generic = [e for e in net.edges if e.kind is EdgeKind.GENERIC]
        if generic:
            _export_generic_edges(directory, generic)
    else:
        with_voltage = any(n.voltage_level is not None for n in net.nodes)
        header = ["id", "x", "y", *node_props]
        if with_voltage:
            header = ["id", "v_nom", "x", "y", *node_props]
        _write_csv(directory / "nodes.csv", header, _node_rows(net.nodes, node_props, with_voltage))
        _export_generic_edges(directory, list(net.edges))


def _export_generic_edges(directory: Path, edges: list[Edge]) -> None:
    for e in edges:
        if any(getattr(e, f) is not None for f in ("r", "x", "s_nom", "p_nom")):
            raise IoError(
                f"generic edge '{e.id}' carries electrical fields the generic schema cannot hold"
            )
    props = _property_columns(edges, _GENERIC_EDGE_COLUMNS)
    rows = [
        [e.id, e.u, e.v, *(format_cell(e.properties.get(p)) for p in props)]
        for e in edges
    ]
    _write_csv(directory / "edges.csv", ["id", "from", "to", *props], rows)
