/**
 * The core's CSV wire format (RFC 4180): write a PlainGraph into the
 * generic or power-grid schema, and read an exported directory back into
 * plain records using the same cell rules the core applies (empty means
 * absent, "true"/"false" are flags, finite numbers parse first, the rest
 * is text).
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { CoreError } from "./errors.js";
import { EdgeKind, PlainEdge, PlainGraph, PlainNode, PropValue } from "./types.js";

// --- RFC 4180 primitives ------------------------------------------------------

function formatField(value: string): string {
  if (/[",\r\n]/.test(value)) {
    return `"${value.replace(/"/g, '""')}"`;
  }
  return value;
}

export function formatCell(value: PropValue | undefined): string {
  if (value === undefined) return "";
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") return String(value);
  return value;
}

export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let field = "";
  let inQuotes = false;
  let i = 0;
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      field += ch;
      i += 1;
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
      i += 1;
    } else if (ch === ",") {
      row.push(field);
      field = "";
      i += 1;
    } else if (ch === "\r" && text[i + 1] === "\n") {
      row.push(field);
      rows.push(row);
      row = [];
      field = "";
      i += 2;
    } else if (ch === "\n") {
      row.push(field);
      rows.push(row);
      row = [];
      field = "";
      i += 1;
    } else {
      field += ch;
      i += 1;
    }
  }
  if (field.length > 0 || row.length > 0) {
    row.push(field);
    rows.push(row);
  }
  return rows;
}

export function parseCell(cell: string): PropValue | undefined {
  if (cell === "") return undefined;
  if (cell === "true") return true;
  if (cell === "false") return false;
  const num = Number(cell);
  if (!Number.isNaN(num) && Number.isFinite(num) && cell.trim() !== "") {
    return num;
  }
  return cell;
}

// --- writing ---------------------------------------------------------------------

const BRANCH_FILES: Array<[string, EdgeKind, boolean]> = [
  ["lines.csv", "ac_line", true],
  ["transformers.csv", "transformer", true],
  ["converters.csv", "converter", false],
  ["links.csv", "dc_link", false],
];

function propColumns(items: Array<{ props?: Record<string, PropValue> }>): string[] {
  const names = new Set<string>();
  for (const item of items) {
    for (const name of Object.keys(item.props ?? {})) names.add(name);
  }
  return [...names].sort();
}

function writeCsv(filePath: string, header: string[], rows: string[][]): void {
  const lines = [header, ...rows].map((row) => row.map(formatField).join(","));
  fs.writeFileSync(filePath, lines.join("\r\n") + "\r\n", "utf-8");
}

function nodeRows(nodes: PlainNode[], props: string[], withVoltage: boolean): string[][] {
  return nodes.map((node) => {
    const row = [node.id];
    if (withVoltage) row.push(formatCell(node.v_nom));
    row.push(formatCell(node.lon), formatCell(node.lat));
    row.push(...props.map((p) => formatCell(node.props?.[p])));
    return row;
  });
}

/** Write the graph into a directory the core CLI can load. */
export function writeGraphDir(graph: PlainGraph, dir: string): void {
  fs.mkdirSync(dir, { recursive: true });
  const powerGrid = graph.edges.some((e) => e.kind !== "generic");
  const nodeProps = propColumns(graph.nodes);

  if (powerGrid) {
    writeCsv(
      path.join(dir, "buses.csv"),
      ["id", "v_nom", "x", "y", ...nodeProps],
      nodeRows(graph.nodes, nodeProps, true),
    );
    for (const [fileName, kind, ac] of BRANCH_FILES) {
      const edges = graph.edges.filter((e) => e.kind === kind);
      if (edges.length === 0) continue;
      const props = propColumns(edges);
      const fields = ac ? ["x", "r", "s_nom"] : ["p_nom"];
      const header = ["id", "bus0", "bus1", ...fields, ...props];
      const rows = edges.map((e) => [
        e.id,
        e.u,
        e.v,
        ...(ac
          ? [formatCell(e.x), formatCell(e.r), formatCell(e.s_nom)]
          : [formatCell(e.p_nom)]),
        ...props.map((p) => formatCell(e.props?.[p])),
      ]);
      writeCsv(path.join(dir, fileName), header, rows);
    }
    const generic = graph.edges.filter((e) => e.kind === "generic");
    if (generic.length > 0) writeGenericEdges(dir, generic);
  } else {
    const withVoltage = graph.nodes.some((n) => n.v_nom !== undefined);
    const header = withVoltage
      ? ["id", "v_nom", "x", "y", ...nodeProps]
      : ["id", "x", "y", ...nodeProps];
    writeCsv(path.join(dir, "nodes.csv"), header, nodeRows(graph.nodes, nodeProps, withVoltage));
    writeGenericEdges(dir, graph.edges);
  }
}

function writeGenericEdges(dir: string, edges: PlainEdge[]): void {
  const props = propColumns(edges);
  const rows = edges.map((e) => [e.id, e.u, e.v, ...props.map((p) => formatCell(e.props?.[p]))]);
  writeCsv(path.join(dir, "edges.csv"), ["id", "from", "to", ...props], rows);
}

// --- reading ---------------------------------------------------------------------

interface Table {
  header: string[];
  rows: Record<string, string>[];
}

function readTable(filePath: string): Table {
  const raw = parseCsv(fs.readFileSync(filePath, "utf-8"));
  if (raw.length === 0) return { header: [], rows: [] };
  const header = raw[0];
  const rows = raw.slice(1).map((cells) => {
    const row: Record<string, string> = {};
    header.forEach((column, i) => {
      row[column] = cells[i] ?? "";
    });
    return row;
  });
  return { header, rows };
}

function rowProps(
  row: Record<string, string>,
  known: readonly string[],
): Record<string, PropValue> | undefined {
  const props: Record<string, PropValue> = {};
  let any = false;
  for (const [column, cell] of Object.entries(row)) {
    if (known.includes(column)) continue;
    const value = parseCell(cell);
    if (value !== undefined) {
      props[column] = value;
      any = true;
    }
  }
  return any ? props : undefined;
}

function asNumber(cell: string, context: string): number | undefined {
  const value = parseCell(cell);
  if (value === undefined) return undefined;
  if (typeof value !== "number") {
    throw new CoreError("IoError", `${context}: expected a number, got '${cell}'`);
  }
  return value;
}

const NODE_COLUMNS = ["id", "v_nom", "x", "y"] as const;
const AC_COLUMNS = ["id", "bus0", "bus1", "x", "r", "s_nom"] as const;
const DC_COLUMNS = ["id", "bus0", "bus1", "p_nom"] as const;
const GENERIC_EDGE_COLUMNS = ["id", "from", "to"] as const;

function parseNode(row: Record<string, string>, context: string): PlainNode {
  const node: PlainNode = { id: row["id"] };
  const lon = asNumber(row["x"] ?? "", context);
  const lat = asNumber(row["y"] ?? "", context);
  if (lon !== undefined) node.lon = lon;
  if (lat !== undefined) node.lat = lat;
  const vNom = asNumber(row["v_nom"] ?? "", context);
  if (vNom !== undefined) node.v_nom = vNom;
  const props = rowProps(row, NODE_COLUMNS);
  if (props) node.props = props;
  return node;
}

/** Read an exported network directory (either schema) into plain records. */
export function readGraphDir(dir: string): PlainGraph {
  const nodes: PlainNode[] = [];
  const edges: PlainEdge[] = [];
  const busesPath = path.join(dir, "buses.csv");
  const powerGrid = fs.existsSync(busesPath);

  const nodesPath = powerGrid ? busesPath : path.join(dir, "nodes.csv");
  for (const row of readTable(nodesPath).rows) {
    nodes.push(parseNode(row, nodesPath));
  }

  if (powerGrid) {
    for (const [fileName, kind, ac] of BRANCH_FILES) {
      const filePath = path.join(dir, fileName);
      if (!fs.existsSync(filePath)) continue;
      for (const row of readTable(filePath).rows) {
        const edge: PlainEdge = { id: row["id"], u: row["bus0"], v: row["bus1"], kind };
        if (ac) {
          const x = asNumber(row["x"] ?? "", filePath);
          const r = asNumber(row["r"] ?? "", filePath);
          const sNom = asNumber(row["s_nom"] ?? "", filePath);
          if (x !== undefined) edge.x = x;
          if (r !== undefined) edge.r = r;
          if (sNom !== undefined) edge.s_nom = sNom;
        } else {
          const pNom = asNumber(row["p_nom"] ?? "", filePath);
          if (pNom !== undefined) edge.p_nom = pNom;
        }
        const props = rowProps(row, ac ? AC_COLUMNS : DC_COLUMNS);
        if (props) edge.props = props;
        edges.push(edge);
      }
    }
  }
  const genericPath = path.join(dir, "edges.csv");
  if (fs.existsSync(genericPath)) {
    for (const row of readTable(genericPath).rows) {
      const edge: PlainEdge = { id: row["id"], u: row["from"], v: row["to"], kind: "generic" };
      const props = rowProps(row, GENERIC_EDGE_COLUMNS);
      if (props) edge.props = props;
      edges.push(edge);
    }
  }
  return { nodes, edges };
}
