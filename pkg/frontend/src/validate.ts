/**
 * Boundary validation: the same invariants the core enforces at network
 * construction, checked before anything is written to disk so bad input
 * fails fast with the matching core error code.
 */

import { CoreError } from "./errors.js";
import { EDGE_KINDS, PlainEdge, PlainGraph, PlainNode, PropValue } from "./types.js";

const AC_KINDS = new Set(["ac_line", "transformer"]);

function checkProps(owner: string, props: Record<string, PropValue> | undefined): void {
  if (!props) return;
  for (const [name, value] of Object.entries(props)) {
    if (typeof value === "number" && !Number.isFinite(value)) {
      throw new CoreError("InvalidProperty", `${owner}: property '${name}' must be finite`);
    }
    if (typeof value !== "number" && typeof value !== "string" && typeof value !== "boolean") {
      throw new CoreError(
        "InvalidProperty",
        `${owner}: property '${name}' must be a number, string, or boolean`,
      );
    }
  }
}

function checkNode(node: PlainNode): void {
  if (!node.id || typeof node.id !== "string") {
    throw new CoreError("InvalidProperty", `node id must be a nonempty string`);
  }
  const hasLon = node.lon !== undefined;
  const hasLat = node.lat !== undefined;
  if (hasLon !== hasLat) {
    throw new CoreError(
      "InvalidCoordinate",
      `node '${node.id}': lon and lat must both be set or both absent`,
    );
  }
  if (hasLon) {
    if (!Number.isFinite(node.lon!) || node.lon! < -180 || node.lon! > 180) {
      throw new CoreError("InvalidCoordinate", `node '${node.id}': lon outside [-180, 180]`);
    }
    if (!Number.isFinite(node.lat!) || node.lat! < -90 || node.lat! > 90) {
      throw new CoreError("InvalidCoordinate", `node '${node.id}': lat outside [-90, 90]`);
    }
  }
  if (node.v_nom !== undefined && (!Number.isFinite(node.v_nom) || node.v_nom <= 0)) {
    throw new CoreError("InvalidProperty", `node '${node.id}': v_nom must be > 0`);
  }
  checkProps(`node '${node.id}'`, node.props);
}

function checkEdge(edge: PlainEdge, nodeIds: Set<string>): void {
  if (!edge.id || typeof edge.id !== "string") {
    throw new CoreError("InvalidProperty", `edge id must be a nonempty string`);
  }
  if (!EDGE_KINDS.includes(edge.kind)) {
    throw new CoreError("InvalidProperty", `edge '${edge.id}': unknown kind '${edge.kind}'`);
  }
  if (edge.u === edge.v) {
    throw new CoreError("SelfLoop", `edge '${edge.id}': self-loop on node '${edge.u}'`);
  }
  for (const endpoint of [edge.u, edge.v]) {
    if (!nodeIds.has(endpoint)) {
      throw new CoreError(
        "EdgeEndpointMissing",
        `edge '${edge.id}' references missing node '${endpoint}'`,
      );
    }
  }
  for (const field of ["r", "x", "s_nom", "p_nom"] as const) {
    const value = edge[field];
    if (value !== undefined && !Number.isFinite(value)) {
      throw new CoreError("InvalidProperty", `edge '${edge.id}': ${field} must be finite`);
    }
  }
  if (AC_KINDS.has(edge.kind) && (edge.x === undefined || edge.x <= 0)) {
    throw new CoreError(
      "NonPositiveReactance",
      `edge '${edge.id}': ${edge.kind} requires reactance x > 0`,
    );
  }
  if (edge.s_nom !== undefined && edge.s_nom < 0) {
    throw new CoreError("InvalidProperty", `edge '${edge.id}': s_nom must be >= 0`);
  }
  if (edge.p_nom !== undefined && edge.p_nom < 0) {
    throw new CoreError("InvalidProperty", `edge '${edge.id}': p_nom must be >= 0`);
  }
  checkProps(`edge '${edge.id}'`, edge.props);
}

export function validateGraph(graph: PlainGraph): void {
  const nodeIds = new Set<string>();
  for (const node of graph.nodes) {
    checkNode(node);
    if (nodeIds.has(node.id)) {
      throw new CoreError("DuplicateNodeId", `duplicate node id '${node.id}'`);
    }
    nodeIds.add(node.id);
  }
  const edgeIds = new Set<string>();
  for (const edge of graph.edges) {
    checkEdge(edge, nodeIds);
    if (edgeIds.has(edge.id)) {
      throw new CoreError("DuplicateEdgeId", `duplicate edge id '${edge.id}'`);
    }
    edgeIds.add(edge.id);
  }
}
