/** Plain-record boundary types. Field names follow the core's wire format. */

export type PropValue = number | string | boolean;

export type EdgeKind = "ac_line" | "transformer" | "converter" | "dc_link" | "generic";

export const EDGE_KINDS: readonly EdgeKind[] = [
  "ac_line",
  "transformer",
  "converter",
  "dc_link",
  "generic",
];

export interface PlainNode {
  id: string;
  lon?: number;
  lat?: number;
  v_nom?: number;
  props?: Record<string, PropValue>;
}

export interface PlainEdge {
  id: string;
  u: string;
  v: string;
  kind: EdgeKind;
  r?: number;
  x?: number;
  s_nom?: number;
  p_nom?: number;
  props?: Record<string, PropValue>;
}

export interface PlainGraph {
  nodes: PlainNode[];
  edges: PlainEdge[];
}

export interface StrategyRecord {
  algorithm: string;
  family?: "geographical" | "electrical";
  voltage_aware?: boolean;
  island_aware?: boolean;
  k?: number;
  eps?: number;
  min_pts?: number;
  seed?: number;
  max_iter?: number;
}

export interface TransformRecord {
  name: string;
  params?: Record<string, PropValue>;
}

export interface PipelineRecord {
  partition: StrategyRecord;
  consolidate_parallel?: boolean;
  profile?: string;
  transforms?: TransformRecord[];
}

export interface Membership {
  clusters: Record<string, string[]>;
  aggregated_edges: Record<string, string[]>;
  dropped_edges: string[];
}

export interface PartitionOutput {
  assignment: Record<string, number>;
  metadata: Record<string, unknown>;
}

export interface PipelineOutput {
  busmap: Record<string, number>;
  aggregated: PlainGraph;
  membership: Membership;
}
