/** Minimal TOML emission for the pipeline config shape the CLI consumes. */

import { PipelineRecord, PropValue, StrategyRecord } from "./types.js";

function tomlValue(value: PropValue): string {
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") {
    if (!Number.isFinite(value)) throw new Error(`non-finite TOML value: ${value}`);
    return Number.isInteger(value) ? String(value) : String(value);
  }
  return JSON.stringify(value); // TOML basic strings share JSON escaping
}

function strategyLines(spec: StrategyRecord): string[] {
  const lines = ["[partition]", `algorithm = ${tomlValue(spec.algorithm)}`];
  if (spec.family !== undefined) lines.push(`family = ${tomlValue(spec.family)}`);
  if (spec.voltage_aware !== undefined) lines.push(`voltage_aware = ${tomlValue(spec.voltage_aware)}`);
  if (spec.island_aware !== undefined) lines.push(`island_aware = ${tomlValue(spec.island_aware)}`);
  if (spec.k !== undefined) lines.push(`k = ${tomlValue(spec.k)}`);
  if (spec.eps !== undefined) lines.push(`eps = ${tomlValue(spec.eps)}`);
  if (spec.min_pts !== undefined) lines.push(`min_pts = ${tomlValue(spec.min_pts)}`);
  if (spec.seed !== undefined) lines.push(`seed = ${tomlValue(spec.seed)}`);
  if (spec.max_iter !== undefined) lines.push(`max_iter = ${tomlValue(spec.max_iter)}`);
  return lines;
}

export interface OutputPaths {
  busmap?: string;
  network_dir?: string;
  membership?: string;
  viz?: string;
}

export interface InputSpec {
  loader: string;
  params: Record<string, string>;
}

export function pipelineToml(
  config: PipelineRecord,
  input: InputSpec,
  outputs: OutputPaths,
): string {
  const lines = [
    "[input]",
    `loader = ${tomlValue(input.loader)}`,
    "[input.params]",
    ...Object.entries(input.params).map(([key, value]) => `${key} = ${tomlValue(value)}`),
    "",
    "[preprocess]",
    `consolidate_parallel = ${tomlValue(config.consolidate_parallel ?? false)}`,
    "",
    ...strategyLines(config.partition),
    "",
    "[aggregation]",
    `profile = ${tomlValue(config.profile ?? "generic")}`,
  ];
  for (const transform of config.transforms ?? []) {
    lines.push("", "[[aggregation.transforms]]", `name = ${tomlValue(transform.name)}`);
    const params = Object.entries(transform.params ?? {});
    if (params.length > 0) {
      lines.push("[aggregation.transforms.params]");
      for (const [key, value] of params) {
        lines.push(`${key} = ${tomlValue(value)}`);
      }
    }
  }
  lines.push("", "[output]");
  if (outputs.busmap) lines.push(`busmap = ${tomlValue(outputs.busmap)}`);
  if (outputs.network_dir) lines.push(`network_dir = ${tomlValue(outputs.network_dir)}`);
  if (outputs.membership) lines.push(`membership = ${tomlValue(outputs.membership)}`);
  if (outputs.viz) lines.push(`viz = ${tomlValue(outputs.viz)}`);
  return lines.join("\n") + "\n";
}
