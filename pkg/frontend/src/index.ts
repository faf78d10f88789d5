/**
 * Plain-record wrapper over the netreduce pipeline: graphs go in as
 * records, get validated, cross the boundary as the CLI's CSV/TOML wire
 * formats, and return as records parsed from the CLI's outputs. Core
 * failures surface as CoreError with the core's error code.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { parseCsv, readGraphDir, writeGraphDir } from "./csv.js";
import { CoreError } from "./errors.js";
import { InputSpec, pipelineToml } from "./toml.js";
import { runCli, withWorkdir } from "./runner.js";
import {
  Membership,
  PartitionOutput,
  PipelineOutput,
  PipelineRecord,
  PlainGraph,
  StrategyRecord,
} from "./types.js";
import { validateGraph } from "./validate.js";

export { CoreError } from "./errors.js";
export * from "./types.js";
export { validateGraph } from "./validate.js";
export { readGraphDir, writeGraphDir } from "./csv.js";

function stageInput(graph: PlainGraph, dir: string): InputSpec {
  const inputDir = path.join(dir, "input");
  writeGraphDir(graph, inputDir);
  if (graph.edges.some((e) => e.kind !== "generic")) {
    return { loader: "csv-power-grid", params: { dir: inputDir } };
  }
  return {
    loader: "csv-generic",
    params: {
      nodes: path.join(inputDir, "nodes.csv"),
      edges: path.join(inputDir, "edges.csv"),
    },
  };
}

export function parseBusmap(text: string): Record<string, number> {
  const rows = parseCsv(text);
  if (rows.length === 0 || rows[0][0] !== "node_id" || rows[0][1] !== "cluster_id") {
    throw new CoreError("MissingColumn", "busmap must have node_id,cluster_id columns");
  }
  const assignment: Record<string, number> = {};
  for (const row of rows.slice(1)) {
    assignment[row[0]] = Number(row[1]);
  }
  return assignment;
}

/** Partition only: identical to the core partition stage on the same input. */
export function boundPartition(graph: PlainGraph, spec: StrategyRecord): PartitionOutput {
  validateGraph(graph);
  return withWorkdir((dir) => {
    const input = stageInput(graph, dir);
    const busmapPath = path.join(dir, "out", "busmap.csv");
    const config = pipelineToml({ partition: spec }, input, { busmap: busmapPath });
    const configPath = path.join(dir, "pipeline.toml");
    fs.writeFileSync(configPath, config, "utf-8");
    runCli(["partition", configPath], dir);
    const assignment = parseBusmap(fs.readFileSync(busmapPath, "utf-8"));
    const metadata = JSON.parse(
      fs.readFileSync(path.join(dir, "out", "busmap.meta.json"), "utf-8"),
    ) as Record<string, unknown>;
    return { assignment, metadata };
  });
}

/** Full pipeline: busmap, aggregated network, and membership as records. */
export function boundRunPipeline(graph: PlainGraph, config: PipelineRecord): PipelineOutput {
  validateGraph(graph);
  return withWorkdir((dir) => {
    const input = stageInput(graph, dir);
    const outDir = path.join(dir, "out");
    const outputs = {
      busmap: path.join(outDir, "busmap.csv"),
      network_dir: path.join(outDir, "network"),
      membership: path.join(outDir, "membership.json"),
    };
    const configPath = path.join(dir, "pipeline.toml");
    fs.writeFileSync(configPath, pipelineToml(config, input, outputs), "utf-8");
    runCli(["run", configPath], dir);
    const busmap = parseBusmap(fs.readFileSync(outputs.busmap, "utf-8"));
    const aggregated = readGraphDir(outputs.network_dir);
    const membership = JSON.parse(fs.readFileSync(outputs.membership, "utf-8")) as Membership;
    return { busmap, aggregated, membership };
  });
}
