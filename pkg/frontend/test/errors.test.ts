/** Error mapping: boundary validation and CLI diagnostics carry core codes. */

import { describe, expect, it } from "vitest";

import { CoreError, boundPartition, boundRunPipeline, validateGraph } from "../src/index.js";
import { errorFromStderr } from "../src/errors.js";
import { PlainGraph } from "../src/types.js";
import { randomPowerGrid } from "./helpers.js";

function codeOf(fn: () => unknown): string {
  try {
    fn();
  } catch (error) {
    if (error instanceof CoreError) return error.code;
    throw error;
  }
  throw new Error("expected a CoreError");
}

const TWO_NODES: PlainGraph = {
  nodes: [
    { id: "a", lon: 0, lat: 0 },
    { id: "b", lon: 1, lat: 1 },
  ],
  edges: [],
};

describe("boundary validation", () => {
  it("rejects duplicate node ids", () => {
    const graph: PlainGraph = {
      nodes: [{ id: "a" }, { id: "a" }],
      edges: [],
    };
    expect(codeOf(() => validateGraph(graph))).toBe("DuplicateNodeId");
  });

  it("rejects self loops", () => {
    const graph: PlainGraph = {
      nodes: [{ id: "a" }],
      edges: [{ id: "e", u: "a", v: "a", kind: "generic" }],
    };
    expect(codeOf(() => validateGraph(graph))).toBe("SelfLoop");
  });

  it("rejects missing endpoints", () => {
    const graph: PlainGraph = {
      nodes: [{ id: "a" }],
      edges: [{ id: "e", u: "a", v: "ghost", kind: "generic" }],
    };
    expect(codeOf(() => validateGraph(graph))).toBe("EdgeEndpointMissing");
  });

  it("rejects AC edges without positive reactance", () => {
    const graph: PlainGraph = {
      nodes: [{ id: "a" }, { id: "b" }],
      edges: [{ id: "e", u: "a", v: "b", kind: "ac_line", x: 0 }],
    };
    expect(codeOf(() => validateGraph(graph))).toBe("NonPositiveReactance");
  });

  it("rejects out-of-range coordinates", () => {
    const graph: PlainGraph = { nodes: [{ id: "a", lon: 999, lat: 0 }], edges: [] };
    expect(codeOf(() => validateGraph(graph))).toBe("InvalidCoordinate");
  });
});

describe("CLI error propagation", () => {
  it("invalid k=0 surfaces InvalidK", () => {
    expect(codeOf(() => boundPartition(TWO_NODES, { algorithm: "kmeans", k: 0 }))).toBe(
      "InvalidK",
    );
  });

  it("empty graph surfaces InvalidK (k > n)", () => {
    const empty: PlainGraph = { nodes: [], edges: [] };
    expect(codeOf(() => boundPartition(empty, { algorithm: "kmeans", k: 2 }))).toBe("InvalidK");
  });

  it("unknown profile surfaces UnknownStrategy", () => {
    expect(
      codeOf(() =>
        boundRunPipeline(randomPowerGrid(5), {
          partition: { algorithm: "kmeans", k: 2, seed: 0 },
          profile: "no-such-profile",
        }),
      ),
    ).toBe("UnknownStrategy");
  });

  it("unknown algorithm surfaces UnknownStrategy with config stage", () => {
    try {
      boundPartition(TWO_NODES, { algorithm: "hdbscan", k: 2 });
      throw new Error("expected failure");
    } catch (error) {
      const core = error as CoreError;
      expect(core.code).toBe("UnknownStrategy");
      expect(core.stage).toBe("config");
      expect(core.exitCode).toBe(2);
    }
  });

  it("infeasible cluster count carries exit code 4", () => {
    const graph = randomPowerGrid(42); // mixed voltages and possibly two islands
    try {
      boundPartition(graph, { algorithm: "kmedoids", k: 1, voltage_aware: true });
      // a single-voltage single-island draw is legitimately feasible
    } catch (error) {
      const core = error as CoreError;
      expect(core.code).toBe("InfeasibleClusterCount");
      expect(core.exitCode).toBe(4);
    }
  });
});

describe("stderr parsing", () => {
  it("extracts the last diagnostic line", () => {
    const err = errorFromStderr(
      "noise\nstage=partition code=InvalidK msg=k=0 outside valid range [1, 3]\n",
      4,
    );
    expect(err.code).toBe("InvalidK");
    expect(err.stage).toBe("partition");
    expect(err.message).toContain("outside valid range");
    expect(err.exitCode).toBe(4);
  });

  it("falls back to a generic failure when no diagnostic line exists", () => {
    const err = errorFromStderr("Traceback (most recent call last):\nBoom\n", 1);
    expect(err.code).toBe("CliFailure");
    expect(err.message).toBe("Boom");
  });
});
