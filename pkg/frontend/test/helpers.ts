/** Seeded graph generation and grouping helpers for the tests. */

import { EdgeKind, PlainEdge, PlainGraph, PlainNode } from "../src/types.js";

/** mulberry32: tiny deterministic PRNG, good enough for fixtures. */
export function rng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function randInt(random: () => number, low: number, high: number): number {
  return low + Math.floor(random() * (high - low));
}

function round6(value: number): number {
  return Math.round(value * 1e6) / 1e6;
}

export function randomPowerGrid(seed: number, minNodes = 6, maxNodes = 28): PlainGraph {
  const random = rng(seed);
  const n = randInt(random, minNodes, maxNodes + 1);
  const islands = n >= 10 && random() < 0.6 ? 2 : 1;
  const voltages = [220, 380];
  const sizes = islands === 2 ? [Math.floor(n / 2), n - Math.floor(n / 2)] : [n];

  const nodes: PlainNode[] = [];
  const nodeIsland: number[] = [];
  let index = 0;
  for (let island = 0; island < islands; island++) {
    for (let i = 0; i < sizes[island]; i++) {
      const node: PlainNode = {
        id: `b${String(index).padStart(3, "0")}`,
        lon: round6(-10 + random() * 30),
        lat: round6(35 + random() * 25),
        v_nom: voltages[randInt(random, 0, voltages.length)],
      };
      const props: Record<string, number | string | boolean> = {};
      if (random() < 0.8) props.load = round6(1 + random() * 99);
      if (random() < 0.4) props.zone = `z_${String.fromCharCode(97 + randInt(random, 0, 26))}`;
      if (random() < 0.3) props.active = random() < 0.5;
      if (Object.keys(props).length) node.props = props;
      nodes.push(node);
      nodeIsland.push(island);
      index++;
    }
  }

  const edges: PlainEdge[] = [];
  let edgeIndex = 0;
  const acEdge = (i: number, j: number) => {
    const kind: EdgeKind = nodes[i].v_nom === nodes[j].v_nom ? "ac_line" : "transformer";
    edges.push({
      id: `e${String(edgeIndex++).padStart(3, "0")}`,
      u: nodes[i].id,
      v: nodes[j].id,
      kind,
      x: round6(0.01 + random() * 0.5),
      r: round6(0.001 + random() * 0.05),
      s_nom: round6(50 + random() * 450),
    });
  };

  let start = 0;
  const anchors: number[] = [];
  for (let island = 0; island < islands; island++) {
    const members = Array.from({ length: sizes[island] }, (_, i) => start + i);
    for (let offset = 1; offset < members.length; offset++) {
      acEdge(members[offset], members[randInt(random, 0, offset)]);
    }
    const chords = Math.floor(members.length * 0.5);
    for (let c = 0; c < chords && members.length >= 2; c++) {
      const i = members[randInt(random, 0, members.length)];
      let j = members[randInt(random, 0, members.length)];
      if (i === j) j = members[(members.indexOf(j) + 1) % members.length];
      if (i !== j) {
        acEdge(i, j);
        if (random() < 0.25) acEdge(i, j); // parallel circuit
      }
    }
    anchors.push(members[0]);
    start += sizes[island];
  }
  for (let island = 1; island < islands; island++) {
    edges.push({
      id: `e${String(edgeIndex++).padStart(3, "0")}`,
      u: nodes[anchors[island - 1]].id,
      v: nodes[anchors[island]].id,
      kind: random() < 0.5 ? "dc_link" : "converter",
      p_nom: round6(100 + random() * 900),
    });
  }
  return { nodes, edges };
}

/** Count the awareness groups (voltage level x AC island) a run will face. */
export function awarenessGroups(graph: PlainGraph, voltageAware: boolean): number {
  const parent = new Map<string, string>();
  const find = (x: string): string => {
    let root = x;
    while (parent.get(root) !== root) root = parent.get(root)!;
    return root;
  };
  for (const node of graph.nodes) parent.set(node.id, node.id);
  for (const edge of graph.edges) {
    if (edge.kind === "ac_line" || edge.kind === "transformer") {
      parent.set(find(edge.u), find(edge.v));
    }
  }
  const groups = new Set<string>();
  for (const node of graph.nodes) {
    const island = find(node.id);
    groups.add(voltageAware ? `${island}|${node.v_nom}` : island);
  }
  return groups.size;
}
