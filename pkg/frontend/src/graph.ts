import type { GraphResponse, PairAssessment } from "./api.js";
import { statusColor } from "./colors.js";

export interface GraphNodeView {
  id: string;
  name: string;
  x: number;
  y: number;
}

export interface GraphEdgeView {
  pairId: string;
  source: string;
  target: string;
  total: number;
  status: string;
  color: string;
  width: number;
}

export interface GraphView {
  nodes: GraphNodeView[];
  edges: GraphEdgeView[];
  width: number;
  height: number;
}

/** Small deterministic PRNG so layouts are stable across runs and tests. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface LayoutOptions {
  seed?: number;
  width?: number;
  height?: number;
  iterations?: number;
}

/**
 * Force-directed layout with seeded initialization: pairwise repulsion,
 * spring attraction along edges (stronger for higher totals), and a gentle
 * pull to the center. Pure presentation; no evidence values are derived.
 */
export function layoutGraph(
  nodeIds: string[],
  edges: { source: string; target: string; total: number }[],
  opts: LayoutOptions = {},
): Map<string, { x: number; y: number }> {
  const width = opts.width ?? 640;
  const height = opts.height ?? 480;
  const iterations = opts.iterations ?? 150;
  const rand = mulberry32(opts.seed ?? 42);
  const pos = new Map<string, { x: number; y: number }>();
  for (const id of nodeIds) {
    pos.set(id, { x: rand() * width, y: rand() * height });
  }
  const k = Math.sqrt((width * height) / Math.max(1, nodeIds.length));
  for (let it = 0; it < iterations; it++) {
    const cool = 0.1 * Math.max(0.05, 1 - it / iterations);
    const force = new Map<string, { x: number; y: number }>(
      nodeIds.map((id) => [id, { x: 0, y: 0 }]),
    );
    for (let i = 0; i < nodeIds.length; i++) {
      for (let j = i + 1; j < nodeIds.length; j++) {
        const a = pos.get(nodeIds[i])!;
        const b = pos.get(nodeIds[j])!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        const dist = Math.max(1e-3, Math.hypot(dx, dy));
        const repulse = (k * k) / dist / dist;
        dx *= repulse;
        dy *= repulse;
        force.get(nodeIds[i])!.x += dx;
        force.get(nodeIds[i])!.y += dy;
        force.get(nodeIds[j])!.x -= dx;
        force.get(nodeIds[j])!.y -= dy;
      }
    }
    for (const e of edges) {
      const a = pos.get(e.source);
      const b = pos.get(e.target);
      if (!a || !b) continue;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const dist = Math.max(1e-3, Math.hypot(dx, dy));
      const pull = ((dist / k) * (0.5 + e.total)) / dist;
      force.get(e.source)!.x += dx * pull;
      force.get(e.source)!.y += dy * pull;
      force.get(e.target)!.x -= dx * pull;
      force.get(e.target)!.y -= dy * pull;
    }
    for (const id of nodeIds) {
      const p = pos.get(id)!;
      const f = force.get(id)!;
      f.x += (width / 2 - p.x) * 0.02;
      f.y += (height / 2 - p.y) * 0.02;
      p.x = Math.min(width - 10, Math.max(10, p.x + f.x * cool));
      p.y = Math.min(height - 10, Math.max(10, p.y + f.y * cool));
    }
  }
  return pos;
}

/**
 * Graph view for one assignment (or every assignment when omitted): nodes
 * are people — isolated ones included — edge width grows with total, edge
 * color is the review-status color.
 */
export function buildGraphView(
  graph: GraphResponse,
  assignment?: string,
  opts: LayoutOptions = {},
): GraphView {
  const width = opts.width ?? 640;
  const height = opts.height ?? 480;
  const edges = graph.edges
    .filter((e: PairAssessment) => !assignment || e.assignment === assignment)
    .map((e) => ({
      pairId: e.pair_id,
      source: e.p_i,
      target: e.p_j,
      total: e.total,
      status: e.status,
      color: statusColor(e.status),
      width: 1 + 5 * e.total,
    }));
  const ids = graph.nodes.map((n) => n.id);
  const pos = layoutGraph(ids, edges, { ...opts, width, height });
  return {
    nodes: graph.nodes.map((n) => ({
      id: n.id,
      name: n.full_name,
      x: pos.get(n.id)!.x,
      y: pos.get(n.id)!.y,
    })),
    edges,
    width,
    height,
  };
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export function renderGraphSvg(view: GraphView): string {
  const byId = new Map(view.nodes.map((n) => [n.id, n]));
  const edges = view.edges
    .map((e) => {
      const a = byId.get(e.source)!;
      const b = byId.get(e.target)!;
      return (
        `<line class="edge" data-pair-id="${esc(e.pairId)}" x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}"` +
        ` x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}" stroke="${e.color}"` +
        ` stroke-width="${e.width.toFixed(2)}" opacity="0.75"><title>${esc(e.pairId)}</title></line>`
      );
    })
    .join("");
  const nodes = view.nodes
    .map(
      (n) =>
        `<g class="node" data-person="${esc(n.id)}"><circle cx="${n.x.toFixed(1)}" cy="${n.y.toFixed(1)}" r="9" fill="#456"/>` +
        `<text x="${n.x.toFixed(1)}" y="${(n.y - 12).toFixed(1)}" text-anchor="middle">${esc(n.name)}</text></g>`,
    )
    .join("");
  return `<svg class="graph" viewBox="0 0 ${view.width} ${view.height}" xmlns="http://www.w3.org/2000/svg">${edges}${nodes}</svg>`;
}
