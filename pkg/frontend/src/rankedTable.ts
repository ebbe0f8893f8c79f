import type { ClustersResponse, PairAssessment, PairsResponse } from "./api.js";
import { FACTORS, statusColor, type Factor, type Status } from "./colors.js";

export interface ClusterMarker {
  status: Status;
  color: string;
  value: number;
  percent: number; // position inside the [min, max] interval, 0..100
}

export interface IntervalBar {
  factor: Factor;
  min: number;
  max: number;
  value: number;
  valuePercent: number;
  markers: ClusterMarker[];
}

export interface PairRowView {
  pairId: string;
  names: [string, string];
  assignment: string;
  cs: number;
  sn: number;
  se: number;
  seHits: number;
  total: number;
  status: Status;
  statusColor: string;
  revision: number;
  bars: IntervalBar[];
}

function percentWithin(value: number, min: number, max: number): number {
  if (max <= min) return 50;
  return (100 * (value - min)) / (max - min);
}

function bar(factor: Factor, value: number, clusters: ClustersResponse): IntervalBar {
  const markers: ClusterMarker[] = [];
  for (const status of Object.keys(clusters.means) as Status[]) {
    const mean = clusters.means[status];
    if (mean === null || mean === undefined) continue;
    markers.push({
      status,
      color: clusters.colors[status],
      value: mean,
      percent: percentWithin(mean, clusters.min, clusters.max),
    });
  }
  return {
    factor,
    min: clusters.min,
    max: clusters.max,
    value,
    valuePercent: percentWithin(value, clusters.min, clusters.max),
    markers,
  };
}

/**
 * Rows in exactly the order the API returned them (the server owns ranking;
 * the client never re-sorts), each carrying per-factor interval bar data.
 */
export function buildRankedTable(
  pairs: PairsResponse,
  clustersByFactor: Partial<Record<Factor, ClustersResponse>>,
): PairRowView[] {
  return pairs.pairs.map((p: PairAssessment) => ({
    pairId: p.pair_id,
    names: [p.p_i_name, p.p_j_name],
    assignment: p.assignment,
    cs: p.cs,
    sn: p.sn,
    se: p.se,
    seHits: p.se_hits,
    total: p.total,
    status: p.status,
    statusColor: statusColor(p.status),
    revision: p.revision,
    bars: FACTORS.flatMap((factor) => {
      const clusters = clustersByFactor[factor];
      return clusters ? [bar(factor, p[factor], clusters)] : [];
    }),
  }));
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

function renderBar(b: IntervalBar): string {
  const markers = b.markers
    .map(
      (m) =>
        `<span class="marker" title="${m.status} mean ${m.value.toFixed(3)}"` +
        ` style="left:${m.percent.toFixed(1)}%;background:${m.color}"></span>`,
    )
    .join("");
  return (
    `<div class="bar" data-factor="${b.factor}" data-min="${b.min}" data-max="${b.max}">` +
    `<span class="value" style="left:${b.valuePercent.toFixed(1)}%"></span>${markers}</div>`
  );
}

export function renderRankedTable(rows: PairRowView[]): string {
  if (rows.length === 0) {
    return `<p class="empty">No pairs with any evidence for this assignment.</p>`;
  }
  const barFor = (r: PairRowView, factor: Factor) => {
    const b = r.bars.find((x) => x.factor === factor);
    return b ? renderBar(b) : "";
  };
  const body = rows
    .map(
      (r) => `
  <tr class="pair-row" data-pair-id="${esc(r.pairId)}">
    <td>${esc(r.names[0])} &harr; ${esc(r.names[1])}</td>
    <td class="num" data-value="${r.cs}">${r.cs.toFixed(3)}${barFor(r, "cs")}</td>
    <td class="num" data-value="${r.sn}">${r.sn.toFixed(3)}${barFor(r, "sn")}</td>
    <td class="num" data-value="${r.se}">${r.se.toFixed(3)}${barFor(r, "se")}</td>
    <td class="num" data-value="${r.total}"><strong>${r.total.toFixed(3)}</strong>${barFor(r, "total")}</td>
    <td><span class="status" style="color:${r.statusColor}">${r.status}</span></td>
  </tr>`,
    )
    .join("");
  return `<table class="ranked">
  <thead><tr><th>pair</th><th>cs</th><th>sn</th><th>se</th><th>total</th><th>status</th></tr></thead>
  <tbody>${body}</tbody>
</table>`;
}
