import { ApiClient, ApiError, type PairDetailResponse } from "./api.js";
import { statusColor, type Status } from "./colors.js";

export interface PairDetailView {
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
  directed: {
    docI: string;
    docJ: string;
    s: number;
    spans: { excerptI: string; excerptJ: string }[];
  }[];
  actions: { network: string; label: string; source: string; target: string; weight: number }[];
  search: { keywords: string[]; hits: number; seNorm: number } | null;
}

export function buildPairDetail(detail: PairDetailResponse): PairDetailView {
  return {
    pairId: detail.pair_id,
    names: [detail.p_i_name, detail.p_j_name],
    assignment: detail.assignment,
    cs: detail.cs,
    sn: detail.sn,
    se: detail.se,
    seHits: detail.se_hits,
    total: detail.total,
    status: detail.status,
    statusColor: statusColor(detail.status),
    revision: detail.revision,
    directed: detail.directed.map((d) => ({
      docI: d.doc_i,
      docJ: d.doc_j,
      s: d.s,
      spans: d.matched_spans.map((m) => ({ excerptI: m.excerpt_i, excerptJ: m.excerpt_j })),
    })),
    actions: detail.actions.map((a) => ({
      network: a.network,
      label: a.support_kind ? `${a.activity} (${a.support_kind})` : a.activity,
      source: a.source,
      target: a.target,
      weight: a.weight,
    })),
    search: detail.search
      ? { keywords: detail.search.keywords, hits: detail.search.hits, seNorm: detail.search.se_norm }
      : null,
  };
}

export type StatusOutcome =
  | { kind: "ok"; status: Status; revision: number }
  | { kind: "conflict"; message: string };

/**
 * Issue the single status PUT for a decision, carrying the revision the view
 * was rendered from. A 409 means someone decided first: the caller should
 * refetch and offer a retry, never resubmit blindly.
 */
export async function submitStatus(
  client: ApiClient,
  project: string,
  view: { pairId: string; revision: number },
  status: Status,
  actor = "ui",
): Promise<StatusOutcome> {
  try {
    const result = await client.putStatus(project, view.pairId, status, view.revision, actor);
    return { kind: "ok", status: result.status, revision: result.revision };
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      return { kind: "conflict", message: err.detail };
    }
    throw err;
  }
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export function renderPairDetail(v: PairDetailView): string {
  const directed = v.directed
    .map(
      (d) => `
  <section class="direction">
    <h4>${esc(d.docI)} &rarr; ${esc(d.docJ)}: <span data-value="${d.s}">${d.s.toFixed(3)}</span></h4>
    <div class="spans">${d.spans
      .slice(0, 10)
      .map(
        (sp) =>
          `<div class="span-pair"><pre>${esc(sp.excerptI)}</pre><pre>${esc(sp.excerptJ)}</pre></div>`,
      )
      .join("")}</div>
  </section>`,
    )
    .join("");
  const actions = v.actions.length
    ? `<ul class="actions">${v.actions
        .map(
          (a) =>
            `<li>[${esc(a.network)}] ${esc(a.source)} &rarr; ${esc(a.target)}: ${esc(a.label)}` +
            ` (weight ${a.weight})</li>`,
        )
        .join("")}</ul>`
    : `<p class="empty">No social actions between this pair.</p>`;
  const search = v.search
    ? `<p>keywords: <code>${esc(v.search.keywords.join(" "))}</code>; hits: ` +
      `<span data-value="${v.search.hits}">${v.search.hits}</span></p>`
    : `<p class="empty">No search evidence.</p>`;
  return `<article class="pair-detail" data-pair-id="${esc(v.pairId)}" data-revision="${v.revision}">
  <h2>${esc(v.names[0])} &harr; ${esc(v.names[1])} <small>(${esc(v.assignment)})</small></h2>
  <p>status: <span class="status" style="color:${v.statusColor}">${v.status}</span>
     &middot; total <span data-value="${v.total}">${v.total.toFixed(3)}</span>
     &middot; cs <span data-value="${v.cs}">${v.cs.toFixed(3)}</span>
     &middot; sn <span data-value="${v.sn}">${v.sn.toFixed(3)}</span>
     &middot; se <span data-value="${v.se}">${v.se.toFixed(3)}</span></p>
  <p class="controls">
    <button data-action="confirmed">confirm</button>
    <button data-action="rejected">reject</button>
    <button data-action="not_checked">reset</button>
  </p>
  <h3>Directed similarity</h3>${directed || '<p class="empty">No similarity records.</p>'}
  <h3>Social actions</h3>${actions}
  <h3>Search evidence</h3>${search}
</article>`;
}
