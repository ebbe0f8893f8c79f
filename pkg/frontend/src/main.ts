import { ApiClient, type ClustersResponse } from "./api.js";
import { FACTORS, type Factor, type Status } from "./colors.js";
import { buildGraphView, renderGraphSvg } from "./graph.js";
import { buildMatrixView, renderMatrixSvg } from "./matrix.js";
import { buildPairDetail, renderPairDetail, submitStatus } from "./pairDetail.js";
import { buildRankedTable, renderRankedTable } from "./rankedTable.js";

const client = new ApiClient("");
const app = () => document.getElementById("app")!;

interface Route {
  project?: string;
  assignment?: string;
  pair?: string;
  view: "projects" | "pairs" | "pair" | "explore";
}

function parseRoute(): Route {
  const hash = window.location.hash.replace(/^#\/?/, "");
  const parts = hash.split("/").filter(Boolean);
  if (parts[0] === "p" && parts.length >= 2) {
    if (parts[2] === "pair" && parts[3]) {
      return { view: "pair", project: parts[1], pair: decodeURIComponent(parts[3]) };
    }
    if (parts[2] === "explore") {
      return { view: "explore", project: parts[1], assignment: parts[3] };
    }
    if (parts[2]) {
      return { view: "pairs", project: parts[1], assignment: parts[2] };
    }
  }
  return { view: "projects" };
}

function errorBox(message: string, retry: () => void): void {
  const box = document.createElement("div");
  box.className = "error-box";
  box.innerHTML = `<p>${message}</p>`;
  const button = document.createElement("button");
  button.textContent = "retry";
  button.onclick = () => {
    box.remove();
    retry();
  };
  box.appendChild(button);
  app().prepend(box); // non-blocking: existing content stays interactive
}

async function showProjects(): Promise<void> {
  const projects = await client.listProjects();
  const items = projects
    .map((p) =>
      p.assignments
        .map((a) => `<li><a href="#/p/${p.id}/${a}">${p.id} / ${a}</a></li>`)
        .join(""),
    )
    .join("");
  app().innerHTML = `<h1>Projects</h1><ul>${items || "<li>No projects in the store.</li>"}</ul>`;
}

async function showPairs(project: string, assignment: string): Promise<void> {
  const [pairs, ...clusterList] = await Promise.all([
    client.getPairs(project, assignment),
    ...FACTORS.map((f) => client.getClusters(project, assignment, f).catch(() => null)),
  ]);
  const clusters: Partial<Record<Factor, ClustersResponse>> = {};
  clusterList.forEach((c) => {
    if (c) clusters[c.factor] = c;
  });
  const rows = buildRankedTable(pairs, clusters);
  app().innerHTML =
    `<h1>${project} / ${assignment}</h1>` +
    `<p><a href="#/">projects</a> &middot; <a href="#/p/${project}/${assignment}/explore">graph &amp; matrix</a></p>` +
    renderRankedTable(rows);
  for (const tr of app().querySelectorAll<HTMLElement>(".pair-row")) {
    tr.onclick = () => {
      window.location.hash = `#/p/${project}/pair/${encodeURIComponent(tr.dataset.pairId!)}`;
    };
  }
}

async function showPair(project: string, pairId: string): Promise<void> {
  const detail = await client.getPair(project, pairId);
  const view = buildPairDetail(detail);
  app().innerHTML =
    `<p><a href="#/p/${project}/${detail.assignment}">back to queue</a></p>` + renderPairDetail(view);
  for (const button of app().querySelectorAll<HTMLButtonElement>("[data-action]")) {
    button.onclick = async () => {
      const outcome = await submitStatus(client, project, view, button.dataset.action as Status);
      if (outcome.kind === "conflict") {
        errorBox(`Decision conflict: ${outcome.message}. Reloaded the latest state; retry if still right.`, () => render());
        await showPair(project, pairId); // refresh-and-retry prompt
      } else {
        await showPair(project, pairId);
      }
    };
  }
}

async function showExplore(project: string, assignment?: string): Promise<void> {
  const [graph, matrix] = await Promise.all([client.getGraph(project), client.getMatrix(project)]);
  let factor: Factor = "total";
  const draw = () => {
    const gview = buildGraphView(graph, assignment, { seed: 42 });
    const mview = buildMatrixView(matrix, factor, assignment);
    const options = FACTORS.map(
      (f) => `<option value="${f}"${f === factor ? " selected" : ""}>${f}</option>`,
    ).join("");
    app().innerHTML =
      `<h1>${project}${assignment ? " / " + assignment : ""}: exploration</h1>` +
      `<p><a href="#/">projects</a>${assignment ? ` &middot; <a href="#/p/${project}/${assignment}">queue</a>` : ""}` +
      ` &middot; factor <select id="factor">${options}</select></p>` +
      `<div class="explore">${renderGraphSvg(gview)}${renderMatrixSvg(mview)}</div>`;
    (document.getElementById("factor") as HTMLSelectElement).onchange = (ev) => {
      factor = (ev.target as HTMLSelectElement).value as Factor;
      draw(); // cell intensities change; the seeded graph layout does not
    };
    wireLinkedHighlight(project);
  };
  draw();
}

function wireLinkedHighlight(project: string): void {
  const all = app().querySelectorAll<SVGElement>("[data-pair-id]");
  for (const el of all) {
    const pid = el.dataset ? (el as unknown as HTMLElement).dataset.pairId : undefined;
    if (!pid) continue;
    el.addEventListener("mouseenter", () => {
      for (const other of app().querySelectorAll(`[data-pair-id="${CSS.escape(pid)}"]`)) {
        other.classList.add("hot");
      }
    });
    el.addEventListener("mouseleave", () => {
      for (const other of app().querySelectorAll(".hot")) {
        other.classList.remove("hot");
      }
    });
    el.addEventListener("click", () => {
      window.location.hash = `#/p/${project}/pair/${encodeURIComponent(pid)}`;
    });
  }
}

function render(): void {
  const route = parseRoute();
  const go = async () => {
    if (route.view === "pairs") await showPairs(route.project!, route.assignment!);
    else if (route.view === "pair") await showPair(route.project!, route.pair!);
    else if (route.view === "explore") await showExplore(route.project!, route.assignment);
    else await showProjects();
  };
  go().catch((err) => errorBox(String(err), render));
}

window.addEventListener("hashchange", render);
window.addEventListener("DOMContentLoaded", render);
