import type { Factor, Status } from "./colors.js";

export interface ProjectSummary {
  id: string;
  people: number;
  assignments: string[];
  documents: number;
}

export interface PairAssessment {
  pair_id: string;
  p_i: string;
  p_j: string;
  p_i_name: string;
  p_j_name: string;
  assignment: string;
  cs: number;
  sn: number;
  se: number;
  se_hits: number;
  total: number;
  status: Status;
  decided_at: string | null;
  revision: number;
}

export interface PairsResponse {
  assignment: string;
  sort: string;
  pairs: PairAssessment[];
}

export interface MatchedSpan {
  span_i: [number, number];
  span_j: [number, number];
  excerpt_i: string;
  excerpt_j: string;
}

export interface DirectedSimilarity {
  doc_i: string;
  doc_j: string;
  s: number;
  matched_spans: MatchedSpan[];
}

export interface SocialActionView {
  network: string;
  activity: string;
  support_kind: string | null;
  source: string;
  target: string;
  weight: number;
}

export interface SearchEvidenceView {
  keywords: string[];
  hits: number;
  se_norm: number;
}

export interface PairDetailResponse extends PairAssessment {
  directed: DirectedSimilarity[];
  actions: SocialActionView[];
  search: SearchEvidenceView | null;
}

export interface ClustersResponse {
  factor: Factor;
  min: number;
  max: number;
  means: Record<Status, number | null>;
  colors: Record<Status, string>;
}

export interface GraphResponse {
  nodes: { id: string; full_name: string }[];
  edges: PairAssessment[];
}

export interface MatrixCell extends PairAssessment {
  row: number;
  col: number;
}

export interface MatrixResponse {
  people: string[];
  assignments: string[];
  cells: MatrixCell[];
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** Thin typed client; the UI never computes scores, it only fetches them. */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchLike: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchLike(this.base + path);
    if (!resp.ok) throw new ApiError(resp.status, await safeDetail(resp));
    return (await resp.json()) as T;
  }

  listProjects(): Promise<ProjectSummary[]> {
    return this.get("/api/projects");
  }

  getPairs(project: string, assignment: string, sort: Factor = "total"): Promise<PairsResponse> {
    return this.get(
      `/api/projects/${enc(project)}/assignments/${enc(assignment)}/pairs?sort=${sort}`,
    );
  }

  getPair(project: string, pairId: string): Promise<PairDetailResponse> {
    return this.get(`/api/projects/${enc(project)}/pairs/${enc(pairId)}`);
  }

  getClusters(project: string, assignment: string, factor: Factor): Promise<ClustersResponse> {
    return this.get(
      `/api/projects/${enc(project)}/assignments/${enc(assignment)}/clusters?factor=${factor}`,
    );
  }

  getGraph(project: string): Promise<GraphResponse> {
    return this.get(`/api/projects/${enc(project)}/graph`);
  }

  getMatrix(project: string): Promise<MatrixResponse> {
    return this.get(`/api/projects/${enc(project)}/matrix`);
  }

  /** The one mutation the UI performs; carries the last-seen revision. */
  async putStatus(
    project: string,
    pairId: string,
    status: Status,
    revision: number,
    actor = "ui",
  ): Promise<{ status: Status; revision: number }> {
    const resp = await this.fetchLike(
      `${this.base}/api/projects/${enc(project)}/pairs/${enc(pairId)}/status`,
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ status, revision, actor }),
      },
    );
    if (!resp.ok) throw new ApiError(resp.status, await safeDetail(resp));
    return (await resp.json()) as { status: Status; revision: number };
  }
}

function enc(part: string): string {
  return encodeURIComponent(part);
}

async function safeDetail(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: string };
    return body.detail ?? resp.statusText;
  } catch {
    return resp.statusText;
  }
}
