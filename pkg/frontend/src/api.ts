/** Typed client for the project service. Every number shown anywhere
 * in the UI comes out of one of these response shapes. */

export interface Phenomenon {
  id: number;
  description: string;
}

export interface RelationDef {
  name: string;
  attributes: string[];
  keys: string[][];
  origin: string;
}

export interface Hypothesis {
  id: number;
  name: string;
  targets: number[];
  relations: RelationDef[];
  folded: unknown;
  primitive?: unknown;
  warnings: string[];
}

export interface Stage {
  phi: number;
  upsilon: number;
  stage: string;
}

export interface Catalog {
  phenomena: Phenomenon[];
  hypotheses: Hypothesis[];
  h0: [number, number][];
  stages: Stage[];
  urelations: string[];
}

export interface ReportRow {
  phi: number;
  upsilon: number;
  tid: number;
  index: number;
  predicted: number;
  prior: number;
  posterior: number;
}

export interface PosteriorReport {
  phenomenon: number;
  names: { index: string; value: string };
  at: number;
  sigma: number;
  rows: ReportRow[];
  aggregates: { upsilon: number; posterior: number }[];
}

export interface PredictionWorld {
  upsilon: number;
  tid: number;
  prior: number;
  index?: string;
  series: Record<string, [number, number][]>;
}

export interface Predictions {
  phenomenon: number;
  worlds: PredictionWorld[];
}

export interface WorldTable {
  variables: {
    id: string;
    kind: string;
    phenomenon: number;
    hypothesis: number | null;
    members: string[];
    alternatives: unknown[];
  }[];
  marginals: { var: string; val: number; prob: number }[];
}

export interface CertainRelation {
  name: string;
  kind: "certain";
  attributes: string[];
  keys: string[][];
  rows: Record<string, unknown>[];
}

export interface UncertainRelation {
  name: string;
  kind: "uncertain";
  columns: string[];
  tuples: { condition: [string, number][]; data: Record<string, unknown> }[];
}

export type Relation = CertainRelation | UncertainRelation;

export interface ConditionRequest {
  phi: number;
  samples: [number, number][];
  sigma?: number;
  at?: number;
  writeBack: boolean;
}

/** A domain error from the service, straight off its {code, detail} body. */
export class ApiError extends Error {
  constructor(
    readonly code: string,
    readonly detail: string,
    readonly status: number,
  ) {
    super(`${code}: ${detail}`);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return response.json() as Promise<T>;
  }
  let code = `HTTP ${response.status}`;
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (typeof body.code === "string") code = body.code;
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body, keep the status line
  }
  throw new ApiError(code, detail, response.status);
}

export class Api {
  constructor(private readonly base = "") {}

  catalog(): Promise<Catalog> {
    return this.get("/catalog");
  }

  worldTable(): Promise<WorldTable> {
    return this.get("/world-table");
  }

  relation(name: string, filters: string[] = []): Promise<Relation> {
    const query = filters.length
      ? "?" + filters.map((f) => "filter=" + encodeURIComponent(f)).join("&")
      : "";
    return this.get(`/relations/${encodeURIComponent(name)}${query}`);
  }

  predictions(phi: number): Promise<Predictions> {
    return this.get(`/predictions?phi=${phi}`);
  }

  addPhenomenon(descriptor: Blob): Promise<Phenomenon> {
    return fetch(this.base + "/phenomena", {
      method: "POST",
      body: descriptor,
    }).then((r) => unwrap(r));
  }

  addHypothesis(descriptor: File, phis: number[]): Promise<Hypothesis> {
    const form = new FormData();
    form.append("descriptor", descriptor);
    for (const phi of phis) form.append("phi", String(phi));
    return fetch(this.base + "/hypotheses", { method: "POST", body: form })
      .then((r) => unwrap(r));
  }

  loadTrial(phi: number, upsilon: number, file: File): Promise<{ tid: number }> {
    const form = new FormData();
    form.append("phi", String(phi));
    form.append("upsilon", String(upsilon));
    form.append("file", file);
    return fetch(this.base + "/trials", { method: "POST", body: form })
      .then((r) => unwrap(r));
  }

  uIntro(phi: number): Promise<unknown> {
    return fetch(this.base + "/u-intro", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ phi }),
    }).then((r) => unwrap(r));
  }

  condition(
    request: ConditionRequest,
    signal?: AbortSignal,
  ): Promise<PosteriorReport> {
    return fetch(this.base + "/condition", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
      signal,
    }).then((r) => unwrap(r));
  }

  private get<T>(path: string): Promise<T> {
    return fetch(this.base + path).then((r) => unwrap<T>(r));
  }
}
