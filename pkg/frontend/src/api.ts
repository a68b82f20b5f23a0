// Typed client for the itergain session API. Every response is an
// envelope {ok, payload | error, engine_version}; a non-ok envelope
// becomes an ApiError carrying the engine's error code verbatim.

export interface Envelope<T> {
  ok: boolean;
  engine_version: string;
  payload?: T;
  error?: { code: string; message: string };
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface SessionInfo {
  session_id: string;
  base: string;
}

export interface ColumnInfo {
  name: string;
  kind: string;
  missing: number;
}

export interface DatasetInfo {
  dataset_id: string;
  n_rows: number;
  columns: ColumnInfo[];
}

export interface ToolInfo {
  tool_id: string;
  description: string;
  output_kind: string;
  params: string[];
  default_space: string;
}

export interface PlanResult {
  tool_id: string;
  space: string;
  expected_set: string;
  anomaly_set: string;
  p: number;
  h: number;
  m: number;
  base: string;
}

export interface IterationResult {
  t: number;
  observed: number | string;
  verdict: string;
  g: number;
  h: number;
  m: number;
  s_g: number;
  s_h: number;
  divergence: number;
}

export interface SummaryRow {
  t: number;
  tool_id: string;
  expected_set: string;
  p_hat: number;
  observed: number | string;
  verdict: string;
  g: number;
  h: number;
  m: number;
  s_g_after: number;
  s_h_after: number;
}

export interface SessionSummary {
  session_id: string;
  base: string;
  t: number;
  s_g: number;
  s_h: number;
  divergence: number;
  n_violations: number;
  records: SummaryRow[];
}

export interface Candidate {
  tool: string;
  params: Record<string, unknown>;
  expect: string;
  p: number;
}

export interface RankedEntry {
  j: number;
  score: number;
  tool: string;
  expect: string;
  p: number;
}

export interface Ranking {
  criterion: string;
  ordered: RankedEntry[];
  chosen: number;
}

export interface PlanRequest {
  tool: string;
  params: Record<string, unknown>;
  expect: string;
  p: number;
  dataset_id?: string;
  note?: string;
}

export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    let body: Envelope<T>;
    try {
      body = (await response.json()) as Envelope<T>;
    } catch {
      throw new ApiError("BadResponse", `non-JSON response from ${path}`, response.status);
    }
    if (!body.ok || body.payload === undefined) {
      const error = body.error ?? { code: "UnknownError", message: "no error detail" };
      throw new ApiError(error.code, error.message, response.status);
    }
    return body.payload;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  createSession(base = "bits"): Promise<SessionInfo> {
    return this.post<SessionInfo>("/sessions", { base });
  }

  summary(sessionId: string): Promise<SessionSummary> {
    return this.request<SessionSummary>(`/sessions/${sessionId}/summary`);
  }

  tools(): Promise<{ tools: ToolInfo[] }> {
    return this.request<{ tools: ToolInfo[] }>("/tools");
  }

  plan(sessionId: string, body: PlanRequest): Promise<PlanResult> {
    return this.post<PlanResult>(`/sessions/${sessionId}/plan`, body);
  }

  runIteration(sessionId: string, body: PlanRequest): Promise<IterationResult> {
    return this.post<IterationResult>(`/sessions/${sessionId}/iterations`, body);
  }

  rank(sessionId: string, criterion: string, candidates: Candidate[]): Promise<Ranking> {
    return this.post<Ranking>(`/sessions/${sessionId}/rank`, { criterion, candidates });
  }

  async uploadDataset(file: Blob, name: string): Promise<DatasetInfo> {
    const form = new FormData();
    form.append("file", file, name);
    return this.request<DatasetInfo>("/datasets", { method: "POST", body: form });
  }
}
