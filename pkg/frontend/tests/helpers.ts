// A fetch-level fake of the session API, faithful to the envelope
// protocol and loaded with the engine's exact double-precision values
// for the golden declarations used in tests.

export const ENGINE = {
  h99: 0.08079313589591124,
  m99: 6.6438561897747235,
  g99: 0.014499569695115089,
  h95: 0.2863969571159563,
  m95: 4.321928094887361,
};

interface FakeRecord {
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

export class FakeApiServer {
  sessions = new Map<string, { base: string; records: FakeRecord[] }>();
  datasets = new Map<string, { n_rows: number }>();
  nextSession = 1;
  nextDataset = 1;
  calls: string[] = [];

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const method = (init?.method ?? "GET").toUpperCase();
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    this.calls.push(`${method} ${path}`);
    const body = typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    try {
      return ok(this.route(method, path, body, init));
    } catch (err) {
      const e = err as { code?: string; message?: string; status?: number };
      return fail(e.code ?? "UnknownError", e.message ?? String(err), e.status ?? 400);
    }
  };

  private route(method: string, path: string, body: any, init?: RequestInit): unknown {
    if (method === "GET" && path === "/tools") {
      return {
        tools: [
          {
            tool_id: "row_count",
            description: "number of rows in the dataset",
            output_kind: "integer",
            params: [],
            default_space: "int[0,inf)",
          },
          {
            tool_id: "correlation_sign",
            description: "sign of the Pearson correlation of two numeric columns",
            output_kind: "integer",
            params: ["col_a", "col_b"],
            default_space: "{-1,0,1}",
          },
        ],
      };
    }
    if (method === "POST" && path === "/sessions") {
      const id = `fake${this.nextSession++}`;
      this.sessions.set(id, { base: body?.base ?? "bits", records: [] });
      return { session_id: id, base: body?.base ?? "bits" };
    }
    if (method === "POST" && path === "/datasets") {
      if (!(init?.body instanceof FormData)) {
        throw { code: "IngestError", message: "expected multipart upload", status: 400 };
      }
      const id = `data${this.nextDataset++}`;
      this.datasets.set(id, { n_rows: 1000 });
      return {
        dataset_id: id,
        n_rows: 1000,
        columns: [
          { name: "id", kind: "integer", missing: 0 },
          { name: "value", kind: "integer", missing: 0 },
        ],
      };
    }

    const planMatch = path.match(/^\/sessions\/([^/]+)\/plan$/);
    if (method === "POST" && planMatch) {
      this.requireSession(planMatch[1]);
      return this.planPayload(body);
    }

    const iterMatch = path.match(/^\/sessions\/([^/]+)\/iterations$/);
    if (method === "POST" && iterMatch) {
      const session = this.requireSession(iterMatch[1]);
      const plan = this.planPayload(body);
      if (!body.dataset_id || !this.datasets.has(body.dataset_id)) {
        throw { code: "ParamError", message: "an iteration needs a dataset_id", status: 400 };
      }
      const observed = 1000;
      const verdict = body.expect === "{1000}" ? "AsExpected" : "Unexpected";
      const g = verdict === "AsExpected" ? ENGINE.g99 : ENGINE.m99;
      const prev = session.records[session.records.length - 1];
      const record: FakeRecord = {
        t: session.records.length + 1,
        tool_id: body.tool,
        expected_set: body.expect,
        p_hat: body.p,
        observed,
        verdict,
        g,
        h: plan.h,
        m: plan.m,
        s_g_after: (prev?.s_g_after ?? 0) + g,
        s_h_after: (prev?.s_h_after ?? 0) + plan.h,
      };
      session.records.push(record);
      return {
        t: record.t,
        observed,
        verdict,
        g,
        h: plan.h,
        m: plan.m,
        s_g: record.s_g_after,
        s_h: record.s_h_after,
        divergence: record.s_g_after - record.s_h_after,
      };
    }

    const summaryMatch = path.match(/^\/sessions\/([^/]+)\/summary$/);
    if (method === "GET" && summaryMatch) {
      const session = this.requireSession(summaryMatch[1]);
      const last = session.records[session.records.length - 1];
      return {
        session_id: summaryMatch[1],
        base: session.base,
        t: session.records.length,
        s_g: last?.s_g_after ?? 0,
        s_h: last?.s_h_after ?? 0,
        divergence: (last?.s_g_after ?? 0) - (last?.s_h_after ?? 0),
        n_violations: 0,
        records: session.records,
      };
    }

    const rankMatch = path.match(/^\/sessions\/([^/]+)\/rank$/);
    if (method === "POST" && rankMatch) {
      this.requireSession(rankMatch[1]);
      const candidates: Array<{ tool: string; expect: string; p: number }> =
        body.candidates;
      const score = (p: number) =>
        body.criterion === "anomaly" ? p : 1 - p;
      const ordered = candidates
        .map((c, j) => ({ j, score: score(c.p), tool: c.tool, expect: c.expect, p: c.p }))
        .sort((a, b) => b.score - a.score);
      return { criterion: body.criterion, ordered, chosen: ordered[0].j };
    }

    throw { code: "NotFound", message: `no route ${method} ${path}`, status: 404 };
  }

  private requireSession(id: string) {
    const session = this.sessions.get(id);
    if (!session) {
      throw { code: "SessionNotFound", message: `no session ${id}`, status: 404 };
    }
    return session;
  }

  private planPayload(body: any): { h: number; m: number } & Record<string, unknown> {
    if (typeof body?.p !== "number" || !(body.p > 0.5 && body.p < 1)) {
      throw {
        code: "InvalidAssessment",
        message: `p_expected must lie strictly between 0.5 and 1, got ${body?.p}`,
        status: 400,
      };
    }
    if (!body.expect || body.expect === "int[0,inf)") {
      throw {
        code: "InvalidExpectedSet",
        message: "expected set must be a strict subset of the outcome set",
        status: 400,
      };
    }
    const h = body.p === 0.99 ? ENGINE.h99 : ENGINE.h95;
    const m = body.p === 0.99 ? ENGINE.m99 : ENGINE.m95;
    return {
      tool_id: body.tool,
      space: body.tool === "row_count" ? "int[0,inf)" : "{-1,0,1}",
      expected_set: body.expect,
      anomaly_set: "union(int[0,999], int[1001,inf))",
      p: body.p,
      h,
      m,
      base: "bits",
    };
  }
}

function ok(payload: unknown): Response {
  return makeResponse(200, { ok: true, engine_version: "test", payload });
}

function fail(code: string, message: string, status: number): Response {
  return makeResponse(status, {
    ok: false,
    engine_version: "test",
    error: { code, message },
  });
}

function makeResponse(status: number, body: unknown): Response {
  return {
    status,
    json: async () => body,
  } as unknown as Response;
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
