// The analyst console: one declare-execute-review loop per screen.
//
// The console is a thin client. It performs no gain arithmetic and no
// set algebra of its own: expected sets and probabilities go to the API
// for validation, and every number on screen (H, M, G, S_G, S_H,
// divergence, scores) is an API value run through fmtGain. Engine error
// codes are surfaced verbatim next to the fields that caused them.

import {
  ApiClient,
  ApiError,
  Candidate,
  DatasetInfo,
  PlanRequest,
  PlanResult,
  Ranking,
  SessionInfo,
  SessionSummary,
  ToolInfo,
} from "./api.js";
import { renderCumulativeChart } from "./chart.js";
import { fmtGain, fmtObserved, verdictClass } from "./format.js";

const SESSION_KEY = "itergain.session";
const DATASET_KEY = "itergain.dataset";

const NUMERIC_PARAMS = new Set(["low", "high", "tau"]);

function el<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const found = root.querySelector(selector);
  if (!found) {
    throw new Error(`console template is missing ${selector}`);
  }
  return found as T;
}

export class AnalystConsole {
  session: SessionInfo | null = null;
  dataset: DatasetInfo | null = null;
  tools: ToolInfo[] = [];
  candidates: Candidate[] = [];
  lastPlan: PlanResult | null = null;

  private planTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private storage: Storage = window.sessionStorage,
  ) {}

  async init(): Promise<void> {
    this.renderSkeleton();
    this.tools = (await this.api.tools()).tools;
    this.renderToolOptions();

    const storedSession = this.storage.getItem(SESSION_KEY);
    const storedDataset = this.storage.getItem(DATASET_KEY);
    if (storedDataset) {
      this.dataset = JSON.parse(storedDataset) as DatasetInfo;
      this.renderDatasetInfo();
    }
    if (storedSession) {
      this.session = JSON.parse(storedSession) as SessionInfo;
      this.renderSessionLabel();
      try {
        await this.refreshSummary();
      } catch {
        // A stale id (e.g. wiped store) should not brick the console.
        this.session = null;
        this.storage.removeItem(SESSION_KEY);
        this.renderSessionLabel();
      }
    }
  }

  // ----- DOM scaffolding ---------------------------------------------------

  private renderSkeleton(): void {
    this.root.innerHTML = `
      <header class="bar">
        <h1>itergain console</h1>
        <span id="session-label" class="session-label">no session</span>
        <button id="new-session" type="button">New session</button>
      </header>

      <section class="card" id="dataset-card">
        <h2>Dataset</h2>
        <label>CSV file
          <input id="file-input" type="file" accept=".csv,text/csv">
        </label>
        <p id="dataset-info" class="muted">no dataset uploaded</p>
        <p id="dataset-error" class="error" role="alert"></p>
      </section>

      <section class="card" id="declare-card">
        <h2>Declare &amp; plan</h2>
        <div class="field-row">
          <label>Tool
            <select id="tool-select"></select>
          </label>
          <span id="param-fields"></span>
        </div>
        <div class="field-row">
          <label>Expected set
            <input id="expect-input" type="text" placeholder="{1000}" autocomplete="off">
          </label>
          <label>P(in expected set)
            <input id="p-input" type="number" step="0.01" min="0" max="1" placeholder="0.99">
          </label>
          <label>Note
            <input id="note-input" type="text" placeholder="why you expect this">
          </label>
        </div>
        <p class="muted">space: <span id="plan-space">-</span>
           &nbsp; expected: <span id="plan-expected">-</span>
           &nbsp; anomaly: <span id="plan-anomaly">-</span></p>
        <p class="plan-readout">expected gain H = <strong id="plan-h">-</strong>
           &nbsp; anomaly gain M = <strong id="plan-m">-</strong></p>
        <p id="plan-error" class="error" role="alert"></p>
        <div class="field-row">
          <button id="execute-btn" type="button" disabled>Execute iteration</button>
          <button id="add-candidate" type="button" disabled>Add as candidate</button>
        </div>
      </section>

      <section class="card" id="review-card">
        <h2>Review</h2>
        <div id="verdict-banner" class="banner banner-idle" role="status">no iteration yet</div>
        <p class="readouts">
          S_G = <strong id="sg-readout">0.0000</strong>
          &nbsp; S_H = <strong id="sh-readout">0.0000</strong>
          &nbsp; divergence = <strong id="div-readout">0.0000</strong>
        </p>
        <div id="chart-holder"></div>
        <table class="timeline">
          <thead>
            <tr><th>t</th><th>tool</th><th>expected</th><th>p</th>
                <th>observed</th><th>verdict</th><th>G</th></tr>
          </thead>
          <tbody id="timeline-body"></tbody>
        </table>
      </section>

      <section class="card" id="rank-card">
        <h2>Candidates for the next step</h2>
        <ul id="candidates-list" class="candidates"></ul>
        <button id="rank-refresh" type="button" disabled>Rank candidates</button>
        <div class="rank-panels">
          <div>
            <h3>by expected gain</h3>
            <ol id="rank-expected"></ol>
          </div>
          <div>
            <h3>by anomaly gain</h3>
            <ol id="rank-anomaly"></ol>
          </div>
        </div>
        <p id="rank-error" class="error" role="alert"></p>
      </section>
    `;

    el<HTMLButtonElement>(this.root, "#new-session").addEventListener("click", () => {
      void this.newSession();
    });
    el<HTMLInputElement>(this.root, "#file-input").addEventListener("change", (ev) => {
      const input = ev.target as HTMLInputElement;
      const file = input.files && input.files[0];
      if (file) {
        void this.uploadFile(file, file.name);
      }
    });
    el<HTMLSelectElement>(this.root, "#tool-select").addEventListener("change", () => {
      this.renderParamFields();
      this.schedulePlan();
    });
    for (const id of ["#expect-input", "#p-input"]) {
      el<HTMLInputElement>(this.root, id).addEventListener("input", () => this.schedulePlan());
    }
    el<HTMLButtonElement>(this.root, "#execute-btn").addEventListener("click", () => {
      void this.execute();
    });
    el<HTMLButtonElement>(this.root, "#add-candidate").addEventListener("click", () => {
      this.addCandidate();
    });
    el<HTMLButtonElement>(this.root, "#rank-refresh").addEventListener("click", () => {
      void this.refreshRankings();
    });
  }

  private renderToolOptions(): void {
    const select = el<HTMLSelectElement>(this.root, "#tool-select");
    select.innerHTML = this.tools
      .map((t) => `<option value="${t.tool_id}">${t.tool_id}</option>`)
      .join("");
    const rowCount = this.tools.findIndex((t) => t.tool_id === "row_count");
    if (rowCount >= 0) {
      select.selectedIndex = rowCount;
    }
    this.renderParamFields();
  }

  private renderParamFields(): void {
    const select = el<HTMLSelectElement>(this.root, "#tool-select");
    const tool = this.tools.find((t) => t.tool_id === select.value);
    const holder = el<HTMLElement>(this.root, "#param-fields");
    holder.innerHTML = (tool?.params ?? [])
      .map(
        (name) => `<label>${name}
          <input type="text" class="param-input" data-param="${name}" autocomplete="off">
        </label>`,
      )
      .join("");
    for (const input of Array.from(holder.querySelectorAll("input"))) {
      input.addEventListener("input", () => this.schedulePlan());
    }
  }

  private renderSessionLabel(): void {
    const label = el<HTMLElement>(this.root, "#session-label");
    label.textContent = this.session
      ? `session ${this.session.session_id} (${this.session.base})`
      : "no session";
  }

  private renderDatasetInfo(): void {
    const info = el<HTMLElement>(this.root, "#dataset-info");
    if (!this.dataset) {
      info.textContent = "no dataset uploaded";
      return;
    }
    const columns = this.dataset.columns
      .map((c) => `${c.name}:${c.kind}`)
      .join(", ");
    info.textContent = `dataset ${this.dataset.dataset_id}: ${this.dataset.n_rows} rows (${columns})`;
  }

  // ----- Actions -----------------------------------------------------------

  async newSession(base = "bits"): Promise<void> {
    this.session = await this.api.createSession(base);
    this.storage.setItem(SESSION_KEY, JSON.stringify(this.session));
    this.renderSessionLabel();
    this.candidates = [];
    this.renderCandidates();
    await this.refreshSummary();
  }

  async uploadFile(file: Blob, name: string): Promise<void> {
    const errorLine = el<HTMLElement>(this.root, "#dataset-error");
    errorLine.textContent = "";
    try {
      this.dataset = await this.api.uploadDataset(file, name);
    } catch (err) {
      errorLine.textContent = describeError(err);
      return;
    }
    this.storage.setItem(DATASET_KEY, JSON.stringify(this.dataset));
    this.renderDatasetInfo();
    this.schedulePlan();
  }

  currentRequest(): PlanRequest {
    const select = el<HTMLSelectElement>(this.root, "#tool-select");
    const params: Record<string, unknown> = {};
    for (const input of Array.from(
      this.root.querySelectorAll<HTMLInputElement>(".param-input"),
    )) {
      const name = input.dataset.param ?? "";
      const raw = input.value.trim();
      if (!raw) {
        continue;
      }
      params[name] =
        NUMERIC_PARAMS.has(name) && /^-?\d+(\.\d+)?$/.test(raw) ? Number(raw) : raw;
    }
    return {
      tool: select.value,
      params,
      expect: el<HTMLInputElement>(this.root, "#expect-input").value.trim(),
      p: Number(el<HTMLInputElement>(this.root, "#p-input").value),
      dataset_id: this.dataset?.dataset_id,
      note: el<HTMLInputElement>(this.root, "#note-input").value,
    };
  }

  private schedulePlan(): void {
    if (this.planTimer !== null) {
      clearTimeout(this.planTimer);
    }
    this.planTimer = setTimeout(() => {
      void this.plan();
    }, 250);
  }

  async plan(): Promise<PlanResult | null> {
    if (this.planTimer !== null) {
      clearTimeout(this.planTimer);
      this.planTimer = null;
    }
    const errorLine = el<HTMLElement>(this.root, "#plan-error");
    const executeBtn = el<HTMLButtonElement>(this.root, "#execute-btn");
    const candidateBtn = el<HTMLButtonElement>(this.root, "#add-candidate");
    const request = this.currentRequest();
    if (!this.session || !request.expect || !Number.isFinite(request.p)) {
      this.lastPlan = null;
      executeBtn.disabled = true;
      candidateBtn.disabled = true;
      errorLine.textContent = this.session ? "" : "start a session first";
      return null;
    }
    try {
      this.lastPlan = await this.api.plan(this.session.session_id, request);
    } catch (err) {
      this.lastPlan = null;
      executeBtn.disabled = true;
      candidateBtn.disabled = true;
      errorLine.textContent = describeError(err);
      this.renderPlan(null);
      return null;
    }
    errorLine.textContent = "";
    this.renderPlan(this.lastPlan);
    executeBtn.disabled = this.dataset === null;
    candidateBtn.disabled = false;
    return this.lastPlan;
  }

  private renderPlan(plan: PlanResult | null): void {
    el<HTMLElement>(this.root, "#plan-space").textContent = plan?.space ?? "-";
    el<HTMLElement>(this.root, "#plan-expected").textContent = plan?.expected_set ?? "-";
    el<HTMLElement>(this.root, "#plan-anomaly").textContent = plan?.anomaly_set ?? "-";
    el<HTMLElement>(this.root, "#plan-h").textContent = plan ? fmtGain(plan.h) : "-";
    el<HTMLElement>(this.root, "#plan-m").textContent = plan ? fmtGain(plan.m) : "-";
  }

  async execute(): Promise<void> {
    if (!this.session) {
      return;
    }
    const banner = el<HTMLElement>(this.root, "#verdict-banner");
    const request = this.currentRequest();
    try {
      const result = await this.api.runIteration(this.session.session_id, request);
      banner.className = `banner ${verdictClass(result.verdict)}`;
      banner.textContent =
        `${result.verdict}: observed ${fmtObserved(result.observed)}, ` +
        `G = ${fmtGain(result.g)} ${this.session.base}`;
    } catch (err) {
      if (err instanceof ApiError && err.code === "ModelViolation") {
        banner.className = "banner verdict-violation";
        banner.textContent = `ModelViolation: ${err.message}`;
      } else {
        banner.className = "banner verdict-violation";
        banner.textContent = describeError(err);
        return;
      }
    }
    await this.refreshSummary();
  }

  async refreshSummary(): Promise<SessionSummary | null> {
    if (!this.session) {
      return null;
    }
    const summary = await this.api.summary(this.session.session_id);
    el<HTMLElement>(this.root, "#sg-readout").textContent = fmtGain(summary.s_g);
    el<HTMLElement>(this.root, "#sh-readout").textContent = fmtGain(summary.s_h);
    el<HTMLElement>(this.root, "#div-readout").textContent = fmtGain(summary.divergence);
    el<HTMLElement>(this.root, "#chart-holder").innerHTML = renderCumulativeChart(
      summary.records,
    );
    const body = el<HTMLElement>(this.root, "#timeline-body");
    body.innerHTML = summary.records
      .map(
        (r) => `<tr class="${verdictClass(r.verdict)}">
          <td>${r.t}</td><td>${r.tool_id}</td><td>${r.expected_set}</td>
          <td>${r.p_hat}</td><td>${fmtObserved(r.observed)}</td>
          <td>${r.verdict}</td><td>${fmtGain(r.g)}</td>
        </tr>`,
      )
      .join("");
    return summary;
  }

  addCandidate(): void {
    const request = this.currentRequest();
    if (!request.expect || !Number.isFinite(request.p)) {
      return;
    }
    this.candidates.push({
      tool: request.tool,
      params: request.params,
      expect: request.expect,
      p: request.p,
    });
    this.renderCandidates();
  }

  private renderCandidates(): void {
    const list = el<HTMLElement>(this.root, "#candidates-list");
    list.innerHTML = this.candidates
      .map(
        (c, j) =>
          `<li>[${j}] ${c.tool} expect=${c.expect} p=${c.p}</li>`,
      )
      .join("");
    el<HTMLButtonElement>(this.root, "#rank-refresh").disabled =
      this.candidates.length === 0 || !this.session;
  }

  async refreshRankings(): Promise<void> {
    if (!this.session || this.candidates.length === 0) {
      return;
    }
    const errorLine = el<HTMLElement>(this.root, "#rank-error");
    errorLine.textContent = "";
    let byExpected: Ranking;
    let byAnomaly: Ranking;
    try {
      byExpected = await this.api.rank(this.session.session_id, "expected", this.candidates);
      byAnomaly = await this.api.rank(this.session.session_id, "anomaly", this.candidates);
    } catch (err) {
      errorLine.textContent = describeError(err);
      return;
    }
    this.renderRanking("#rank-expected", byExpected);
    this.renderRanking("#rank-anomaly", byAnomaly);
  }

  private renderRanking(selector: string, ranking: Ranking): void {
    const list = el<HTMLElement>(this.root, selector);
    list.innerHTML = ranking.ordered
      .map(
        (entry) =>
          `<li class="${entry.j === ranking.chosen ? "chosen" : ""}">` +
          `${entry.tool} expect=${entry.expect} p=${entry.p} ` +
          `score=${fmtGain(entry.score)}</li>`,
      )
      .join("");
  }
}

export function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}
