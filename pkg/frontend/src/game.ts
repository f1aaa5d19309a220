/**
 * Game screen logic. The server is authoritative: every rendered fact
 * (current node, goal, hop count, neighbor list) comes from the last API
 * response. The client adds only presentation state: a text filter over
 * neighbor titles, the travelled-title list for the end-of-game replay,
 * and the session summary of finished games.
 */

import { ApiClient, ApiError, GameState } from "./api.js";

export interface GameRecord {
  goalTitle: string;
  hops: number;
  success: boolean;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export class GameUi {
  readonly api: ApiClient;
  /** Count of neighbor clicks; every recorded move must come from one. */
  neighborClicks = 0;
  records: GameRecord[] = [];

  private session: string | null = null;
  private state: GameState | null = null;
  private pathTitles: string[] = [];
  private recorded = false;

  constructor(private readonly doc: Document, baseUrl: string = "") {
    this.api = new ApiClient(baseUrl);
    this.bind();
  }

  private el<T extends HTMLElement>(id: string): T {
    const node = this.doc.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  }

  private bind(): void {
    this.el<HTMLButtonElement>("new-game").addEventListener("click", () => {
      void this.startFromForm();
    });
    this.el<HTMLInputElement>("filter").addEventListener("input", () => {
      this.renderNeighbors();
    });
    this.el<HTMLButtonElement>("retry").addEventListener("click", () => {
      void this.startFromForm();
    });
  }

  private async startFromForm(): Promise<void> {
    const goalIndexRaw = this.el<HTMLInputElement>("goal-index").value.trim();
    const goalIdRaw = this.el<HTMLInputElement>("goal-id").value.trim();
    if (goalIdRaw !== "") {
      await this.startGame({ goal_id: Number(goalIdRaw) });
    } else {
      await this.startGame({ goal_index: goalIndexRaw === "" ? 0 : Number(goalIndexRaw) });
    }
  }

  async startGame(req: { goal_index?: number; goal_id?: number }): Promise<void> {
    this.banner(false);
    try {
      const game = await this.api.newGame(req);
      this.session = game.session_id;
      this.pathTitles = [game.start.title];
      this.recorded = false;
      this.state = await this.api.state(game.session_id);
      this.render();
    } catch (err) {
      // keep whatever game was on screen; offer a retry
      this.banner(true, err instanceof Error ? err.message : String(err));
    }
  }

  /** DOM click handler for a neighbor button. */
  async clickNeighbor(id: number): Promise<void> {
    if (!this.session || !this.state || this.state.finished) return;
    this.neighborClicks += 1;
    try {
      this.state = await this.api.move(this.session, id);
      this.pathTitles.push(this.state.current.title);
      this.render();
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.toast(`Not a link from here: ${err.message}`);
        return; // non-fatal; state unchanged on the server
      }
      this.banner(true, err instanceof Error ? err.message : String(err));
    }
  }

  private render(): void {
    const state = this.state;
    if (!state) return;
    this.el("goal-title").textContent = state.goal.title;
    this.el("current-title").textContent = state.current.title;
    this.el("hop-counter").textContent = String(state.hops);
    this.el("hop-cap").textContent = String(state.hop_cap);
    this.renderNeighbors();
    const result = this.el("result");
    if (state.finished) {
      const verdict = state.success ? "Reached the goal" : "Failed";
      this.el("result-text").textContent = `${verdict} in ${state.hops} hops.`;
      this.el("path-replay").innerHTML = this.pathTitles
        .map((t) => `<li>${escapeHtml(t)}</li>`)
        .join("");
      result.hidden = false;
      this.recordGame(state);
    } else {
      result.hidden = true;
    }
  }

  private renderNeighbors(): void {
    const state = this.state;
    const list = this.el<HTMLUListElement>("neighbor-list");
    if (!state) {
      list.innerHTML = "";
      return;
    }
    const needle = this.el<HTMLInputElement>("filter").value.toLowerCase();
    const visited = new Set(state.visited_ids);
    list.innerHTML = "";
    for (const neighbor of state.neighbors) {
      if (needle && !neighbor.title.toLowerCase().includes(needle)) continue;
      const item = this.doc.createElement("li");
      const button = this.doc.createElement("button");
      button.type = "button";
      button.dataset.nodeId = String(neighbor.id);
      button.textContent = neighbor.title;
      if (visited.has(neighbor.id)) button.classList.add("visited");
      button.disabled = state.finished;
      button.addEventListener("click", () => {
        void this.clickNeighbor(neighbor.id);
      });
      item.appendChild(button);
      list.appendChild(item);
    }
  }

  private recordGame(state: GameState): void {
    if (this.recorded) return;
    this.recorded = true;
    this.records.push({
      goalTitle: state.goal.title,
      hops: state.hops,
      success: state.success,
    });
    this.renderSummary();
  }

  private renderSummary(): void {
    const body = this.el<HTMLTableSectionElement>("summary-body");
    body.innerHTML = this.records
      .map(
        (r, i) =>
          `<tr><td>${i + 1}</td><td>${escapeHtml(r.goalTitle)}</td>` +
          `<td>${r.hops}</td><td>${r.success ? "yes" : "no"}</td></tr>`
      )
      .join("");
    const hops = this.records.map((r) => r.hops);
    const avg = hops.reduce((a, b) => a + b, 0) / (hops.length || 1);
    const rate =
      (100 * this.records.filter((r) => r.success).length) / (this.records.length || 1);
    this.el("summary-totals").textContent =
      `Human (this session)  ${avg.toFixed(1)}  ${rate.toFixed(0)}%`;
  }

  private toast(message: string): void {
    const toast = this.el("toast");
    toast.textContent = message;
    toast.hidden = false;
    setTimeout(() => {
      toast.hidden = true;
    }, 2500);
  }

  private banner(show: boolean, message?: string): void {
    const banner = this.el("banner");
    banner.hidden = !show;
    if (message) this.el("banner-text").textContent = message;
  }
}

export function initUi(doc: Document, baseUrl: string = ""): GameUi {
  return new GameUi(doc, baseUrl);
}
