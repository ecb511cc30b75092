/** Observation selection and the conditioning loop.
 *
 * Toggling a row or editing sigma re-runs conditioning (read-only on
 * the server) so the ranking tracks the current selection. Writing the
 * posterior back into the world table is a separate, deliberate step.
 */

import { Api, ApiError } from "./api.js";
import type { ConditionRequest, PosteriorReport } from "./api.js";

export interface ParsedObservations {
  names: { index: string; value: string };
  rows: [number, number][];
}

/** First column is the index, second the value; both numeric. */
export function parseObservationCsv(text: string): ParsedObservations {
  const lines = text.split(/\r?\n/).filter((line) => line.trim() !== "");
  if (lines.length < 2) {
    throw new Error("observation CSV needs a header and at least one row");
  }
  const header = lines[0].split(",").map((s) => s.trim());
  if (header.length < 2) {
    throw new Error("observation CSV needs two columns");
  }
  const rows: [number, number][] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    const index = Number(parts[0]);
    const value = Number(parts[1]);
    if (parts.length < 2 || Number.isNaN(index) || Number.isNaN(value)) {
      throw new Error(`bad observation row: ${line}`);
    }
    rows.push([index, value]);
  }
  return { names: { index: header[0], value: header[1] }, rows };
}

interface PickerRow {
  index: number;
  value: number;
  selected: boolean;
}

export interface PickerOptions {
  api: Api;
  phi: () => number | null;
  onReport: (report: PosteriorReport) => void;
  onError: (error: unknown) => void;
  /** Called after a successful write-back so the app can re-sync. */
  onCommitted?: () => void;
}

export class ObservationPicker {
  private rows: PickerRow[] = [];
  private names = { index: "t", value: "x" };
  private inflight: AbortController | null = null;

  private tableHost!: HTMLElement;
  private sigmaInput!: HTMLInputElement;
  private atInput!: HTMLInputElement;
  private errorBox!: HTMLElement;
  private conditionButton!: HTMLButtonElement;
  private commitButton!: HTMLButtonElement;

  constructor(private readonly options: PickerOptions) {}

  attach(container: HTMLElement): void {
    container.textContent = "";

    const loadRow = document.createElement("div");
    loadRow.className = "picker-load";
    const file = document.createElement("input");
    file.type = "file";
    file.className = "obs-file";
    file.addEventListener("change", () => {
      const chosen = file.files && file.files[0];
      if (chosen) {
        chosen.text().then(
          (text) => this.loadCsv(text),
          (error) => this.showError(error),
        );
      }
    });
    const paste = document.createElement("textarea");
    paste.className = "obs-paste";
    paste.placeholder = "or paste observation CSV here";
    paste.rows = 3;
    const pasteButton = document.createElement("button");
    pasteButton.textContent = "Load pasted CSV";
    pasteButton.className = "obs-paste-load";
    pasteButton.addEventListener("click", () => this.loadCsv(paste.value));
    loadRow.append(file, paste, pasteButton);

    this.tableHost = document.createElement("div");
    this.tableHost.className = "picker-rows";

    const controls = document.createElement("div");
    controls.className = "picker-controls";

    const sigmaLabel = document.createElement("label");
    sigmaLabel.textContent = "sigma ";
    this.sigmaInput = document.createElement("input");
    this.sigmaInput.className = "sigma-input";
    this.sigmaInput.placeholder = "sample stddev";
    this.sigmaInput.addEventListener("input", () => this.refreshControls());
    this.sigmaInput.addEventListener("change", () => this.submit());
    sigmaLabel.appendChild(this.sigmaInput);

    const atLabel = document.createElement("label");
    atLabel.textContent = " at ";
    this.atInput = document.createElement("input");
    this.atInput.className = "at-input";
    this.atInput.placeholder = "last observed";
    this.atInput.addEventListener("change", () => this.submit());
    atLabel.appendChild(this.atInput);

    this.conditionButton = document.createElement("button");
    this.conditionButton.textContent = "Condition";
    this.conditionButton.className = "condition-button";
    this.conditionButton.addEventListener("click", () => this.submit());

    this.commitButton = document.createElement("button");
    this.commitButton.textContent = "Write posterior back";
    this.commitButton.className = "commit-button";
    this.commitButton.addEventListener("click", () => this.submit(true));

    this.errorBox = document.createElement("div");
    this.errorBox.className = "picker-error";

    controls.append(
      sigmaLabel,
      atLabel,
      this.conditionButton,
      this.commitButton,
    );
    container.append(loadRow, this.tableHost, controls, this.errorBox);
    this.refreshControls();
  }

  loadCsv(text: string): void {
    let parsed: ParsedObservations;
    try {
      parsed = parseObservationCsv(text);
    } catch (error) {
      this.showError(error);
      return;
    }
    this.names = parsed.names;
    this.rows = parsed.rows.map(([index, value]) => ({
      index,
      value,
      selected: true,
    }));
    this.clearError();
    this.renderRows();
    this.refreshControls();
  }

  selectedSamples(): [number, number][] {
    return this.rows
      .filter((row) => row.selected)
      .map((row) => [row.index, row.value]);
  }

  /** null when the field is blank (server heuristic), NaN when junk. */
  private sigmaValue(): number | null {
    const raw = this.sigmaInput.value.trim();
    if (raw === "") return null;
    return Number(raw);
  }

  private sigmaProblem(): string | null {
    const sigma = this.sigmaValue();
    if (sigma === null) return null;
    if (Number.isNaN(sigma)) return "BadInput: sigma must be a number";
    if (sigma <= 0) return "NonPositiveSigma: sigma must be positive";
    return null;
  }

  private refreshControls(): void {
    const problem = this.sigmaProblem();
    const blocked =
      problem !== null ||
      this.selectedSamples().length === 0 ||
      this.options.phi() === null;
    this.conditionButton.disabled = blocked;
    this.commitButton.disabled = blocked;
    if (problem !== null) {
      this.errorBox.textContent = problem;
    } else if (this.rows.length > 0 && this.selectedSamples().length === 0) {
      this.errorBox.textContent =
        "EmptyObservationSet: select at least one observation";
    } else {
      this.clearError();
    }
  }

  private renderRows(): void {
    this.tableHost.textContent = "";
    const table = document.createElement("table");
    table.className = "picker-table";
    const head = table.createTHead().insertRow();
    for (const name of ["", this.names.index, this.names.value]) {
      const th = document.createElement("th");
      th.textContent = name;
      head.appendChild(th);
    }
    const body = table.createTBody();
    this.rows.forEach((row, i) => {
      const tr = body.insertRow();
      const toggleCell = tr.insertCell();
      const toggle = document.createElement("input");
      toggle.type = "checkbox";
      toggle.className = "obs-toggle";
      toggle.checked = row.selected;
      toggle.addEventListener("change", () => {
        this.rows[i].selected = toggle.checked;
        this.refreshControls();
        this.submit();
      });
      toggleCell.appendChild(toggle);
      tr.insertCell().textContent = String(row.index);
      tr.insertCell().textContent = String(row.value);
    });
    this.tableHost.appendChild(table);
  }

  /** One conditioning request per call; an older in-flight one is
   * superseded and its result dropped. */
  submit(writeBack = false): void {
    const phi = this.options.phi();
    const samples = this.selectedSamples();
    if (phi === null || samples.length === 0 || this.sigmaProblem() !== null) {
      this.refreshControls();
      return;
    }
    const request: ConditionRequest = { phi, samples, writeBack };
    const sigma = this.sigmaValue();
    if (sigma !== null) request.sigma = sigma;
    const at = this.atInput.value.trim();
    if (at !== "" && !Number.isNaN(Number(at))) request.at = Number(at);

    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.clearError();

    this.options.api.condition(request, controller.signal).then(
      (report) => {
        if (this.inflight !== controller) return;
        this.inflight = null;
        this.options.onReport(report);
        if (writeBack) this.options.onCommitted?.();
      },
      (error) => {
        if (this.inflight !== controller) return;
        this.inflight = null;
        if (error instanceof DOMException && error.name === "AbortError") {
          return;
        }
        this.showError(error);
        this.options.onError(error);
      },
    );
  }

  private showError(error: unknown): void {
    if (error instanceof ApiError) {
      this.errorBox.textContent = `${error.code}: ${error.detail}`;
    } else {
      this.errorBox.textContent = String(
        error instanceof Error ? error.message : error,
      );
    }
  }

  private clearError(): void {
    this.errorBox.textContent = "";
  }
}
