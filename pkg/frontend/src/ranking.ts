/** The ranked-predictions table. Sorting and formatting happen here;
 * every figure in a cell is a field of the service's report. */

import type { PosteriorReport, PredictionWorld, ReportRow } from "./api.js";
import { fmt2, fmt3 } from "./state.js";
import { seriesChart } from "./chart.js";

export interface RankingOptions {
  /** Resolve a row to its full predicted series, or null if unknown. */
  expand?: (row: ReportRow) => Promise<PredictionWorld | null>;
  /** Observed samples to overlay on an expanded row's chart. */
  observed?: [number, number][];
}

function byPosteriorDesc(a: ReportRow, b: ReportRow): number {
  if (b.posterior !== a.posterior) return b.posterior - a.posterior;
  if (a.upsilon !== b.upsilon) return a.upsilon - b.upsilon;
  return a.tid - b.tid;
}

function cell(row: HTMLTableRowElement, text: string, cls?: string): void {
  const td = document.createElement("td");
  td.textContent = text;
  if (cls) td.className = cls;
  row.appendChild(td);
}

export function renderRanking(
  container: HTMLElement,
  report: PosteriorReport,
  options: RankingOptions = {},
): void {
  container.textContent = "";

  if (report.rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "no predictions at this index";
    container.appendChild(empty);
    return;
  }

  const table = document.createElement("table");
  table.className = "ranking";

  const head = table.createTHead().insertRow();
  for (const name of [
    "phi",
    "upsilon",
    "tid",
    report.names.index,
    report.names.value,
    "Prior",
    "Posterior",
  ]) {
    const th = document.createElement("th");
    th.textContent = name;
    head.appendChild(th);
  }

  const body = table.createTBody();
  const ranked = [...report.rows].sort(byPosteriorDesc);
  for (const row of ranked) {
    const tr = body.insertRow();
    tr.className = "ranked-row";
    cell(tr, String(row.phi));
    cell(tr, String(row.upsilon));
    cell(tr, String(row.tid));
    cell(tr, String(row.index));
    cell(tr, fmt2(row.predicted));
    cell(tr, fmt3(row.prior), "num");
    cell(tr, fmt3(row.posterior), "num posterior");
    if (options.expand) {
      tr.classList.add("expandable");
      tr.addEventListener("click", () => toggleDetail(tr, row, options));
    }
  }

  const foot = table.createTFoot();
  const aggregates = [...report.aggregates].sort(
    (a, b) => b.posterior - a.posterior,
  );
  for (const aggregate of aggregates) {
    const tr = foot.insertRow();
    tr.className = "aggregate-row";
    const label = document.createElement("td");
    label.colSpan = 6;
    label.textContent = `Pr(upsilon = ${aggregate.upsilon})`;
    tr.appendChild(label);
    cell(tr, fmt3(aggregate.posterior), "num");
  }

  container.appendChild(table);
}

async function toggleDetail(
  tr: HTMLTableRowElement,
  row: ReportRow,
  options: RankingOptions,
): Promise<void> {
  const existing = tr.nextElementSibling;
  if (existing && existing.classList.contains("detail-row")) {
    existing.remove();
    return;
  }
  const world = await options.expand!(row);
  const detail = document.createElement("tr");
  detail.className = "detail-row";
  const td = document.createElement("td");
  td.colSpan = 7;
  if (world === null) {
    td.textContent = "no stored series for this trial";
  } else {
    td.appendChild(seriesChart(world.series, options.observed ?? []));
  }
  detail.appendChild(td);
  tr.after(detail);
}
