/** Shell: one served project, three tabs, one selected phenomenon. */

import { Api, ApiError } from "./api.js";
import type { Catalog, Predictions, ReportRow } from "./api.js";
import { analyticsEnabled } from "./state.js";
import type { Tab } from "./state.js";
import { renderRanking } from "./ranking.js";
import { ObservationPicker } from "./picker.js";
import { EtlPane } from "./etl.js";
import { ManagePane } from "./manage.js";

const api = new Api();

let catalog: Catalog | null = null;
let phi: number | null = null;
let tab: Tab = "etl";
let predictionsCache: Predictions | null = null;

const phiSelect = document.getElementById("phi-select") as HTMLSelectElement;
const tabBar = document.getElementById("tabs") as HTMLElement;
const errorBanner = document.getElementById("error-banner") as HTMLElement;
const panes: Record<Tab, HTMLElement> = {
  etl: document.getElementById("pane-etl") as HTMLElement,
  management: document.getElementById("pane-management") as HTMLElement,
  analytics: document.getElementById("pane-analytics") as HTMLElement,
};
const rankingHost = document.getElementById("ranking") as HTMLElement;
const pickerHost = document.getElementById("picker") as HTMLElement;

function showError(error: unknown): void {
  errorBanner.textContent =
    error instanceof ApiError
      ? `${error.code}: ${error.detail}`
      : String(error instanceof Error ? error.message : error);
  errorBanner.hidden = false;
}

function clearError(): void {
  errorBanner.hidden = true;
}

const picker = new ObservationPicker({
  api,
  phi: () => phi,
  onReport: (report) => {
    clearError();
    predictionsCache = null;
    renderRanking(rankingHost, report, {
      observed: picker.selectedSamples(),
      expand: expandRow,
    });
  },
  onError: showError,
  onCommitted: () => void refresh(),
});

const etl = new EtlPane({
  api,
  onMutated: () => {
    clearError();
    void refresh();
  },
  onError: showError,
});

const manage = new ManagePane({ api, onError: showError });

async function expandRow(row: ReportRow) {
  if (phi === null) return null;
  if (predictionsCache === null || predictionsCache.phenomenon !== phi) {
    predictionsCache = await api.predictions(phi);
  }
  return (
    predictionsCache.worlds.find(
      (world) => world.upsilon === row.upsilon && world.tid === row.tid,
    ) ?? null
  );
}

function renderTabs(): void {
  tabBar.textContent = "";
  const entries: [Tab, string, boolean][] = [
    ["etl", "Load", true],
    ["management", "Manage", true],
    [
      "analytics",
      "Analytics",
      catalog !== null && analyticsEnabled(catalog, phi),
    ],
  ];
  for (const [name, label, enabled] of entries) {
    const button = document.createElement("button");
    button.textContent = label;
    button.disabled = !enabled;
    button.className = "tab-button" + (tab === name ? " active" : "");
    button.addEventListener("click", () => {
      tab = name;
      renderTabs();
    });
    tabBar.appendChild(button);
  }
  if (tab === "analytics" && catalog !== null && !analyticsEnabled(catalog, phi)) {
    tab = "etl";
  }
  for (const name of Object.keys(panes) as Tab[]) {
    panes[name].hidden = name !== tab;
  }
}

function renderPhiSelect(): void {
  if (catalog === null) return;
  phiSelect.textContent = "";
  for (const phenomenon of catalog.phenomena) {
    const option = document.createElement("option");
    option.value = String(phenomenon.id);
    option.textContent = `${phenomenon.id}: ${phenomenon.description}`;
    phiSelect.appendChild(option);
  }
  if (phi === null && catalog.phenomena.length > 0) {
    phi = catalog.phenomena[0].id;
  }
  if (phi !== null) phiSelect.value = String(phi);
}

phiSelect.addEventListener("change", () => {
  phi = phiSelect.value === "" ? null : Number(phiSelect.value);
  predictionsCache = null;
  renderTabs();
});

async function refresh(): Promise<void> {
  try {
    catalog = await api.catalog();
  } catch (error) {
    showError(error);
    return;
  }
  renderPhiSelect();
  renderTabs();
  etl.update(catalog);
  manage.update(catalog);
}

etl.attach(panes.etl);
manage.attach(panes.management);
picker.attach(pickerHost);
rankingHost.textContent = "";
void refresh();
