/** The management tab: what is in the catalog, any relation by name,
 * the world table, and per-trial predictions. Read paths only. */

import { Api } from "./api.js";
import type { Catalog, Predictions, Relation, WorldTable } from "./api.js";
import { seriesChart } from "./chart.js";

export interface ManageOptions {
  api: Api;
  onError: (error: unknown) => void;
}

export class ManagePane {
  private catalogHost!: HTMLElement;
  private relationName!: HTMLInputElement;
  private relationFilter!: HTMLInputElement;
  private relationHost!: HTMLElement;
  private worldHost!: HTMLElement;
  private predictionsPhi!: HTMLSelectElement;
  private predictionsHost!: HTMLElement;

  constructor(private readonly options: ManageOptions) {}

  attach(container: HTMLElement): void {
    container.textContent = "";

    const catalogCard = document.createElement("section");
    catalogCard.className = "card";
    const catalogTitle = document.createElement("h3");
    catalogTitle.textContent = "Catalog";
    this.catalogHost = document.createElement("div");
    catalogCard.append(catalogTitle, this.catalogHost);

    const relationCard = document.createElement("section");
    relationCard.className = "card";
    const relationTitle = document.createElement("h3");
    relationTitle.textContent = "Relation";
    this.relationName = document.createElement("input");
    this.relationName.placeholder = "name, e.g. W or H_3^1 or Y_0";
    this.relationName.className = "relation-name";
    this.relationFilter = document.createElement("input");
    this.relationFilter.placeholder = "filters: attr=value ...";
    this.relationFilter.className = "relation-filter";
    const show = document.createElement("button");
    show.textContent = "Show";
    show.addEventListener("click", () => this.showRelation());
    this.relationHost = document.createElement("div");
    this.relationHost.className = "scroll-x";
    relationCard.append(
      relationTitle,
      this.relationName,
      this.relationFilter,
      show,
      this.relationHost,
    );

    const worldCard = document.createElement("section");
    worldCard.className = "card";
    const worldTitle = document.createElement("h3");
    worldTitle.textContent = "World table";
    this.worldHost = document.createElement("div");
    worldCard.append(worldTitle, this.worldHost);

    const predictionsCard = document.createElement("section");
    predictionsCard.className = "card";
    const predictionsTitle = document.createElement("h3");
    predictionsTitle.textContent = "Predictions by world";
    this.predictionsPhi = document.createElement("select");
    const list = document.createElement("button");
    list.textContent = "List";
    list.addEventListener("click", () => this.showPredictions());
    this.predictionsHost = document.createElement("div");
    predictionsCard.append(
      predictionsTitle,
      this.predictionsPhi,
      list,
      this.predictionsHost,
    );

    container.append(catalogCard, relationCard, worldCard, predictionsCard);
  }

  update(catalog: Catalog): void {
    this.renderCatalog(catalog);
    this.predictionsPhi.textContent = "";
    for (const phenomenon of catalog.phenomena) {
      const option = document.createElement("option");
      option.value = String(phenomenon.id);
      option.textContent = `${phenomenon.id}: ${phenomenon.description}`;
      this.predictionsPhi.appendChild(option);
    }
    this.refreshWorld();
  }

  private renderCatalog(catalog: Catalog): void {
    this.catalogHost.textContent = "";
    const list = document.createElement("ul");
    for (const phenomenon of catalog.phenomena) {
      const item = document.createElement("li");
      const explained = catalog.h0
        .filter(([phi]) => phi === phenomenon.id)
        .map(([, upsilon]) => {
          const name = catalog.hypotheses.find((h) => h.id === upsilon)?.name;
          return `${upsilon} (${name ?? "?"})`;
        });
      item.textContent =
        `${phenomenon.id}: ${phenomenon.description}` +
        (explained.length
          ? ` explained by ${explained.join(", ")}`
          : " has no hypotheses yet");
      list.appendChild(item);
    }
    this.catalogHost.appendChild(list);
    if (catalog.urelations.length > 0) {
      const urels = document.createElement("p");
      urels.textContent = "u-relations: " + catalog.urelations.join(", ");
      this.catalogHost.appendChild(urels);
    }
  }

  private async refreshWorld(): Promise<void> {
    try {
      const world = await this.options.api.worldTable();
      this.renderWorld(world);
    } catch (error) {
      this.worldHost.textContent = "no world table yet";
      void error;
    }
  }

  private renderWorld(world: WorldTable): void {
    this.worldHost.textContent = "";
    if (world.marginals.length === 0) {
      this.worldHost.textContent =
        "empty: no uncertainty introduced so far";
      return;
    }
    const table = document.createElement("table");
    const head = table.createTHead().insertRow();
    for (const name of ["var", "val", "prob"]) {
      const th = document.createElement("th");
      th.textContent = name;
      head.appendChild(th);
    }
    const body = table.createTBody();
    for (const entry of world.marginals) {
      const tr = body.insertRow();
      tr.insertCell().textContent = entry.var;
      tr.insertCell().textContent = String(entry.val);
      tr.insertCell().textContent = String(entry.prob);
    }
    this.worldHost.appendChild(table);
  }

  private async showRelation(): Promise<void> {
    const name = this.relationName.value.trim();
    if (!name) return;
    const filters = this.relationFilter.value
      .split(/\s+/)
      .filter((part) => part !== "");
    try {
      const relation = await this.options.api.relation(name, filters);
      this.renderRelation(relation);
    } catch (error) {
      this.relationHost.textContent = String(error);
      this.options.onError(error);
    }
  }

  private renderRelation(relation: Relation): void {
    this.relationHost.textContent = "";
    const table = document.createElement("table");
    const head = table.createTHead().insertRow();
    const body = table.createTBody();

    if (relation.kind === "certain") {
      for (const attr of relation.attributes) {
        const th = document.createElement("th");
        th.textContent = attr;
        head.appendChild(th);
      }
      for (const row of relation.rows) {
        const tr = body.insertRow();
        for (const attr of relation.attributes) {
          tr.insertCell().textContent = String(row[attr]);
        }
      }
    } else {
      const arity = Math.max(
        0,
        ...relation.tuples.map((t) => t.condition.length),
      );
      for (let i = 1; i <= arity; i++) {
        for (const part of ["V", "D"]) {
          const th = document.createElement("th");
          th.textContent = `${part}${i}`;
          head.appendChild(th);
        }
      }
      for (const column of relation.columns) {
        const th = document.createElement("th");
        th.textContent = column;
        head.appendChild(th);
      }
      for (const item of relation.tuples) {
        const tr = body.insertRow();
        for (let i = 0; i < arity; i++) {
          const pair = item.condition[i];
          tr.insertCell().textContent = pair ? pair[0] : "";
          tr.insertCell().textContent = pair ? String(pair[1]) : "";
        }
        for (const column of relation.columns) {
          tr.insertCell().textContent = String(item.data[column]);
        }
      }
    }
    this.relationHost.appendChild(table);
  }

  private async showPredictions(): Promise<void> {
    if (!this.predictionsPhi.value) return;
    this.predictionsHost.textContent = "";
    let predictions: Predictions;
    try {
      predictions = await this.options.api.predictions(
        Number(this.predictionsPhi.value),
      );
    } catch (error) {
      this.predictionsHost.textContent = String(error);
      return;
    }
    for (const world of predictions.worlds) {
      const line = document.createElement("details");
      const summary = document.createElement("summary");
      summary.textContent =
        `hypothesis ${world.upsilon}, trial ${world.tid}, ` +
        `prior ${world.prior.toFixed(3)}`;
      line.appendChild(summary);
      line.addEventListener(
        "toggle",
        () => {
          if (line.open && line.childElementCount === 1) {
            line.appendChild(seriesChart(world.series, []));
          }
        },
      );
      this.predictionsHost.appendChild(line);
    }
  }
}
