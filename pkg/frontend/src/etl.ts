/** The load-in tab: register descriptors, upload trials, introduce
 * uncertainty. Controls follow the catalog's stages so nothing here
 * can ask the service for a step it would refuse. */

import { Api } from "./api.js";
import type { Catalog } from "./api.js";
import { catalogFrozen, trialsOpen, uIntroOpen } from "./state.js";

interface UIntroResult {
  phenomenon: number;
  worlds: number;
  skipped: number[];
  warnings: string[];
  introduced: {
    upsilon: number;
    clusters: string[][];
    variables: string[];
    urelations: string[];
  }[];
}

export interface EtlOptions {
  api: Api;
  /** Re-fetch the catalog after any successful mutation. */
  onMutated: () => void;
  onError: (error: unknown) => void;
}

export class EtlPane {
  private phenomenonFile!: HTMLInputElement;
  private hypothesisFile!: HTMLInputElement;
  private targetsHost!: HTMLElement;
  private trialFile!: HTMLInputElement;
  private trialPair!: HTMLSelectElement;
  private uIntroPhi!: HTMLSelectElement;
  private frozenNote!: HTMLElement;
  private log!: HTMLElement;
  private registerButtons: HTMLButtonElement[] = [];
  private trialButton!: HTMLButtonElement;
  private uIntroButton!: HTMLButtonElement;

  constructor(private readonly options: EtlOptions) {}

  attach(container: HTMLElement): void {
    container.textContent = "";

    this.frozenNote = document.createElement("p");
    this.frozenNote.className = "frozen-note";
    container.appendChild(this.frozenNote);

    const phenomenonCard = this.card(container, "Register phenomenon");
    this.phenomenonFile = document.createElement("input");
    this.phenomenonFile.type = "file";
    const registerPhenomenon = this.actionButton("Register", () =>
      this.registerPhenomenon(),
    );
    this.registerButtons.push(registerPhenomenon);
    phenomenonCard.append(this.phenomenonFile, registerPhenomenon);

    const hypothesisCard = this.card(container, "Register hypothesis");
    this.hypothesisFile = document.createElement("input");
    this.hypothesisFile.type = "file";
    this.targetsHost = document.createElement("span");
    this.targetsHost.className = "target-phis";
    const registerHypothesis = this.actionButton("Register", () =>
      this.registerHypothesis(),
    );
    this.registerButtons.push(registerHypothesis);
    hypothesisCard.append(
      this.hypothesisFile,
      document.createTextNode(" targets: "),
      this.targetsHost,
      registerHypothesis,
    );

    const trialCard = this.card(container, "Load trial");
    this.trialFile = document.createElement("input");
    this.trialFile.type = "file";
    this.trialPair = document.createElement("select");
    this.trialPair.className = "trial-pair";
    this.trialButton = this.actionButton("Load", () => this.loadTrial());
    trialCard.append(
      this.trialFile,
      document.createTextNode(" into "),
      this.trialPair,
      this.trialButton,
    );

    const introCard = this.card(container, "Introduce uncertainty");
    this.uIntroPhi = document.createElement("select");
    this.uIntroPhi.className = "u-intro-phi";
    this.uIntroButton = this.actionButton("Introduce", () => this.uIntro());
    introCard.append(
      document.createTextNode("phenomenon "),
      this.uIntroPhi,
      this.uIntroButton,
    );

    this.log = document.createElement("pre");
    this.log.className = "etl-log";
    container.appendChild(this.log);
  }

  update(catalog: Catalog): void {
    const frozen = catalogFrozen(catalog);
    this.frozenNote.textContent = frozen
      ? "The catalog is frozen: uncertainty introduction has begun."
      : "";

    this.targetsHost.textContent = "";
    for (const phenomenon of catalog.phenomena) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.className = "target-phi";
      box.value = String(phenomenon.id);
      label.append(box, document.createTextNode(` ${phenomenon.id}`));
      this.targetsHost.appendChild(label);
    }

    this.trialPair.textContent = "";
    for (const [phi, upsilon] of catalog.h0) {
      if (!trialsOpen(catalog, phi, upsilon)) continue;
      const option = document.createElement("option");
      option.value = `${phi}:${upsilon}`;
      const name =
        catalog.hypotheses.find((h) => h.id === upsilon)?.name ?? "?";
      option.textContent = `phenomenon ${phi}, hypothesis ${upsilon} (${name})`;
      this.trialPair.appendChild(option);
    }

    this.uIntroPhi.textContent = "";
    for (const phenomenon of catalog.phenomena) {
      if (!uIntroOpen(catalog, phenomenon.id)) continue;
      const option = document.createElement("option");
      option.value = String(phenomenon.id);
      option.textContent = String(phenomenon.id);
      this.uIntroPhi.appendChild(option);
    }

    for (const button of this.registerButtons) button.disabled = frozen;
    this.trialButton.disabled = this.trialPair.options.length === 0;
    this.uIntroButton.disabled = this.uIntroPhi.options.length === 0;
  }

  private card(container: HTMLElement, title: string): HTMLElement {
    const section = document.createElement("section");
    section.className = "card";
    const heading = document.createElement("h3");
    heading.textContent = title;
    section.appendChild(heading);
    container.appendChild(section);
    return section;
  }

  private actionButton(
    label: string,
    action: () => Promise<void> | void,
  ): HTMLButtonElement {
    const button = document.createElement("button");
    button.textContent = label;
    button.addEventListener("click", () => {
      Promise.resolve(action()).catch((error) => {
        this.say(String(error));
        this.options.onError(error);
      });
    });
    return button;
  }

  private async registerPhenomenon(): Promise<void> {
    const file = this.phenomenonFile.files?.[0];
    if (!file) return;
    const result = await this.options.api.addPhenomenon(file);
    this.say(`phenomenon ${result.id}: ${result.description}`);
    this.options.onMutated();
  }

  private async registerHypothesis(): Promise<void> {
    const file = this.hypothesisFile.files?.[0];
    if (!file) return;
    const phis = Array.from(
      this.targetsHost.querySelectorAll<HTMLInputElement>(".target-phi"),
    )
      .filter((box) => box.checked)
      .map((box) => Number(box.value));
    const result = await this.options.api.addHypothesis(file, phis);
    this.say(`hypothesis ${result.id} (${result.name})`);
    for (const warning of result.warnings ?? []) {
      this.say(`warning: ${warning}`);
    }
    this.options.onMutated();
  }

  private async loadTrial(): Promise<void> {
    const file = this.trialFile.files?.[0];
    if (!file || !this.trialPair.value) return;
    const [phi, upsilon] = this.trialPair.value.split(":").map(Number);
    const result = await this.options.api.loadTrial(phi, upsilon, file);
    this.say(`tid ${result.tid} for (${phi}, ${upsilon})`);
    this.options.onMutated();
  }

  private async uIntro(): Promise<void> {
    if (!this.uIntroPhi.value) return;
    const result = (await this.options.api.uIntro(
      Number(this.uIntroPhi.value),
    )) as UIntroResult;
    for (const entry of result.introduced) {
      const clusters = entry.clusters
        .map((members) => `{${members.join(",")}}`)
        .join(" ");
      this.say(`hypothesis ${entry.upsilon}: clusters ${clusters}`);
    }
    for (const warning of result.warnings ?? []) {
      this.say(`warning: ${warning}`);
    }
    this.say(`worlds: ${result.worlds}`);
    this.options.onMutated();
  }

  private say(line: string): void {
    this.log.textContent = `${line}\n` + this.log.textContent;
  }
}
