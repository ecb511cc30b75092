/** View state and the gating rules that mirror the service's stages.
 *
 * The server is the authority; these predicates only decide which
 * controls are live, so that an enabled control can never draw a 409.
 */

import type { Catalog } from "./api.js";

export type Tab = "etl" | "management" | "analytics";

export function stagesFor(catalog: Catalog, phi: number): string[] {
  return catalog.stages.filter((s) => s.phi === phi).map((s) => s.stage);
}

/** Analytics needs u-introduced data for the chosen phenomenon. */
export function analyticsEnabled(catalog: Catalog, phi: number | null): boolean {
  if (phi === null) return false;
  return stagesFor(catalog, phi).some(
    (stage) => stage === "u-introduced" || stage === "conditioned",
  );
}

/** Registration closes for good once any uncertainty is introduced. */
export function catalogFrozen(catalog: Catalog): boolean {
  return catalog.stages.some(
    (s) => s.stage === "u-introduced" || s.stage === "conditioned",
  );
}

/** Trials can still be loaded for a pairing that is not introduced yet. */
export function trialsOpen(catalog: Catalog, phi: number, upsilon: number): boolean {
  const entry = catalog.stages.find(
    (s) => s.phi === phi && s.upsilon === upsilon,
  );
  return entry !== undefined &&
    (entry.stage === "deployed" || entry.stage === "loaded");
}

/** u-intro is offered only while every pairing of phi still accepts it. */
export function uIntroOpen(catalog: Catalog, phi: number): boolean {
  const stages = stagesFor(catalog, phi);
  return stages.length > 0 &&
    stages.every((s) => s === "deployed" || s === "loaded") &&
    stages.some((s) => s === "loaded");
}

export function fmt3(value: number): string {
  return value.toFixed(3);
}

/** Observed and predicted values get two decimals. */
export function fmt2(value: number): string {
  return value.toFixed(2);
}
