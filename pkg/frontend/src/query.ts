/** FormState <-> service query-string translation.
 *
 * The grammar is the service's documented parameter set:
 * entity, sources (repeated), from, to, ner_tool, sentiment_tool, scope.
 * ALL and unset values are simply omitted.
 */

import { ALL, FormState, Scope } from "./types.js";

const SCOPES: Scope[] = ["ARTICLE", "PARAGRAPH", "SENTENCE"];
const DATE_SHAPE = /^\d{4}-\d{2}-\d{2}$/;

export class FormValidationError extends Error {}

/** Reject inconsistent form state before any request is built. */
export function validateForm(form: FormState): void {
  if (form.sources !== ALL && form.sources.length === 0) {
    throw new FormValidationError("select at least one source or All Available Sources");
  }
  for (const d of [form.dateFrom, form.dateTo]) {
    if (d !== ALL && !DATE_SHAPE.test(d)) {
      throw new FormValidationError(`dates must be YYYY-MM-DD, got "${d}"`);
    }
  }
  if (form.dateFrom !== ALL && form.dateTo !== ALL && form.dateFrom > form.dateTo) {
    throw new FormValidationError(`"from" date ${form.dateFrom} is after "to" date ${form.dateTo}`);
  }
  if (form.advanced.scope !== undefined && !SCOPES.includes(form.advanced.scope)) {
    throw new FormValidationError(`unknown scope ${String(form.advanced.scope)}`);
  }
}

/** Serialize a valid form to the service's query component. */
export function buildQuery(form: FormState): string {
  validateForm(form);
  const params = new URLSearchParams();
  if (form.entity !== "") {
    params.set("entity", form.entity);
  }
  if (form.sources !== ALL) {
    for (const source of [...form.sources].sort()) {
      params.append("sources", source);
    }
  }
  if (form.dateFrom !== ALL) {
    params.set("from", form.dateFrom);
  }
  if (form.dateTo !== ALL) {
    params.set("to", form.dateTo);
  }
  if (form.advanced.nerTool !== undefined) {
    params.set("ner_tool", form.advanced.nerTool);
  }
  if (form.advanced.sentimentTool !== undefined) {
    params.set("sentiment_tool", form.advanced.sentimentTool);
  }
  if (form.advanced.scope !== undefined) {
    params.set("scope", form.advanced.scope);
  }
  return params.toString();
}

/** Parse a query component back into form state (round-trip inverse). */
export function parseQuery(query: string): FormState {
  const params = new URLSearchParams(query);
  const sources = params.getAll("sources");
  const advanced: FormState["advanced"] = {};
  const nerTool = params.get("ner_tool");
  if (nerTool !== null) advanced.nerTool = nerTool;
  const sentimentTool = params.get("sentiment_tool");
  if (sentimentTool !== null) advanced.sentimentTool = sentimentTool;
  const scope = params.get("scope");
  if (scope !== null) advanced.scope = scope as Scope;
  return {
    entity: params.get("entity") ?? "",
    sources: sources.length > 0 ? sources : ALL,
    dateFrom: params.get("from") ?? ALL,
    dateTo: params.get("to") ?? ALL,
    advanced,
    advancedVisible: Object.keys(advanced).length > 0,
  };
}
