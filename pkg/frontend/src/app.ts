/** Search-page controller: reads the form, keeps one search in flight,
 * renders previews and error banners. */

import { ApiClient, ServiceError } from "./api.js";
import { buildQuery, FormValidationError } from "./query.js";
import { renderBanner, renderResults } from "./render.js";
import { ALL, FormState, Scope, emptyForm } from "./types.js";

interface Elements {
  form: HTMLFormElement;
  entity: HTMLInputElement;
  sourceBoxes: () => HTMLInputElement[];
  allSources: HTMLInputElement;
  dateFrom: HTMLInputElement;
  dateTo: HTMLInputElement;
  allDates: HTMLInputElement;
  advancedToggle: HTMLAnchorElement;
  advancedPanel: HTMLElement;
  nerTool: HTMLSelectElement;
  sentimentTool: HTMLSelectElement;
  scope: HTMLSelectElement;
  results: HTMLElement;
  banner: HTMLElement;
}

function grab(root: Document): Elements {
  const byId = <T extends HTMLElement>(id: string) => root.getElementById(id) as T;
  return {
    form: byId<HTMLFormElement>("search-form"),
    entity: byId<HTMLInputElement>("entity"),
    sourceBoxes: () =>
      Array.from(root.querySelectorAll<HTMLInputElement>("input[name=source]")),
    allSources: byId<HTMLInputElement>("all-sources"),
    dateFrom: byId<HTMLInputElement>("date-from"),
    dateTo: byId<HTMLInputElement>("date-to"),
    allDates: byId<HTMLInputElement>("all-dates"),
    advancedToggle: byId<HTMLAnchorElement>("advanced-toggle"),
    advancedPanel: byId<HTMLElement>("advanced-panel"),
    nerTool: byId<HTMLSelectElement>("ner-tool"),
    sentimentTool: byId<HTMLSelectElement>("sentiment-tool"),
    scope: byId<HTMLSelectElement>("scope"),
    results: byId<HTMLElement>("results"),
    banner: byId<HTMLElement>("banner"),
  };
}

export function readForm(els: Elements): FormState {
  const form = emptyForm();
  form.entity = els.entity.value.trim();
  if (!els.allSources.checked) {
    form.sources = els
      .sourceBoxes()
      .filter((box) => box.checked)
      .map((box) => box.value)
      .sort();
  }
  if (!els.allDates.checked) {
    if (els.dateFrom.value) form.dateFrom = els.dateFrom.value;
    if (els.dateTo.value) form.dateTo = els.dateTo.value;
  }
  form.advancedVisible = !els.advancedPanel.hidden;
  if (form.advancedVisible) {
    if (els.nerTool.value) form.advanced.nerTool = els.nerTool.value;
    if (els.sentimentTool.value) form.advanced.sentimentTool = els.sentimentTool.value;
    if (els.scope.value) form.advanced.scope = els.scope.value as Scope;
  }
  return form;
}

function fillSelect(select: HTMLSelectElement, values: string[]): void {
  select.innerHTML = '<option value="">(any)</option>';
  for (const value of values) {
    const option = select.ownerDocument.createElement("option");
    option.value = value;
    option.textContent = value;
    select.appendChild(option);
  }
}

export function initApp(root: Document, client: ApiClient = new ApiClient()): void {
  const els = grab(root);
  let inFlight: AbortController | null = null;

  void client
    .sources()
    .then((media) => {
      const container = root.getElementById("source-boxes") as HTMLElement;
      container.innerHTML = "";
      for (const m of media) {
        const label = root.createElement("label");
        const box = root.createElement("input");
        box.type = "checkbox";
        box.name = "source";
        box.value = m.name;
        label.appendChild(box);
        label.appendChild(root.createTextNode(` ${m.name}`));
        container.appendChild(label);
      }
    })
    .catch(() => {
      els.banner.innerHTML = renderBanner("could not load source list", "info");
    });

  void client
    .taggers()
    .then((meta) => {
      fillSelect(els.nerTool, meta.ner_tools);
      fillSelect(els.sentimentTool, meta.sentiment_tools);
      fillSelect(els.scope, meta.scopes);
    })
    .catch(() => {
      // advanced filters stay free-form if meta is unavailable
    });

  els.advancedToggle.addEventListener("click", (event) => {
    event.preventDefault();
    els.advancedPanel.hidden = !els.advancedPanel.hidden;
  });

  els.form.addEventListener("submit", (event) => {
    event.preventDefault();
    els.banner.innerHTML = "";
    let form: FormState;
    try {
      form = readForm(els);
      buildQuery(form); // validation happens here; nothing is sent on failure
    } catch (err) {
      if (err instanceof FormValidationError) {
        els.banner.innerHTML = renderBanner(err.message);
        return;
      }
      throw err;
    }
    inFlight?.abort(); // a new submission cancels the previous request
    const controller = new AbortController();
    inFlight = controller;
    client
      .search(form, controller.signal)
      .then((response) => {
        if (controller.signal.aborted) return;
        els.results.innerHTML = renderResults({
          rows: response.preview,
          total: response.total,
          exportUrl: client.exportUrl(response.export),
        });
      })
      .catch((err) => {
        if (controller.signal.aborted) return;
        const message =
          err instanceof ServiceError ? err.message : "search failed; service unreachable";
        els.banner.innerHTML = renderBanner(message);
      });
  });
}
