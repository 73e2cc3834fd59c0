/** Shared types mirroring the query service's wire contract. */

/** The 13 result columns, in the exact order the service emits them. */
export const RESULT_COLUMNS = [
  "id",
  "entity",
  "entity_id",
  "type",
  "date",
  "url",
  "ner_tool",
  "paragraph",
  "sentence",
  "sentiment_score",
  "sentiment_tool",
  "media_name",
  "media_url",
] as const;

export type ResultColumn = (typeof RESULT_COLUMNS)[number];

export type Scope = "ARTICLE" | "PARAGRAPH" | "SENTENCE";

export interface PreviewRow {
  id: number;
  entity: string;
  entity_id: number;
  type: "PER" | "LOC" | "ORG";
  date: string;
  url: string;
  ner_tool: string;
  paragraph: number | null;
  sentence: number | null;
  sentiment_score: number;
  sentiment_tool: string;
  media_name: string;
  media_url: string;
}

export interface SearchResponse {
  preview: PreviewRow[];
  total: number;
  export: string;
}

export interface MediaInfo {
  name: string;
  url: string;
}

export interface TaggerMeta {
  ner_tools: string[];
  sentiment_tools: string[];
  scopes: Scope[];
}

export const ALL = "ALL" as const;

export interface AdvancedFilters {
  nerTool?: string;
  sentimentTool?: string;
  scope?: Scope;
}

/**
 * Search-form state. `sources` holds a sorted list of media names or
 * ALL; dates are YYYY-MM-DD or ALL. `advancedVisible` is pure UI state
 * and is derived (any advanced filter set) when a query string is
 * parsed back.
 */
export interface FormState {
  entity: string;
  sources: string[] | typeof ALL;
  dateFrom: string | typeof ALL;
  dateTo: string | typeof ALL;
  advanced: AdvancedFilters;
  advancedVisible: boolean;
}

export function emptyForm(): FormState {
  return {
    entity: "",
    sources: ALL,
    dateFrom: ALL,
    dateTo: ALL,
    advanced: {},
    advancedVisible: false,
  };
}

export interface PreviewView {
  rows: PreviewRow[];
  total: number;
  exportUrl: string;
}
