/** Types mirroring the documented REST schema. The console reads no field
 * that is absent here; the schema contract test enforces that. */

export interface TokenAttribution {
  token: string;
  weight: number; // in [0, 1]; 1.0 renders at maximum heat
}

export interface Answer {
  text: string;
  score: number;
  doc_id: string;
  chunk_index: number;
  passage_char_start: number;
  passage_char_end: number;
  retrieval_rank: number | null;
  attributions: TokenAttribution[];
}

export interface Highlight {
  text: string;
  char_start: number;
  char_end: number;
  score: number;
  matches: [number, number][]; // char offsets into text
}

export interface DocumentHit {
  doc_id: string;
  title: string;
  score: number;
  rank: number;
  highlights: Highlight[];
}

export interface ExpansionTerm {
  token: string;
  source_token: string;
  confidence: number;
}

export interface Expansion {
  enabled: boolean;
  candidates: string[];
  terms: ExpansionTerm[];
  effective_terms: string[];
}

export interface QueryResponse {
  answers: Answer[];
  documents: DocumentHit[];
  expansion: Expansion;
  timings: Record<string, number>;
  warnings: string[];
}

export interface RelSnipOverride {
  enabled?: boolean;
  k_frag?: number;
  n?: number;
}

export interface ExpansionOverride {
  enabled?: boolean;
  k_thresh?: number;
  top_n?: number;
}

export interface ReaderOverride {
  stride?: number;
  top_k?: number;
}

export interface QueryRequest {
  question: string;
  context?: string;
  max_documents?: number;
  relsnip?: RelSnipOverride;
  expansion?: ExpansionOverride;
  reader?: ReaderOverride;
}

export type ViewName = "documents" | "answers" | "expansion" | "explanations";
