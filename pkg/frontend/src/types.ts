/** Wire types of the HTTP/JSON search API (see backend README for schema). */

export type ByteSpan = [number, number];

export interface FlaggedBlock {
  doc_id: string;
  bin: number;
  ordinal: number;
  start: number;
  end: number;
  ncd: number;
  unit: number;
}

export interface QueryResponse {
  query_id: string;
  alpha: number;
  flagged: FlaggedBlock[];
  votes: Record<string, number>;
  ranking: string[];
  highlights: Record<string, ByteSpan[]>;
}

export interface DocumentInfo {
  doc_id: string;
  name: string;
  byte_length: number;
  subject_labels: string[];
  source_uri: string;
  text?: string;
}

export interface DocumentList {
  documents: DocumentInfo[];
}

export interface HighlightResponse {
  doc_id: string;
  query_id: string;
  highlights: ByteSpan[];
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
