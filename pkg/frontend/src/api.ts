import type {
  ApiErrorBody,
  DocumentInfo,
  DocumentList,
  HighlightResponse,
  QueryResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseError(resp: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `request failed with status ${resp.status}`;
  try {
    const body = (await resp.json()) as ApiErrorBody;
    if (body.error) {
      code = body.error.code;
      message = body.error.message;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(resp.status, code, message);
}

/** Thin client over the search service; `fetchFn` is injectable for tests. */
export class SearchApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, { signal });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  async query(
    text: string,
    alpha?: number,
    maxBlocks?: number,
    signal?: AbortSignal,
  ): Promise<QueryResponse> {
    const body: Record<string, unknown> = { text };
    if (alpha !== undefined) body.alpha = alpha;
    if (maxBlocks !== undefined) body.max_blocks = maxBlocks;
    const resp = await this.fetchFn(this.baseUrl + "/query", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as QueryResponse;
  }

  listDocuments(signal?: AbortSignal): Promise<DocumentList> {
    return this.get<DocumentList>("/docs", signal);
  }

  getDocument(docId: string, signal?: AbortSignal): Promise<DocumentInfo> {
    return this.get<DocumentInfo>(`/docs/${encodeURIComponent(docId)}`, signal);
  }

  getHighlights(
    docId: string,
    queryId: string,
    signal?: AbortSignal,
  ): Promise<HighlightResponse> {
    const path =
      `/docs/${encodeURIComponent(docId)}/highlights` +
      `?query_id=${encodeURIComponent(queryId)}`;
    return this.get<HighlightResponse>(path, signal);
  }
}
