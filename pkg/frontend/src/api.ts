/** Typed client for the three read-only search service endpoints.
 *
 * All shapes mirror the server's JSON exactly; nothing is renamed or
 * recomputed on this side.
 */

export type SearchMode = "semantic" | "keyword";
export type ConceptVia = "direct" | "subclass-expansion";

export interface ConceptMatch {
  iri: string;
  label: string;
  via: ConceptVia;
  depth: number;
  strength: number;
}

export interface SearchHit {
  doc_id: string;
  score: number;
  url: string;
  title: string;
  snippet: string;
  concepts: ConceptMatch[];
}

export interface SearchResponse {
  query: string;
  mode: SearchMode;
  fallback: boolean;
  took_ms: number;
  hits: SearchHit[];
}

export interface HealthInfo {
  status: string;
  doc_count: number;
  class_count: number;
}

export interface ClassSummary {
  iri: string;
  label: string;
  synonyms: string[];
}

export interface ClassNode extends ClassSummary {
  equivalent: ClassSummary[];
  children: ClassNode[];
}

export interface ClassTree {
  roots: ClassNode[];
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** What the UI needs from the backend; ApiClient is the HTTP one. */
export interface SearchService {
  health(): Promise<HealthInfo>;
  search(query: string, mode: SearchMode, k?: number): Promise<SearchResponse>;
  classTree(): Promise<ClassTree>;
}

export class ApiClient implements SearchService {
  constructor(private readonly baseUrl: string = "") {}

  health(): Promise<HealthInfo> {
    return this.get<HealthInfo>("/health");
  }

  search(query: string, mode: SearchMode, k = 10): Promise<SearchResponse> {
    const params = new URLSearchParams({ q: query, mode, k: String(k) });
    return this.get<SearchResponse>(`/search?${params.toString()}`);
  }

  classTree(): Promise<ClassTree> {
    return this.get<ClassTree>("/ontology/classes");
  }

  private async get<T>(path: string): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path);
    } catch {
      throw new ApiError("search service unreachable", 0);
    }
    if (!response.ok) {
      // error responses carry {"error": reason}; tolerate anything else
      let message = `${response.status} ${response.statusText}`.trim();
      try {
        const body: unknown = await response.json();
        if (
          typeof body === "object" &&
          body !== null &&
          typeof (body as { error?: unknown }).error === "string"
        ) {
          message = (body as { error: string }).error;
        }
      } catch {
        // keep the status line
      }
      throw new ApiError(message, response.status);
    }
    return (await response.json()) as T;
  }
}
