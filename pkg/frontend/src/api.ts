// Typed client for the review-service JSON API.

export type ItemKind = "identified" | "unidentified";

export interface SubItem {
  item_id: string;
  ability: string;
  ability_display: string;
  kind: ItemKind;
  behavior: string | null;
  rated: boolean;
}

export interface Bundle {
  activity_id: string;
  narrative: string;
  items: SubItem[];
}

export interface Session {
  token: string;
  evaluator_id: string;
  assigned_activities: number;
}

export interface RatingPayload {
  item_id: string;
  semantic_consistency?: boolean;
  ability_relevance?: boolean;
  omission?: boolean;
}

export interface EvaluatorProgress {
  evaluator_id: string;
  assigned: number;
  rated: number;
}

export interface Progress {
  evaluators: EvaluatorProgress[];
  total_assigned: number;
  total_rated: number;
}

export interface ReportRow {
  ability: string;
  total_identified: number;
  semantic_consistency_pct: number | null;
  ability_relevance_pct: number | null;
  accuracy_pct: number | null;
  total_unidentified: number;
  omission_count: number;
  omission_rate_pct: number | null;
}

export interface Report {
  partial: boolean;
  rows: ReportRow[];
  comments: { evaluator_id: string; question: string; text: string }[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (typeof body?.detail === "string") detail = body.detail;
    else if (body?.detail) detail = JSON.stringify(body.detail);
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  private token: string | null = null;

  constructor(private readonly baseUrl: string = "") {}

  private headers(json = true): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  async createSession(evaluatorId: string): Promise<Session> {
    const response = await fetch(`${this.baseUrl}/api/session`, {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify({ evaluator_id: evaluatorId }),
    });
    await raiseForStatus(response);
    const session = (await response.json()) as Session;
    this.token = session.token;
    return session;
  }

  /** Next unrated bundle, or null when the queue is empty. */
  async nextBundle(): Promise<Bundle | null> {
    const response = await fetch(`${this.baseUrl}/api/items/next`, {
      headers: this.headers(false),
    });
    if (response.status === 204) return null;
    await raiseForStatus(response);
    return (await response.json()) as Bundle;
  }

  async submitRating(payload: RatingPayload): Promise<void> {
    const response = await fetch(`${this.baseUrl}/api/ratings`, {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify(payload),
    });
    await raiseForStatus(response);
  }

  async progress(): Promise<Progress> {
    const response = await fetch(`${this.baseUrl}/api/progress`);
    await raiseForStatus(response);
    return (await response.json()) as Progress;
  }

  async report(): Promise<Report> {
    const response = await fetch(`${this.baseUrl}/api/report`);
    await raiseForStatus(response);
    return (await response.json()) as Report;
  }

  async submitComment(
    question: "advantages" | "drawbacks",
    text: string,
  ): Promise<void> {
    const response = await fetch(`${this.baseUrl}/api/comments`, {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify({ question, text }),
    });
    await raiseForStatus(response);
  }
}
