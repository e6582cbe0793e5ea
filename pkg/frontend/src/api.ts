import type {
  CandidatePage,
  GateDecision,
  ReviewSubmission,
  Stats,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function raise(resp: Response): Promise<never> {
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, detail);
}

export class ReviewApi {
  constructor(private readonly baseUrl: string = "") {}

  async candidates(
    state = "unreviewed",
    page = 1,
    pageSize = 20,
  ): Promise<CandidatePage> {
    const params = new URLSearchParams({
      state,
      page: String(page),
      page_size: String(pageSize),
    });
    const resp = await fetch(`${this.baseUrl}/candidates?${params}`);
    if (!resp.ok) await raise(resp);
    return (await resp.json()) as CandidatePage;
  }

  async submitReview(review: ReviewSubmission): Promise<GateDecision> {
    const resp = await fetch(`${this.baseUrl}/reviews`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(review),
    });
    if (!resp.ok) await raise(resp);
    return (await resp.json()) as GateDecision;
  }

  async stats(): Promise<Stats> {
    const resp = await fetch(`${this.baseUrl}/stats`);
    if (!resp.ok) await raise(resp);
    return (await resp.json()) as Stats;
  }
}
