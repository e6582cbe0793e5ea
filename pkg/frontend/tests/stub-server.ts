import { createServer, type Server } from "node:http";
import type { Candidate, Stats } from "../src/types.js";

const CRITERIA = [
  "inflection",
  "word_order",
  "lexical_choice",
  "semantic_coherence",
] as const;

interface StoredReview {
  record_id: string;
  reviewer: string;
  average: number;
}

/**
 * Minimal in-memory stand-in for the review API, mirroring its status
 * codes: 400 invalid body, 404 unknown record, 409 duplicate reviewer.
 */
export class StubServer {
  private server: Server;
  private reviews: StoredReview[] = [];
  candidates: Candidate[] = [];
  statsFixture: Stats | null = null;
  threshold = 7.0;
  port = 0;

  constructor() {
    this.server = createServer((req, res) => {
      void this.route(req.url ?? "", req.method ?? "GET", req, res);
    });
  }

  private async route(
    url: string,
    method: string,
    req: import("node:http").IncomingMessage,
    res: import("node:http").ServerResponse,
  ): Promise<void> {
    const send = (status: number, body: unknown): void => {
      res.writeHead(status, { "Content-Type": "application/json" });
      res.end(JSON.stringify(body));
    };
    if (method === "GET" && url.startsWith("/candidates")) {
      const params = new URL(url, "http://stub").searchParams;
      const state = params.get("state") ?? "unreviewed";
      const items = this.candidates.filter((c) => c.review_state === state);
      send(200, {
        total: items.length,
        page: Number(params.get("page") ?? 1),
        page_size: Number(params.get("page_size") ?? 20),
        candidates: items,
      });
      return;
    }
    if (method === "GET" && url.startsWith("/stats")) {
      if (this.statsFixture) {
        send(200, this.statsFixture);
      } else {
        send(404, { detail: "no reviews to aggregate" });
      }
      return;
    }
    if (method === "POST" && url.startsWith("/reviews")) {
      const chunks: Buffer[] = [];
      for await (const chunk of req) chunks.push(chunk as Buffer);
      const body = JSON.parse(Buffer.concat(chunks).toString()) as Record<
        string,
        unknown
      >;
      for (const criterion of CRITERIA) {
        const value = body[criterion];
        if (
          typeof value !== "number" ||
          value < 0 ||
          value > 10 ||
          !Number.isInteger(value * 2)
        ) {
          send(400, { detail: `${criterion} score invalid` });
          return;
        }
      }
      const recordId = String(body.record_id ?? "");
      const reviewer = String(body.reviewer ?? "");
      if (!this.candidates.some((c) => c.record_id === recordId)) {
        send(404, { detail: `no reviewable record ${recordId}` });
        return;
      }
      if (
        this.reviews.some(
          (r) => r.record_id === recordId && r.reviewer === reviewer,
        )
      ) {
        send(409, { detail: `reviewer ${reviewer} already reviewed ${recordId}` });
        return;
      }
      const average =
        CRITERIA.reduce((acc, c) => acc + (body[c] as number), 0) /
        CRITERIA.length;
      this.reviews.push({ record_id: recordId, reviewer, average });
      const all = this.reviews.filter((r) => r.record_id === recordId);
      const mean = all.reduce((acc, r) => acc + r.average, 0) / all.length;
      const decision = mean >= this.threshold ? "accepted" : "rejected";
      const candidate = this.candidates.find((c) => c.record_id === recordId);
      if (candidate) candidate.review_state = decision;
      send(200, {
        record_id: recordId,
        decision,
        average: mean,
        threshold: this.threshold,
      });
      return;
    }
    send(404, { detail: "not found" });
  }

  async start(): Promise<string> {
    await new Promise<void>((resolve) =>
      this.server.listen(0, "127.0.0.1", resolve),
    );
    const addr = this.server.address();
    if (addr === null || typeof addr === "string") {
      throw new Error("stub server failed to bind");
    }
    this.port = addr.port;
    return `http://127.0.0.1:${this.port}`;
  }

  async stop(): Promise<void> {
    await new Promise<void>((resolve, reject) =>
      this.server.close((err) => (err ? reject(err) : resolve())),
    );
  }
}

export function makeCandidate(
  overrides: Partial<Candidate> = {},
): Candidate {
  return {
    record_id: "g-000001",
    en_text: "the king said to the people",
    ang_text: "se cyning cwæð to ðam folce",
    flags: [],
    style_example_ids: [],
    review_state: "unreviewed",
    provenance: "dual_agent",
    ...overrides,
  };
}
