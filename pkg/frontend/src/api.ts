/** Thin typed client over the service's HTTP endpoints.
 *
 * The UI talks only to this surface; there is no direct store access. An
 * optional `now` value is forwarded as the X-Now header, which the service
 * honors only when running in test mode — production servers ignore it.
 */

import type {
  ApiErrorBody,
  GeoPoint,
  NewsDraft,
  Recommendation,
  UsageEventBody,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function throwFromResponse(res: Response): Promise<never> {
  let body: Partial<ApiErrorBody> = {};
  try {
    body = (await res.json()) as ApiErrorBody;
  } catch {
    // non-JSON error body; fall through with generic fields
  }
  throw new ApiError(
    res.status,
    body.error ?? "HttpError",
    body.message ?? `request failed with status ${res.status}`,
    body.field,
  );
}

export interface FeedQuery {
  userId: string;
  location: GeoPoint;
  limit?: number;
  seed?: number;
  now?: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private headers(now?: string): Record<string, string> {
    const h: Record<string, string> = { "Content-Type": "application/json" };
    if (now !== undefined) h["X-Now"] = now;
    return h;
  }

  async health(): Promise<boolean> {
    const res = await this.fetchFn(`${this.baseUrl}/v1/health`);
    return res.ok;
  }

  async fetchRecommendations(q: FeedQuery): Promise<Recommendation[]> {
    const params = new URLSearchParams({
      user_id: q.userId,
      lat: String(q.location.lat),
      lon: String(q.location.lon),
    });
    if (q.limit !== undefined) params.set("limit", String(q.limit));
    if (q.seed !== undefined) params.set("seed", String(q.seed));
    const res = await this.fetchFn(
      `${this.baseUrl}/v1/recommendations?${params}`,
      { headers: this.headers(q.now) },
    );
    if (!res.ok) await throwFromResponse(res);
    const body = (await res.json()) as { items: Recommendation[] };
    return body.items;
  }

  async postEvent(event: UsageEventBody, now?: string): Promise<void> {
    const res = await this.fetchFn(`${this.baseUrl}/v1/events`, {
      method: "POST",
      headers: this.headers(now),
      body: JSON.stringify(event),
    });
    if (!res.ok) await throwFromResponse(res);
  }

  async postNews(draft: NewsDraft): Promise<string> {
    const res = await this.fetchFn(`${this.baseUrl}/v1/news`, {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify(draft),
    });
    if (!res.ok) await throwFromResponse(res);
    const body = (await res.json()) as { id: string };
    return body.id;
  }

  async follow(userId: string, followeeId: string): Promise<void> {
    const res = await this.fetchFn(
      `${this.baseUrl}/v1/users/${encodeURIComponent(userId)}/follows`,
      {
        method: "POST",
        headers: this.headers(),
        body: JSON.stringify({ followee_id: followeeId }),
      },
    );
    if (!res.ok) await throwFromResponse(res);
  }

  async profile(userId: string): Promise<Record<string, unknown>> {
    const res = await this.fetchFn(
      `${this.baseUrl}/v1/users/${encodeURIComponent(userId)}/profile`,
    );
    if (!res.ok) await throwFromResponse(res);
    return (await res.json()) as Record<string, unknown>;
  }
}
