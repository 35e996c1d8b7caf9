/** Shared shapes mirroring the service's JSON wire format. */

export interface GeoPoint {
  lat: number;
  lon: number;
}

export interface ScoreComponents {
  pref: number;
  social: number;
  recency: number;
  trend: number;
  q_boosted: boolean;
  explored: boolean;
}

export interface Recommendation {
  news_id: string;
  score: number;
  components: ScoreComponents;
}

export interface NewsDraft {
  id: string;
  description: string;
  category: string;
  channel: string;
  hashtags: string[];
  location: GeoPoint;
  created_at: string;
  author_id: string;
  media_ref?: string;
}

export type EventKind = "read" | "like" | "comment" | "dismiss";

export interface UsageEventBody {
  user_id: string;
  news_id: string;
  kind: EventKind;
  at: string;
  location?: GeoPoint;
}

export interface ApiErrorBody {
  error: string;
  message: string;
  field?: string;
}
