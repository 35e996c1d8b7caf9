/** Single source of truth for the browser session.
 *
 * Both the map and the list render from `items`, which always holds the most
 * recent completed fetch: every fetch gets a monotonically increasing token
 * and stale responses are dropped (latest wins, at most one applied).
 */

import type { GeoPoint, Recommendation } from "./types.js";

export type ViewKind = "map" | "list";

export interface KnownItem {
  location: GeoPoint;
  description: string;
  category: string;
}

export interface SessionState {
  userId: string;
  pin: GeoPoint;
  view: ViewKind;
  items: Recommendation[];
  /** ids marked read this session; greyed out until the next refetch. */
  readIds: Set<string>;
  /** ids dismissed this session; hidden locally until the next refetch. */
  dismissedIds: Set<string>;
  /** ids with an event POST currently in flight; blocks duplicate gestures. */
  pendingIds: Set<string>;
  lastError: string | null;
}

type Listener = (state: SessionState) => void;

export class SessionStore {
  private state: SessionState;
  private listeners: Listener[] = [];
  private fetchToken = 0;
  private appliedToken = 0;
  /** Item metadata the client has seen (e.g. items it posted); used to place
   * map pins at their true location when known. */
  readonly catalog = new Map<string, KnownItem>();

  constructor(userId: string, pin: GeoPoint) {
    this.state = {
      userId,
      pin,
      view: "list",
      items: [],
      readIds: new Set(),
      dismissedIds: new Set(),
      pendingIds: new Set(),
      lastError: null,
    };
  }

  get current(): SessionState {
    return this.state;
  }

  /** Items to display: the latest fetch minus locally dismissed ones. */
  get visibleItems(): Recommendation[] {
    return this.state.items.filter((r) => !this.state.dismissedIds.has(r.news_id));
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private update(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  setPin(pin: GeoPoint): void {
    this.update({ pin });
  }

  setView(view: ViewKind): void {
    this.update({ view });
  }

  setError(message: string | null): void {
    this.update({ lastError: message });
  }

  /** Reserve a token before starting a fetch. */
  beginFetch(): number {
    return ++this.fetchToken;
  }

  /** Apply a completed fetch; returns false (and changes nothing) unless the
   * token belongs to the most recently started fetch (latest wins). */
  applyFetch(token: number, items: Recommendation[]): boolean {
    if (token !== this.fetchToken || token <= this.appliedToken) return false;
    this.appliedToken = token;
    this.update({
      items,
      readIds: new Set(),
      dismissedIds: new Set(),
      lastError: null,
    });
    return true;
  }

  /** Mark a gesture in flight; returns false when one is already pending for
   * the item (double-click guard: at most one POST per gesture). */
  beginGesture(newsId: string): boolean {
    if (this.state.pendingIds.has(newsId)) return false;
    const pendingIds = new Set(this.state.pendingIds);
    pendingIds.add(newsId);
    this.update({ pendingIds });
    return true;
  }

  endGesture(newsId: string): void {
    const pendingIds = new Set(this.state.pendingIds);
    pendingIds.delete(newsId);
    this.update({ pendingIds });
  }

  markRead(newsId: string): void {
    const readIds = new Set(this.state.readIds);
    readIds.add(newsId);
    this.update({ readIds });
  }

  unmarkRead(newsId: string): void {
    const readIds = new Set(this.state.readIds);
    readIds.delete(newsId);
    this.update({ readIds });
  }

  markDismissed(newsId: string): void {
    const dismissedIds = new Set(this.state.dismissedIds);
    dismissedIds.add(newsId);
    this.update({ dismissedIds });
  }

  unmarkDismissed(newsId: string): void {
    const dismissedIds = new Set(this.state.dismissedIds);
    dismissedIds.delete(newsId);
    this.update({ dismissedIds });
  }

  remember(newsId: string, item: KnownItem): void {
    this.catalog.set(newsId, item);
  }
}
