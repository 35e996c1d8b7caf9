/** Controller: wires the session store, API client and the three panels.
 *
 * All mutation flows through the three operations below — fetchFeed,
 * interact, postNews — so the invariants (latest fetch wins, one POST per
 * gesture, optimistic marks rolled back on failure) live in one place and
 * the views stay dumb renderers.
 */

import { ApiClient, ApiError } from "./api.js";
import { draftFromForm, readValues, renderForm, showErrors, validateForm } from "./form.js";
import { renderList } from "./list.js";
import { renderMap } from "./map.js";
import { SessionStore } from "./state.js";
import type { EventKind, GeoPoint, Recommendation } from "./types.js";

export interface AppOptions {
  userId: string;
  pin: GeoPoint;
  limit?: number;
  seed?: number;
  /** Clock source; override to drive a test-mode server via X-Now. */
  now?: () => string;
}

export class App {
  readonly store: SessionStore;
  private readonly now: () => string;
  private readonly limit: number;
  private readonly seed?: number;

  constructor(
    readonly api: ApiClient,
    options: AppOptions,
  ) {
    this.store = new SessionStore(options.userId, options.pin);
    this.now = options.now ?? (() => new Date().toISOString());
    this.limit = options.limit ?? 20;
    this.seed = options.seed;
  }

  async fetchFeed(): Promise<Recommendation[]> {
    const token = this.store.beginFetch();
    try {
      const items = await this.api.fetchRecommendations({
        userId: this.store.current.userId,
        location: this.store.current.pin,
        limit: this.limit,
        seed: this.seed,
        now: this.now(),
      });
      this.store.applyFetch(token, items);
      return items;
    } catch (err) {
      this.store.setError(err instanceof Error ? err.message : String(err));
      throw err;
    }
  }

  /** One gesture, at most one POST. Optimistic marks (grey-out for read,
   * local removal for dismiss) are rolled back when the server rejects. */
  async interact(item: Recommendation, kind: EventKind): Promise<boolean> {
    const id = item.news_id;
    if (!this.store.beginGesture(id)) return false;
    if (kind === "read") this.store.markRead(id);
    if (kind === "dismiss") this.store.markDismissed(id);
    try {
      await this.api.postEvent(
        {
          user_id: this.store.current.userId,
          news_id: id,
          kind,
          at: this.now(),
          location: this.store.current.pin,
        },
        this.now(),
      );
      return true;
    } catch (err) {
      if (kind === "read") this.store.unmarkRead(id);
      if (kind === "dismiss") this.store.unmarkDismissed(id);
      this.store.setError(err instanceof Error ? err.message : String(err));
      return false;
    } finally {
      this.store.endGesture(id);
    }
  }

  /** Validates locally first: an invalid form sends no request. */
  async postNews(form: HTMLFormElement): Promise<string | null> {
    const values = readValues(form);
    const errors = validateForm(values);
    showErrors(form, errors);
    if (Object.keys(errors).length > 0) return null;
    const draft = draftFromForm(values, this.store.current.userId, new Date(this.now()));
    try {
      const id = await this.api.postNews(draft);
      this.store.remember(id, {
        location: draft.location,
        description: draft.description,
        category: draft.category,
      });
      return id;
    } catch (err) {
      if (err instanceof ApiError && err.field) {
        showErrors(form, { [err.field as keyof typeof values]: err.message });
      } else {
        this.store.setError(err instanceof Error ? err.message : String(err));
      }
      return null;
    }
  }

  mount(root: HTMLElement): void {
    root.textContent = "";
    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    for (const view of ["list", "map"] as const) {
      const btn = document.createElement("button");
      btn.textContent = `${view} view`;
      btn.dataset.view = view;
      btn.addEventListener("click", () => this.store.setView(view));
      toolbar.appendChild(btn);
    }
    const refresh = document.createElement("button");
    refresh.textContent = "refresh";
    refresh.dataset.role = "refresh";
    refresh.addEventListener("click", () => void this.fetchFeed().catch(() => undefined));
    toolbar.appendChild(refresh);
    root.appendChild(toolbar);

    const error = document.createElement("p");
    error.className = "error-bar";
    error.dataset.role = "error";
    root.appendChild(error);

    const panel = document.createElement("div");
    panel.dataset.role = "feed-panel";
    root.appendChild(panel);

    const formRoot = document.createElement("div");
    formRoot.dataset.role = "form-panel";
    root.appendChild(formRoot);
    const form = renderForm(formRoot, this.store.current.pin, () => {
      void this.postNews(form).then((id) => {
        if (id) void this.fetchFeed().catch(() => undefined);
      });
    });

    const render = (): void => {
      error.textContent = this.store.current.lastError ?? "";
      if (this.store.current.view === "map") {
        renderMap(panel, this.store, (pin) => {
          this.store.setPin(pin);
          void this.fetchFeed().catch(() => undefined);
        });
      } else {
        renderList(panel, this.store, (item, kind) => void this.interact(item, kind));
      }
    };
    this.store.subscribe(render);
    render();
  }
}
