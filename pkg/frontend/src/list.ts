/** List view: one card per fetched item with score-component badges and the
 * four interaction buttons. Cards are derived solely from the store's
 * visible items — the same array the map view consumes. */

import type { SessionStore } from "./state.js";
import type { EventKind, Recommendation } from "./types.js";

export type InteractHandler = (item: Recommendation, kind: EventKind) => void;

function badge(label: string, value: number): HTMLElement {
  const span = document.createElement("span");
  span.className = `badge badge-${label}`;
  span.textContent = `${label} ${value.toFixed(3)}`;
  return span;
}

function card(
  store: SessionStore,
  item: Recommendation,
  onInteract: InteractHandler,
): HTMLElement {
  const el = document.createElement("article");
  el.className = "card";
  el.dataset.newsId = item.news_id;
  if (store.current.readIds.has(item.news_id)) el.classList.add("read");

  const known = store.catalog.get(item.news_id);
  const title = document.createElement("h3");
  title.textContent = known?.description || item.news_id;
  el.appendChild(title);

  const score = document.createElement("p");
  score.className = "score";
  score.textContent = `score ${item.score.toFixed(3)}`;
  el.appendChild(score);

  const badges = document.createElement("div");
  badges.className = "badges";
  badges.appendChild(badge("pref", item.components.pref));
  badges.appendChild(badge("social", item.components.social));
  badges.appendChild(badge("recency", item.components.recency));
  badges.appendChild(badge("trend", item.components.trend));
  if (item.components.q_boosted) {
    const b = document.createElement("span");
    b.className = "badge badge-boost";
    b.textContent = "q-boost";
    badges.appendChild(b);
  }
  el.appendChild(badges);

  const actions = document.createElement("div");
  actions.className = "actions";
  for (const kind of ["read", "like", "comment", "dismiss"] as const) {
    const btn = document.createElement("button");
    btn.textContent = kind;
    btn.dataset.kind = kind;
    btn.addEventListener("click", () => onInteract(item, kind));
    actions.appendChild(btn);
  }
  el.appendChild(actions);
  return el;
}

export function renderList(
  root: HTMLElement,
  store: SessionStore,
  onInteract: InteractHandler,
): void {
  root.textContent = "";
  const items = store.visibleItems;
  if (items.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No news nearby right now — move the pin or post something.";
    root.appendChild(empty);
    return;
  }
  for (const item of items) {
    root.appendChild(card(store, item, onInteract));
  }
}
