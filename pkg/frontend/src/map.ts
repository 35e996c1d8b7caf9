/** Map view: an SVG panel with a draggable session pin and one marker per
 * fetched item — the identical array the list view renders.
 *
 * There is no tile server here; the panel is a local equirectangular
 * projection centered on the session pin, spanning twice the filter radius.
 * Items whose location the client knows (it posted them, or a test seeded
 * the catalog) are placed truthfully; unknown items fall back to a
 * deterministic ring position by rank so the pin set still mirrors the list.
 */

import type { SessionStore } from "./state.js";
import type { GeoPoint } from "./types.js";

export const MAP_SIZE = 400; // px, square viewport
export const SPAN_KM = 10; // viewport edge ≈ 2 × 5 km filter radius

const KM_PER_DEG_LAT = (Math.PI * 6371.0) / 180.0;

export function project(center: GeoPoint, p: GeoPoint): { x: number; y: number } {
  const kmPerDegLon = KM_PER_DEG_LAT * Math.cos((center.lat * Math.PI) / 180.0);
  const dxKm = (p.lon - center.lon) * kmPerDegLon;
  const dyKm = (p.lat - center.lat) * KM_PER_DEG_LAT;
  return {
    x: MAP_SIZE / 2 + (dxKm / SPAN_KM) * MAP_SIZE,
    y: MAP_SIZE / 2 - (dyKm / SPAN_KM) * MAP_SIZE,
  };
}

export function unproject(center: GeoPoint, x: number, y: number): GeoPoint {
  const kmPerDegLon = KM_PER_DEG_LAT * Math.cos((center.lat * Math.PI) / 180.0);
  const dxKm = ((x - MAP_SIZE / 2) / MAP_SIZE) * SPAN_KM;
  const dyKm = ((MAP_SIZE / 2 - y) / MAP_SIZE) * SPAN_KM;
  return {
    lat: center.lat + dyKm / KM_PER_DEG_LAT,
    lon: center.lon + dxKm / kmPerDegLon,
  };
}

/** Fallback position for items with unknown coordinates: evenly spaced on a
 * ring inside the radius circle, ordered by rank. Deterministic so repeated
 * renders are stable. */
function ringPosition(rank: number, total: number): { x: number; y: number } {
  const angle = (2 * Math.PI * rank) / Math.max(1, total);
  const r = MAP_SIZE * 0.3;
  return {
    x: MAP_SIZE / 2 + r * Math.cos(angle),
    y: MAP_SIZE / 2 + r * Math.sin(angle),
  };
}

const SVG_NS = "http://www.w3.org/2000/svg";

export type PinDragHandler = (pin: GeoPoint) => void;

export function renderMap(
  root: HTMLElement,
  store: SessionStore,
  onPinMoved: PinDragHandler,
): void {
  root.textContent = "";
  const state = store.current;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${MAP_SIZE} ${MAP_SIZE}`);
  svg.setAttribute("width", String(MAP_SIZE));
  svg.setAttribute("height", String(MAP_SIZE));
  svg.setAttribute("data-role", "map");

  // filter-radius circle around the session pin
  const radius = document.createElementNS(SVG_NS, "circle");
  radius.setAttribute("cx", String(MAP_SIZE / 2));
  radius.setAttribute("cy", String(MAP_SIZE / 2));
  radius.setAttribute("r", String((5 / SPAN_KM) * MAP_SIZE));
  radius.setAttribute("class", "radius-circle");
  svg.appendChild(radius);

  const items = store.visibleItems;
  items.forEach((item, i) => {
    const known = store.catalog.get(item.news_id);
    const pos = known
      ? project(state.pin, known.location)
      : ringPosition(i, items.length);
    const marker = document.createElementNS(SVG_NS, "circle");
    marker.setAttribute("cx", String(pos.x));
    marker.setAttribute("cy", String(pos.y));
    marker.setAttribute("r", "6");
    marker.setAttribute("class", "item-pin");
    marker.setAttribute("data-news-id", item.news_id);
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${known?.description ?? item.news_id} (score ${item.score.toFixed(3)})`;
    marker.appendChild(title);
    svg.appendChild(marker);
  });

  // draggable session pin, drawn last so it stays on top
  const pin = document.createElementNS(SVG_NS, "circle");
  pin.setAttribute("cx", String(MAP_SIZE / 2));
  pin.setAttribute("cy", String(MAP_SIZE / 2));
  pin.setAttribute("r", "8");
  pin.setAttribute("class", "session-pin");
  pin.setAttribute("data-role", "session-pin");
  svg.appendChild(pin);

  let dragging = false;
  const toLocal = (ev: PointerEvent): { x: number; y: number } => {
    const rect = svg.getBoundingClientRect();
    const scale = rect.width > 0 ? MAP_SIZE / rect.width : 1;
    return { x: (ev.clientX - rect.left) * scale, y: (ev.clientY - rect.top) * scale };
  };
  pin.addEventListener("pointerdown", () => {
    dragging = true;
  });
  svg.addEventListener("pointermove", (ev: Event) => {
    if (!dragging) return;
    const { x, y } = toLocal(ev as PointerEvent);
    pin.setAttribute("cx", String(x));
    pin.setAttribute("cy", String(y));
  });
  svg.addEventListener("pointerup", (ev: Event) => {
    if (!dragging) return;
    dragging = false;
    const { x, y } = toLocal(ev as PointerEvent);
    onPinMoved(unproject(state.pin, x, y));
  });

  root.appendChild(svg);
}
