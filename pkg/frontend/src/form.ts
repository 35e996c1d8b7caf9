/** Post-news form with inline validation.
 *
 * Client-side checks (description, category, location present; lat/lon in
 * range) run before any network traffic: an invalid form sends no request.
 * Server-side 400s carry a `field` name, which is surfaced next to the
 * matching input.
 */

import type { GeoPoint, NewsDraft } from "./types.js";

export interface FormValues {
  description: string;
  category: string;
  channel: string;
  hashtags: string;
  lat: string;
  lon: string;
}

export type FieldErrors = Partial<Record<keyof FormValues, string>>;

export function validateForm(values: FormValues): FieldErrors {
  const errors: FieldErrors = {};
  if (!values.description.trim()) errors.description = "description is required";
  if (!values.category.trim()) errors.category = "category is required";
  if (!values.lat.trim() || !values.lon.trim()) {
    errors.lat = "location is required — drop the pin or type coordinates";
  } else {
    const lat = Number(values.lat);
    const lon = Number(values.lon);
    if (!Number.isFinite(lat) || lat < -90 || lat > 90) {
      errors.lat = "lat must be in [-90, 90]";
    }
    if (!Number.isFinite(lon) || lon < -180 || lon > 180) {
      errors.lon = "lon must be in [-180, 180]";
    }
  }
  return errors;
}

export function draftFromForm(
  values: FormValues,
  authorId: string,
  now: Date,
): NewsDraft {
  const location: GeoPoint = { lat: Number(values.lat), lon: Number(values.lon) };
  const hashtags = values.hashtags
    .split(/[\s,]+/)
    .map((t) => t.replace(/^#/, "").toLowerCase())
    .filter((t) => t.length > 0);
  return {
    id: `n-${now.getTime()}-${Math.floor(Math.random() * 1e6)}`,
    description: values.description.trim(),
    category: values.category.trim(),
    channel: values.channel.trim() || "local",
    hashtags: [...new Set(hashtags)],
    location,
    created_at: now.toISOString(),
    author_id: authorId,
  };
}

function field(name: keyof FormValues, label: string, value = ""): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  wrap.textContent = label;
  const input = document.createElement("input");
  input.name = name;
  input.value = value;
  wrap.appendChild(input);
  const err = document.createElement("span");
  err.className = "field-error";
  err.dataset.errorFor = name;
  wrap.appendChild(err);
  return wrap;
}

export function readValues(form: HTMLFormElement): FormValues {
  const get = (name: string): string =>
    (form.querySelector(`input[name="${name}"]`) as HTMLInputElement).value;
  return {
    description: get("description"),
    category: get("category"),
    channel: get("channel"),
    hashtags: get("hashtags"),
    lat: get("lat"),
    lon: get("lon"),
  };
}

export function showErrors(form: HTMLFormElement, errors: FieldErrors): void {
  for (const span of form.querySelectorAll<HTMLElement>(".field-error")) {
    const name = span.dataset.errorFor as keyof FormValues;
    span.textContent = errors[name] ?? "";
  }
}

export type SubmitHandler = (values: FormValues) => void;

export function renderForm(
  root: HTMLElement,
  pin: GeoPoint,
  onSubmit: SubmitHandler,
): HTMLFormElement {
  root.textContent = "";
  const form = document.createElement("form");
  form.dataset.role = "post-news";
  form.appendChild(field("description", "Description"));
  form.appendChild(field("category", "Category"));
  form.appendChild(field("channel", "Channel", "local"));
  form.appendChild(field("hashtags", "Hashtags"));
  form.appendChild(field("lat", "Latitude", String(pin.lat)));
  form.appendChild(field("lon", "Longitude", String(pin.lon)));
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Post";
  form.appendChild(submit);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    onSubmit(readValues(form));
  });
  root.appendChild(form);
  return form;
}
