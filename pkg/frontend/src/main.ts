/** Browser entry point: boots the app against a service on the same origin
 * (override with ?api=http://host:port) for a user named in ?user=. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "");
const app = new App(api, {
  userId: params.get("user") ?? "demo",
  pin: {
    lat: Number(params.get("lat") ?? 63.4305),
    lon: Number(params.get("lon") ?? 10.3951),
  },
});

const root = document.getElementById("app");
if (root) {
  app.mount(root);
  void app.fetchFeed().catch(() => undefined);
}
