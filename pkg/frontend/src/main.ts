/** DOM wiring: one render pass per state change, events delegated from
 * the root. The input stays disabled while a turn is in flight, matching
 * the server's one-message-at-a-time contract. */

import { ApiClient } from "./api.js";
import {
  canSend,
  drawerClosed,
  drawerOpened,
  initialState,
  messageSent,
  requestFailed,
  responseReceived,
  sessionStarted,
  type ChatState,
} from "./state.js";
import { renderApp } from "./render.js";

const DEBUG_PANEL = new URLSearchParams(location.search).has("debug");

const api = new ApiClient("");
let state: ChatState = initialState();
const root = document.getElementById("app") as HTMLElement;

function render(): void {
  root.innerHTML = renderApp(state);
  const input = document.getElementById("composer-input") as HTMLInputElement | null;
  if (input && !input.disabled) input.focus();
}

function update(next: ChatState): void {
  state = next;
  render();
}

async function start(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const strategy = params.get("strategy") ?? "es";
  const k = Number(params.get("k") ?? "2");
  try {
    update(sessionStarted(state, await api.createSession(strategy, k)));
  } catch (error) {
    update(requestFailed(state, error));
  }
}

async function send(text: string): Promise<void> {
  if (!canSend(state) || !text.trim() || state.sessionId === null) return;
  const sessionId = state.sessionId;
  update(messageSent(state, text));
  try {
    const response = await api.sendMessage(sessionId, text, DEBUG_PANEL);
    update(responseReceived(state, response));
  } catch (error) {
    update(requestFailed(state, error));
  }
}

root.addEventListener("submit", (event) => {
  event.preventDefault();
  const input = document.getElementById("composer-input") as HTMLInputElement | null;
  if (!input) return;
  const text = input.value;
  input.value = "";
  void send(text);
});

root.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const card = target.closest<HTMLElement>(".card[data-item-id]");
  if (card && card.dataset.itemId) {
    update(drawerOpened(state, card.dataset.itemId));
    return;
  }
  if (target.closest("[data-action='close-drawer']")) {
    update(drawerClosed(state));
  }
});

render();
void start();
