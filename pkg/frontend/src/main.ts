import { ApiError, fetchVictims, postStatus } from "./api.js";
import { resolveBaseUrl } from "./config.js";
import { subscribeEvents } from "./sse.js";
import { DashboardStore } from "./store.js";
import type { ServerEventWire } from "./types.js";
import { render } from "./ui.js";

const RESPONDER_ID = `responder-${Math.random().toString(36).slice(2, 8)}`;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function boot(): Promise<void> {
  const baseUrl = resolveBaseUrl();
  const store = new DashboardStore();
  const root = document.getElementById("app");
  if (root === null) {
    throw new Error("missing #app mount point");
  }

  const redraw = (): void =>
    render(root, store, {
      onAction: (victimId) => void advanceStatus(victimId),
      onSelect: (victimId) => {
        store.select(store.selectedVictimId === victimId ? null : victimId);
        redraw();
      },
    });

  async function advanceStatus(victimId: string): Promise<void> {
    const requested = store.beginStatus(victimId);
    if (requested === null) {
      return; // terminal row or a mutation already in flight
    }
    redraw();
    try {
      const confirmed = await postStatus(baseUrl, victimId, requested, RESPONDER_ID);
      store.confirmStatus(victimId, confirmed);
    } catch (error) {
      if (error instanceof ApiError) {
        store.rollbackStatus(victimId, {
          status: error.status,
          message: error.message,
        });
        if (error.status === 409) {
          // Someone else handled this victim; show the board as the server
          // sees it rather than waiting for the stream to catch us up.
          try {
            store.reset(await fetchVictims(baseUrl));
          } catch {
            // stream replay will converge us anyway
          }
        }
      } else {
        store.rollbackStatus(victimId, { message: String(error) });
      }
    }
    redraw();
  }

  // Initial load: retry with capped exponential backoff until the server
  // answers, showing the disconnected banner in the meantime.
  for (let attempt = 0; ; attempt++) {
    try {
      store.reset(await fetchVictims(baseUrl));
      store.setConnection("connecting");
      break;
    } catch {
      store.setConnection("disconnected");
      redraw();
      await sleep(Math.min(8000, 1000 * 2 ** Math.min(attempt, 3)));
    }
  }
  redraw();

  // Live tail: resumes from the last applied event id on every reconnect.
  void subscribeEvents(baseUrl, {
    since: () => store.lastEventId,
    onMessage: (message) => {
      let event: ServerEventWire;
      try {
        event = JSON.parse(message.data) as ServerEventWire;
      } catch {
        return; // malformed frame
      }
      if (event.kind !== "ReportAdded" && event.kind !== "StatusChanged") {
        return;
      }
      if (store.applyEvent(event)) {
        redraw();
      }
    },
    onConnection: (connected) => {
      store.setConnection(connected ? "live" : "disconnected");
      redraw();
    },
  });
}

void boot();
