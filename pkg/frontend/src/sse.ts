/** Server-sent-events client built on fetch.
 *
 *  Node 20 has no EventSource, and the dashboard's tests run under Node
 *  against a live server, so the stream is parsed by hand from the response
 *  body. The parser handles arbitrary chunk boundaries, CRLF line endings,
 *  comment lines (the server's ": keepalive" ticks), multi-line data fields,
 *  and the last-event-id carrying over between frames.
 */

export interface SseMessage {
  /** Last id seen on the stream at dispatch time (EventSource semantics). */
  id: string | null;
  event: string;
  data: string;
}

export async function* parseSseStream(
  body: ReadableStream<Uint8Array>,
): AsyncGenerator<SseMessage> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  let lastId: string | null = null;
  let event = "message";
  let data: string[] = [];

  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) {
        return; // an unterminated trailing frame is never dispatched
      }
      buffer += decoder.decode(value, { stream: true });
      let newline: number;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        let line = buffer.slice(0, newline);
        buffer = buffer.slice(newline + 1);
        if (line.endsWith("\r")) {
          line = line.slice(0, -1);
        }
        if (line === "") {
          if (data.length > 0) {
            yield { id: lastId, event, data: data.join("\n") };
          }
          event = "message";
          data = [];
          continue;
        }
        if (line.startsWith(":")) {
          continue; // comment / keepalive
        }
        const colon = line.indexOf(":");
        const field = colon < 0 ? line : line.slice(0, colon);
        let value = colon < 0 ? "" : line.slice(colon + 1);
        if (value.startsWith(" ")) {
          value = value.slice(1);
        }
        if (field === "id") {
          lastId = value;
        } else if (field === "event") {
          event = value;
        } else if (field === "data") {
          data.push(value);
        }
        // other fields (retry, ...) are ignored
      }
    }
  } finally {
    reader.releaseLock();
  }
}

export interface SubscribeOptions {
  /** Replay cursor, consulted on every (re)connect so a reconnect resumes
   *  from whatever the caller has already applied. */
  since: () => number;
  onMessage: (message: SseMessage) => void;
  /** Called with true once a stream is open, false when it drops. */
  onConnection?: (connected: boolean) => void;
  signal?: AbortSignal;
  retryDelayMs?: number;
}

function delay(ms: number, signal?: AbortSignal): Promise<void> {
  return new Promise((resolve) => {
    const timer = setTimeout(done, ms);
    function done(): void {
      clearTimeout(timer);
      signal?.removeEventListener("abort", done);
      resolve();
    }
    signal?.addEventListener("abort", done);
  });
}

/** Keep an event subscription alive until aborted, reconnecting with a fixed
 *  backoff and resuming from options.since() each time. */
export async function subscribeEvents(
  baseUrl: string,
  options: SubscribeOptions,
): Promise<void> {
  const retryDelayMs = options.retryDelayMs ?? 2000;
  const { signal } = options;
  while (!signal?.aborted) {
    let opened = false;
    try {
      const response = await fetch(
        `${baseUrl}/api/events?since=${options.since()}`,
        { headers: { Accept: "text/event-stream" }, signal },
      );
      if (!response.ok || response.body === null) {
        throw new ApiUnavailable(`event stream rejected: ${response.status}`);
      }
      opened = true;
      options.onConnection?.(true);
      for await (const message of parseSseStream(response.body)) {
        options.onMessage(message);
      }
      // server closed the stream cleanly; reconnect below
    } catch {
      if (signal?.aborted) {
        break;
      }
    }
    if (opened) {
      options.onConnection?.(false);
    }
    await delay(retryDelayMs, signal);
  }
}

class ApiUnavailable extends Error {}
