// WebSocket bridge client with automatic reconnect.
//
// The socket constructor is injected so the same class runs in the
// browser (global WebSocket) and under node tests (the `ws` package).
// On every (re)connect the bridge replays retained topics first, which
// is all the dashboard needs to repaint; no history is replayed.

import { Frame } from "./contract.js";
import { ConnectionStatus } from "./state.js";

type SocketLike = {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
};

type SocketCtor = new (url: string) => SocketLike;

export interface BridgeCallbacks {
  onFrame: (frame: Frame) => void;
  onStatus: (status: ConnectionStatus) => void;
  onGarbage?: (raw: unknown) => void;
}

const BACKOFF_START_MS = 500;
const BACKOFF_CAP_MS = 5000;

export class BridgeClient {
  private socket: SocketLike | null = null;
  private retryMs = BACKOFF_START_MS;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(
    private url: string,
    private callbacks: BridgeCallbacks,
    private SocketImpl: SocketCtor = (globalThis as any).WebSocket,
  ) {
    if (!this.SocketImpl) {
      throw new Error("no WebSocket implementation available, pass one in");
    }
  }

  start(): void {
    this.stopped = false;
    this.open();
  }

  stop(): void {
    this.stopped = true;
    if (this.retryTimer) clearTimeout(this.retryTimer);
    this.retryTimer = null;
    const s = this.socket;
    this.socket = null;
    if (s) {
      s.onclose = null;
      s.close();
    }
    this.callbacks.onStatus("offline");
  }

  send(frame: Frame): boolean {
    if (!this.socket) return false;
    try {
      this.socket.send(JSON.stringify(frame));
      return true;
    } catch {
      return false;
    }
  }

  private open(): void {
    this.callbacks.onStatus("reconnecting");
    let sock: SocketLike;
    try {
      sock = new this.SocketImpl(this.url);
    } catch {
      this.scheduleRetry();
      return;
    }
    this.socket = sock;

    sock.onopen = () => {
      this.retryMs = BACKOFF_START_MS;
      this.callbacks.onStatus("connected");
    };
    sock.onmessage = (ev) => {
      let parsed: unknown;
      try {
        parsed = JSON.parse(String(ev.data));
      } catch {
        this.callbacks.onGarbage?.(ev.data);
        return;
      }
      if (
        typeof parsed === "object" &&
        parsed !== null &&
        typeof (parsed as Frame).topic === "string"
      ) {
        this.callbacks.onFrame(parsed as Frame);
      } else {
        // bridge error frames ({"error": ...}) land here too
        this.callbacks.onGarbage?.(parsed);
      }
    };
    sock.onerror = () => {
      /* onclose always follows, retry happens there */
    };
    sock.onclose = () => {
      this.socket = null;
      if (!this.stopped) this.scheduleRetry();
    };
  }

  private scheduleRetry(): void {
    this.callbacks.onStatus("reconnecting");
    if (this.retryTimer) clearTimeout(this.retryTimer);
    this.retryTimer = setTimeout(() => {
      this.retryTimer = null;
      if (!this.stopped) this.open();
    }, this.retryMs);
    this.retryMs = Math.min(this.retryMs * 2, BACKOFF_CAP_MS);
  }
}
