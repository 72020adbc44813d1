// WebSocket bridge client with automatic reconnect.
//
// The socket constructor is injected so the same class runs in the
// browser (global WebSocket) and under node tests (the `ws` package).
// On every (re)connect the bridge replays retained topics first, which
// is all the dashboard needs to repaint; no history is replayed.
const BACKOFF_START_MS = 500;
const BACKOFF_CAP_MS = 5000;
export class BridgeClient {
    url;
    callbacks;
    SocketImpl;
    socket = null;
    retryMs = BACKOFF_START_MS;
    retryTimer = null;
    stopped = false;
    constructor(url, callbacks, SocketImpl = globalThis.WebSocket) {
        this.url = url;
        this.callbacks = callbacks;
        this.SocketImpl = SocketImpl;
        if (!this.SocketImpl) {
            throw new Error("no WebSocket implementation available, pass one in");
        }
    }
    start() {
        this.stopped = false;
        this.open();
    }
    stop() {
        this.stopped = true;
        if (this.retryTimer)
            clearTimeout(this.retryTimer);
        this.retryTimer = null;
        const s = this.socket;
        this.socket = null;
        if (s) {
            s.onclose = null;
            s.close();
        }
        this.callbacks.onStatus("offline");
    }
    send(frame) {
        if (!this.socket)
            return false;
        try {
            this.socket.send(JSON.stringify(frame));
            return true;
        }
        catch {
            return false;
        }
    }
    open() {
        this.callbacks.onStatus("reconnecting");
        let sock;
        try {
            sock = new this.SocketImpl(this.url);
        }
        catch {
            this.scheduleRetry();
            return;
        }
        this.socket = sock;
        sock.onopen = () => {
            this.retryMs = BACKOFF_START_MS;
            this.callbacks.onStatus("connected");
        };
        sock.onmessage = (ev) => {
            let parsed;
            try {
                parsed = JSON.parse(String(ev.data));
            }
            catch {
                this.callbacks.onGarbage?.(ev.data);
                return;
            }
            if (typeof parsed === "object" &&
                parsed !== null &&
                typeof parsed.topic === "string") {
                this.callbacks.onFrame(parsed);
            }
            else {
                // bridge error frames ({"error": ...}) land here too
                this.callbacks.onGarbage?.(parsed);
            }
        };
        sock.onerror = () => {
            /* onclose always follows, retry happens there */
        };
        sock.onclose = () => {
            this.socket = null;
            if (!this.stopped)
                this.scheduleRetry();
        };
    }
    scheduleRetry() {
        this.callbacks.onStatus("reconnecting");
        if (this.retryTimer)
            clearTimeout(this.retryTimer);
        this.retryTimer = setTimeout(() => {
            this.retryTimer = null;
            if (!this.stopped)
                this.open();
        }, this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, BACKOFF_CAP_MS);
    }
}
