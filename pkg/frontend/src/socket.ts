// Thin client for the /ws session socket. The WebSocket implementation is
// injectable so the same class runs in the browser (window.WebSocket) and in
// node tests (the "ws" package — same onmessage/onopen surface).

import { SessionEventName, WireMessage, envelope, parseWireMessage } from './protocol.js';

export interface WebSocketish {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: any) => void) | null;
  onmessage: ((ev: { data: any }) => void) | null;
  onclose: ((ev?: any) => void) | null;
  onerror: ((ev?: any) => void) | null;
}

type WsCtor = new (url: string) => WebSocketish;

export type MessageHandler = (msg: WireMessage) => void;

export class ServiceClient {
  readonly url: string;
  private ws: WebSocketish | null = null;
  private handlers: MessageHandler[] = [];
  private WsImpl: WsCtor;
  connected = false;

  constructor(url: string, wsImpl?: WsCtor) {
    this.url = url;
    const impl = wsImpl ?? (globalThis as any).WebSocket;
    if (!impl) throw new Error('no WebSocket implementation available; pass one in');
    this.WsImpl = impl;
  }

  onMessage(fn: MessageHandler): () => void {
    this.handlers.push(fn);
    return () => {
      this.handlers = this.handlers.filter((h) => h !== fn);
    };
  }

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const ws = new this.WsImpl(this.url);
      this.ws = ws;
      ws.onopen = () => {
        this.connected = true;
        resolve();
      };
      ws.onerror = (ev: any) => {
        if (!this.connected) reject(new Error(`socket failed to open: ${ev?.message ?? ev}`));
      };
      ws.onclose = () => {
        this.connected = false;
      };
      ws.onmessage = (ev) => {
        const msg = parseWireMessage(String(ev.data));
        if (msg === null) return; // not ours; the server never sends non-envelope text
        for (const h of this.handlers.slice()) h(msg);
      };
    });
  }

  sendLeaderAngles(anglesDeg: number[], timestampNs?: number): void {
    const payload: any = { angles_deg: anglesDeg };
    if (timestampNs !== undefined) payload.timestamp_ns = timestampNs;
    this.raw(envelope('leader_angles', payload));
  }

  sendEvent(event: SessionEventName): void {
    this.raw(envelope('session_event', { event }));
  }

  /**
   * Resolve with the first message matching pred; reject after timeoutMs.
   * Messages that arrive while nobody waits are not replayed — combine with a
   * SessionView for anything stateful.
   */
  waitFor(pred: (msg: WireMessage) => boolean, timeoutMs = 5000, label = 'message'): Promise<WireMessage> {
    return new Promise((resolve, reject) => {
      const off = this.onMessage((msg) => {
        if (pred(msg)) {
          clearTimeout(timer);
          off();
          resolve(msg);
        }
      });
      const timer = setTimeout(() => {
        off();
        reject(new Error(`timed out after ${timeoutMs} ms waiting for ${label}`));
      }, timeoutMs);
    });
  }

  close(): void {
    if (this.ws) this.ws.close();
    this.ws = null;
    this.connected = false;
  }

  private raw(text: string): void {
    if (!this.ws || !this.connected) throw new Error('socket is not connected');
    this.ws.send(text);
  }
}
