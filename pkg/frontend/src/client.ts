/** Session client: transport-agnostic state machine for the barcode UI.
 *
 * UI state is a pure function of (last server barcode, last acknowledged
 * selection, viewport): selections are never applied optimistically — they
 * change only when the server's ack carries them, and an error reply leaves
 * the state untouched and surfaces as a toast.
 */

import {
  AckReply,
  BarcodeReply,
  ClientMessage,
  encodeMessage,
  ErrorReply,
  isTerminal,
  LineDecoder,
  MessageId,
  SelectionState,
  ServerReply,
} from "./protocol.js";
import { BarView, renderBarcode } from "./barcodeModel.js";
import { FrameGate, Preview } from "./canvasModel.js";
import { makeViewport, ViewportState } from "./hyperbolic.js";

export interface Transport {
  send(data: string): void;
  onData(cb: (chunk: string) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export interface RequestResult {
  message: ClientMessage;
  replies: ServerReply[];
  terminal: AckReply | ErrorReply;
}

interface PendingRequest {
  message: ClientMessage;
  replies: ServerReply[];
  resolve: (result: RequestResult) => void;
  reject: (err: Error) => void;
}

export class SessionClient {
  readonly frames = new FrameGate();
  barcode: BarcodeReply | null = null;
  selection: SelectionState = { threshold: 0, repulsed: [] };
  preview: Preview | null = null;
  hoveredBar: number | null = null;
  viewport: ViewportState = makeViewport(0);
  toasts: string[] = [];
  playing = false;

  private decoder = new LineDecoder();
  private pending: PendingRequest[] = [];
  private nextId = 1;
  private closed = false;

  constructor(private transport: Transport) {
    transport.onData((chunk) => {
      for (const reply of this.decoder.push(chunk)) this.dispatch(reply);
    });
    transport.onClose(() => {
      this.closed = true;
      for (const req of this.pending.splice(0)) {
        req.reject(new Error("connection closed"));
      }
    });
  }

  request(message: ClientMessage): Promise<RequestResult> {
    if (this.closed) return Promise.reject(new Error("connection closed"));
    if (message.id === undefined) {
      message = { ...message, id: this.nextId++ as MessageId };
    }
    return new Promise((resolve, reject) => {
      this.pending.push({ message, replies: [], resolve, reject });
      this.transport.send(encodeMessage(message));
    });
  }

  /** Rendered bar list for the current state (pure). */
  barViews(): BarView[] {
    if (this.barcode === null) return [];
    return renderBarcode(this.barcode, this.selection, this.viewport, this.hoveredBar);
  }

  close(): void {
    this.transport.close();
  }

  // -- UI gestures ---------------------------------------------------------

  async hover(barId: number): Promise<RequestResult> {
    this.hoveredBar = barId;
    return this.request({ kind: "hover_bar", bar: barId });
  }

  clearHover(): void {
    this.hoveredBar = null;
    this.preview = null;
  }

  async toggleRepulsion(barId: number): Promise<RequestResult> {
    return this.request({ kind: "toggle_repulsion", bar: barId });
  }

  async setThreshold(value: number): Promise<RequestResult> {
    return this.request({ kind: "set_threshold", value });
  }

  // -- reply routing ---------------------------------------------------------

  private dispatch(reply: ServerReply): void {
    if (reply.reply === "frame") {
      this.frames.offer(reply);
      if (this.pending.length > 0) this.pending[0].replies.push(reply);
      return;
    }
    if (!isTerminal(reply)) {
      if (reply.reply === "barcode") {
        this.barcode = reply;
        this.selection = { threshold: 0, repulsed: [] };
        this.viewport = makeViewport(reply.order.length);
      }
      if (this.pending.length > 0) this.pending[0].replies.push(reply);
      return;
    }
    // terminal: settle the oldest in-flight request
    const req = this.pending.shift();
    if (reply.reply === "ack") {
      if (reply.selection !== undefined) this.selection = reply.selection;
      if (reply.playing !== undefined) this.playing = reply.playing;
      if (reply.membership !== undefined) {
        this.preview = { membership: reply.membership, mode: reply.mode ?? "hull" };
        this.hoveredBar = reply.bar ?? this.hoveredBar;
      }
    } else {
      this.toasts.push(reply.message); // state deliberately unchanged
    }
    if (req !== undefined) {
      req.replies.push(reply);
      req.resolve({
        message: req.message,
        replies: req.replies,
        terminal: reply,
      });
    }
  }
}
