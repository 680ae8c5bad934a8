/** Headless protocol driver: runs a scripted interaction against a live
 * session server and reports the transcript plus the resulting UI state. */

import { RequestResult, SessionClient } from "./client.js";
import { TcpTransport } from "./tcp.js";
import type { BarView } from "./barcodeModel.js";
import type { ClientMessage, SelectionState } from "./protocol.js";
import { dragToThreshold, ThresholdCoalescer } from "./threshold.js";

export interface DriverReport {
  transcript: RequestResult[];
  barViews: BarView[];
  selection: SelectionState;
  toasts: string[];
}

export class HeadlessDriver {
  constructor(readonly client: SessionClient) {}

  static async connect(host: string, port: number): Promise<HeadlessDriver> {
    return new HeadlessDriver(new SessionClient(await TcpTransport.connect(host, port)));
  }

  /** Simulate dragging the filter bar across the panel: N move events are
   * coalesced to one set_threshold per frame flush. */
  async dragThreshold(
    pixelXs: number[],
    panelWidth: number,
    flushEvery: number,
  ): Promise<RequestResult[]> {
    const barcode = this.client.barcode;
    if (barcode === null) throw new Error("no barcode loaded");
    const maxPersistence = Math.max(
      ...barcode.barcode.bars.map((b) => b.persistence),
      0,
    );
    const coalescer = new ThresholdCoalescer();
    const results: RequestResult[] = [];
    for (let i = 0; i < pixelXs.length; i++) {
      coalescer.offer(dragToThreshold(pixelXs[i], panelWidth, maxPersistence));
      const isFrameBoundary = (i + 1) % flushEvery === 0 || i === pixelXs.length - 1;
      if (isFrameBoundary) {
        const msg = coalescer.flush();
        if (msg !== null) results.push(await this.client.request(msg));
      }
    }
    return results;
  }

  async run(script: ClientMessage[]): Promise<RequestResult[]> {
    const transcript: RequestResult[] = [];
    for (const message of script) {
      transcript.push(await this.client.request(message));
    }
    return transcript;
  }

  report(transcript: RequestResult[]): DriverReport {
    return {
      transcript,
      barViews: this.client.barViews(),
      selection: this.client.selection,
      toasts: this.client.toasts,
    };
  }

  close(): void {
    this.client.close();
  }
}
