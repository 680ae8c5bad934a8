/** Message schema of the phlayout session protocol (line-delimited JSON). */

export type Weighting = "jaccard" | "given" | "auto";

export interface LoadGraphMessage {
  kind: "load_graph";
  id?: MessageId;
  text?: string;
  path?: string;
  format?: "edge_list" | "graph_json";
  weighting?: Weighting;
  hops?: number;
  seed?: number;
}

export interface SetConfigMessage {
  kind: "set_config";
  id?: MessageId;
  config: Record<string, number>;
}

export interface SetThresholdMessage {
  kind: "set_threshold";
  id?: MessageId;
  value: number;
}

export interface ToggleRepulsionMessage {
  kind: "toggle_repulsion";
  id?: MessageId;
  bar: number;
}

export interface HoverBarMessage {
  kind: "hover_bar";
  id?: MessageId;
  bar: number;
}

export interface SimpleMessage {
  kind: "play" | "pause" | "snapshot_request";
  id?: MessageId;
}

export interface StepNMessage {
  kind: "step_n";
  id?: MessageId;
  n: number;
}

export type MessageId = string | number;

export type ClientMessage =
  | LoadGraphMessage
  | SetConfigMessage
  | SetThresholdMessage
  | ToggleRepulsionMessage
  | HoverBarMessage
  | SimpleMessage
  | StepNMessage;

export interface BarRecord {
  id: number;
  persistence: number;
  cause: [string, string];
  ratio: [number, number]; // (min, max) across the MST cut
}

export interface NodeRecord {
  id: string;
  category: string | null;
}

export interface SelectionState {
  threshold: number;
  repulsed: number[];
}

export interface BarcodeReply {
  reply: "barcode";
  barcode: { bars: BarRecord[]; components: number };
  order: number[]; // display order, index 0 = bottom
  features: { bundling_enabled: boolean; halo_mode: boolean };
  nodes: NodeRecord[];
  edges: [string, string][];
  seed: number;
}

export interface FrameReply {
  reply: "frame";
  frame: number;
  iteration: number;
  positions: Record<string, [number, number]>;
  selection: SelectionState;
}

export interface MetricsReply {
  reply: "metrics";
  metrics: {
    E_C: number | null;
    E_R: number | null;
    bars: { id: number; P_S: number; P_T: number; excluded?: boolean }[];
  };
}

export interface AckReply {
  reply: "ack";
  re: MessageId | null;
  selection?: SelectionState;
  membership?: Record<string, 0 | 1>;
  mode?: "halo" | "hull";
  bar?: number;
  playing?: boolean;
}

export interface ErrorReply {
  reply: "error";
  re: MessageId | null;
  message: string;
}

export type ServerReply =
  | BarcodeReply
  | FrameReply
  | MetricsReply
  | AckReply
  | ErrorReply;

export function isTerminal(reply: ServerReply): reply is AckReply | ErrorReply {
  return reply.reply === "ack" || reply.reply === "error";
}

export function encodeMessage(msg: ClientMessage): string {
  return JSON.stringify(msg) + "\n";
}

/** Incremental decoder for newline-delimited JSON chunks. */
export class LineDecoder {
  private buffer = "";

  push(chunk: string): ServerReply[] {
    this.buffer += chunk;
    const replies: ServerReply[] = [];
    let index: number;
    while ((index = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, index).trim();
      this.buffer = this.buffer.slice(index + 1);
      if (line.length > 0) {
        replies.push(JSON.parse(line) as ServerReply);
      }
    }
    return replies;
  }
}
