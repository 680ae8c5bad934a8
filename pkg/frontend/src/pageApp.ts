/** Browser entry point: barcode panel + live canvas on one page.
 *
 * The session server speaks raw TCP, which browsers cannot open, so the page
 * connects through a WebSocket-to-TCP bridge (e.g. `websockify 7642
 * 127.0.0.1:7641`). The bridge address comes from the query string:
 * index.html?ws=localhost:7642
 */

import { SessionClient, Transport } from "./client.js";
import { drawCommands } from "./canvasModel.js";
import { dragToThreshold, ThresholdCoalescer } from "./threshold.js";
import { hyperbolicUnmap } from "./hyperbolic.js";

class WebSocketTransport implements Transport {
  private constructor(private socket: WebSocket) {}

  static connect(url: string): Promise<WebSocketTransport> {
    return new Promise((resolve, reject) => {
      const socket = new WebSocket(url);
      socket.onopen = () => resolve(new WebSocketTransport(socket));
      socket.onerror = () => reject(new Error(`cannot open ${url}`));
    });
  }

  send(data: string): void {
    this.socket.send(data);
  }

  onData(cb: (chunk: string) => void): void {
    this.socket.addEventListener("message", (event) => cb(String(event.data)));
  }

  onClose(cb: () => void): void {
    this.socket.addEventListener("close", cb);
  }

  close(): void {
    this.socket.close();
  }
}

const BAR_HEIGHT = 8;

function drawBarcodePanel(
  ctx: CanvasRenderingContext2D,
  client: SessionClient,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const views = client.barViews();
  for (const view of views) {
    const y = height - (view.slot + 1) * BAR_HEIGHT; // bottom = sort index 0
    if (y < 0 || y > height) continue;
    const barWidth = view.length * (width - 20);
    const split = view.splitFraction * barWidth;
    ctx.globalAlpha = view.state === "washed-out" ? 0.25 : 1.0;
    const darken = view.state === "darkened" ? 0.6 : 1.0;
    ctx.fillStyle = shade(view.leftColor, darken);
    ctx.fillRect(10, y, split, BAR_HEIGHT - 2);
    ctx.fillStyle = shade(view.rightColor, darken);
    ctx.fillRect(10 + split, y, barWidth - split, BAR_HEIGHT - 2);
    if (view.state === "hovered") {
      ctx.globalAlpha = 1.0;
      ctx.strokeStyle = "#000000";
      ctx.strokeRect(9.5, y - 0.5, barWidth + 1, BAR_HEIGHT - 1);
    }
  }
  ctx.globalAlpha = 1.0;
}

function shade(color: string, factor: number): string {
  const n = parseInt(color.slice(1), 16);
  const scaled = [16, 8, 0].map((s) =>
    Math.round(((n >> s) & 0xff) * factor)
      .toString(16)
      .padStart(2, "0"),
  );
  return `#${scaled.join("")}`;
}

function drawGraphCanvas(
  ctx: CanvasRenderingContext2D,
  client: SessionClient,
  width: number,
  height: number,
): void {
  const frame = client.frames.take(); // stale frames were already dropped
  if (frame === null || client.barcode === null) return;
  ctx.clearRect(0, 0, width, height);
  const xs = Object.values(frame.positions).map((p) => p[0]);
  const ys = Object.values(frame.positions).map((p) => p[1]);
  const span = Math.max(Math.max(...xs) - Math.min(...xs), Math.max(...ys) - Math.min(...ys), 1);
  const scale = (0.9 * Math.min(width, height)) / span;
  const cx = (Math.min(...xs) + Math.max(...xs)) / 2;
  const cy = (Math.min(...ys) + Math.max(...ys)) / 2;
  const sx = (x: number) => (x - cx) * scale + width / 2;
  const sy = (y: number) => (y - cy) * scale + height / 2;

  for (const cmd of drawCommands(client.barcode, frame, client.preview)) {
    switch (cmd.op) {
      case "halo":
        ctx.fillStyle = cmd.color;
        ctx.globalAlpha = 0.45;
        ctx.beginPath();
        ctx.arc(sx(cmd.x), sy(cmd.y), cmd.radius, 0, 2 * Math.PI);
        ctx.fill();
        ctx.globalAlpha = 1.0;
        break;
      case "hull":
        if (cmd.points.length < 2) break;
        ctx.strokeStyle = cmd.color;
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(sx(cmd.points[0][0]), sy(cmd.points[0][1]));
        for (const [x, y] of cmd.points.slice(1)) ctx.lineTo(sx(x), sy(y));
        ctx.closePath();
        ctx.stroke();
        break;
      case "edge":
        ctx.strokeStyle = "rgba(85, 85, 85, 0.4)";
        ctx.lineWidth = 1;
        ctx.beginPath();
        ctx.moveTo(sx(cmd.from[0]), sy(cmd.from[1]));
        ctx.lineTo(sx(cmd.to[0]), sy(cmd.to[1]));
        ctx.stroke();
        break;
      case "node":
        ctx.fillStyle = cmd.color;
        ctx.beginPath();
        ctx.arc(sx(cmd.x), sy(cmd.y), 4, 0, 2 * Math.PI);
        ctx.fill();
        break;
    }
  }
}

export async function startApp(root: Document): Promise<void> {
  const params = new URLSearchParams(root.location?.search ?? "");
  const bridge = params.get("ws") ?? "localhost:7642";
  const transport = await WebSocketTransport.connect(`ws://${bridge}`);
  const client = new SessionClient(transport);

  const barcodeCanvas = root.getElementById("barcode") as HTMLCanvasElement;
  const graphCanvas = root.getElementById("graph") as HTMLCanvasElement;
  const barcodeCtx = barcodeCanvas.getContext("2d")!;
  const graphCtx = graphCanvas.getContext("2d")!;
  const coalescer = new ThresholdCoalescer();
  let dragging = false;

  await client.request({ kind: "load_graph" }); // server-side default graph
  await client.request({ kind: "play" });

  const slotAt = (pixelY: number): number | null => {
    const slot = (barcodeCanvas.height - pixelY) / BAR_HEIGHT - 0.5;
    const index = Math.round(hyperbolicUnmap(slot, client.viewport));
    const views = client.barViews();
    return index >= 0 && index < views.length ? views[index].barId : null;
  };

  barcodeCanvas.addEventListener("mousemove", (event) => {
    if (dragging) {
      coalescer.offer(dragToThreshold(event.offsetX, barcodeCanvas.width, maxPersistence()));
      return;
    }
    const bar = slotAt(event.offsetY);
    if (bar !== null && bar !== client.hoveredBar) void client.hover(bar);
  });
  barcodeCanvas.addEventListener("mouseleave", () => client.clearHover());
  barcodeCanvas.addEventListener("click", (event) => {
    const bar = slotAt(event.offsetY);
    if (bar !== null) void client.toggleRepulsion(bar);
  });
  barcodeCanvas.addEventListener("mousedown", (event) => {
    if (event.offsetY < 12) dragging = true; // the filter strip on top
  });
  root.addEventListener("mouseup", () => (dragging = false));

  const maxPersistence = (): number =>
    client.barcode === null
      ? 0
      : Math.max(...client.barcode.barcode.bars.map((b) => b.persistence), 0);

  const tick = (): void => {
    const pendingThreshold = coalescer.flush();
    if (pendingThreshold !== null) void client.request(pendingThreshold);
    drawBarcodePanel(barcodeCtx, client, barcodeCanvas.width, barcodeCanvas.height);
    drawGraphCanvas(graphCtx, client, graphCanvas.width, graphCanvas.height);
    requestAnimationFrame(tick);
  };
  requestAnimationFrame(tick);
}
