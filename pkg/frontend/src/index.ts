export * from "./protocol.js";
export * from "./hyperbolic.js";
export * from "./barcodeModel.js";
export * from "./threshold.js";
export * from "./canvasModel.js";
export * from "./client.js";
export * from "./driver.js";
export { TcpTransport } from "./tcp.js";
