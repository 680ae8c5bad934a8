/** Raw-TCP transport for headless (node) use of the session protocol. */

import * as net from "node:net";

import type { Transport } from "./client.js";

export class TcpTransport implements Transport {
  private constructor(private socket: net.Socket) {}

  static connect(host: string, port: number): Promise<TcpTransport> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port }, () => {
        socket.setEncoding("utf8");
        resolve(new TcpTransport(socket));
      });
      socket.once("error", reject);
    });
  }

  send(data: string): void {
    this.socket.write(data);
  }

  onData(cb: (chunk: string) => void): void {
    this.socket.on("data", cb);
  }

  onClose(cb: () => void): void {
    this.socket.on("close", cb);
  }

  close(): void {
    this.socket.end();
    this.socket.destroy();
  }
}
