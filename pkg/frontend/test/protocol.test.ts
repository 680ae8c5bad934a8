import { describe, expect, it } from "vitest";

import { encodeMessage, LineDecoder } from "../src/protocol.js";

describe("line codec", () => {
  it("encodes one message per newline-terminated line", () => {
    const wire = encodeMessage({ kind: "set_threshold", value: 2.5, id: 7 });
    expect(wire.endsWith("\n")).toBe(true);
    expect(JSON.parse(wire)).toEqual({ kind: "set_threshold", value: 2.5, id: 7 });
  });

  it("reassembles replies split across chunks", () => {
    const decoder = new LineDecoder();
    const replies = [
      ...decoder.push('{"reply":"ack","re":1}\n{"reply":"fr'),
      ...decoder.push('ame","frame":1,"iteration":1,"positions":{},'),
      ...decoder.push('"selection":{"threshold":0,"repulsed":[]}}\n'),
    ];
    expect(replies.map((r) => r.reply)).toEqual(["ack", "frame"]);
  });

  it("handles several replies in one chunk and skips blank lines", () => {
    const decoder = new LineDecoder();
    const replies = decoder.push(
      '{"reply":"ack","re":1}\n\n{"reply":"error","re":2,"message":"x"}\n',
    );
    expect(replies).toHaveLength(2);
  });
});
