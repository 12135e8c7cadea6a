import { describe, expect, it } from "vitest";

import {
  FRAME_HEADER_SIZE,
  decodeFrame,
  isErrorMessage,
  makeParamsMessage,
} from "../src/protocol.js";

function buildFrame(
  width: number,
  height: number,
  frameId: number,
  renderMs: number,
): ArrayBuffer {
  const buf = new ArrayBuffer(FRAME_HEADER_SIZE + width * height * 4);
  const view = new DataView(buf);
  view.setUint32(0, width, true);
  view.setUint32(4, height, true);
  view.setBigUint64(8, BigInt(frameId), true);
  view.setFloat32(16, renderMs, true);
  view.setUint32(20, 0, true);
  const pixels = new Uint8Array(buf, FRAME_HEADER_SIZE);
  for (let i = 0; i < pixels.length; i++) {
    pixels[i] = i % 251;
  }
  return buf;
}

describe("decodeFrame", () => {
  it("round-trips the header fields", () => {
    const frame = decodeFrame(buildFrame(64, 48, 7, 12.5));
    expect(frame.width).toBe(64);
    expect(frame.height).toBe(48);
    expect(frame.frameId).toBe(7);
    expect(frame.renderMs).toBeCloseTo(12.5, 5);
    expect(frame.pixels.length).toBe(64 * 48 * 4);
    expect(frame.pixels[0]).toBe(0);
    expect(frame.pixels[250]).toBe(250);
  });

  it("handles 64-bit frame ids beyond 2^32", () => {
    const big = 2 ** 40 + 3;
    expect(decodeFrame(buildFrame(2, 2, big, 1)).frameId).toBe(big);
  });

  it("rejects short buffers", () => {
    expect(() => decodeFrame(new ArrayBuffer(10))).toThrow(/too short/);
  });

  it("rejects payload size mismatches", () => {
    const buf = buildFrame(8, 8, 1, 1);
    expect(() => decodeFrame(buf.slice(0, buf.byteLength - 4))).toThrow(
      /expected/,
    );
  });
});

describe("makeParamsMessage", () => {
  it("defaults jaw to zero and omits the camera", () => {
    const message = makeParamsMessage([0.1, 0.2]);
    expect(message).toEqual({ type: "params", psi: [0.1, 0.2], jaw: [0, 0, 0] });
    expect(JSON.parse(JSON.stringify(message))).not.toHaveProperty("camera");
  });

  it("carries an explicit camera through JSON", () => {
    const camera = {
      fx: 1,
      fy: 1,
      cx: 0,
      cy: 0,
      width: 2,
      height: 2,
      w2c: new Array(16).fill(0),
    };
    const message = makeParamsMessage([0], [0.3, 0, 0], camera);
    expect(JSON.parse(JSON.stringify(message)).camera.w2c).toHaveLength(16);
  });
});

describe("isErrorMessage", () => {
  it("accepts server error replies and rejects everything else", () => {
    expect(isErrorMessage({ type: "error", message: "bad psi" })).toBe(true);
    expect(isErrorMessage({ type: "params" })).toBe(false);
    expect(isErrorMessage(null)).toBe(false);
    expect(isErrorMessage("error")).toBe(false);
  });
});
