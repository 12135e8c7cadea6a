/** Wire protocol for the frame-streaming service.
 *
 * Frames are binary: a 24-byte little-endian header
 * (u32 width, u32 height, u64 frame_id, f32 render_ms, u32 reserved)
 * followed by tightly packed RGBA8 rows. The control plane is JSON text.
 */

export const FRAME_HEADER_SIZE = 24;

export interface Frame {
  width: number;
  height: number;
  frameId: number;
  renderMs: number;
  pixels: Uint8Array; // RGBA8, width * height * 4 bytes
}

export interface CameraDict {
  fx: number;
  fy: number;
  cx: number;
  cy: number;
  width: number;
  height: number;
  w2c: number[]; // 16 values, row-major 4x4 world-to-camera
}

export interface ParamsMessage {
  type: "params";
  psi: number[];
  jaw: number[];
  camera?: CameraDict;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export function decodeFrame(data: ArrayBuffer): Frame {
  if (data.byteLength < FRAME_HEADER_SIZE) {
    throw new Error(`frame too short: ${data.byteLength} bytes`);
  }
  const view = new DataView(data);
  const width = view.getUint32(0, true);
  const height = view.getUint32(4, true);
  const frameId = Number(view.getBigUint64(8, true));
  const renderMs = view.getFloat32(16, true);
  const pixels = new Uint8Array(data, FRAME_HEADER_SIZE);
  const expected = width * height * 4;
  if (pixels.length !== expected) {
    throw new Error(
      `frame payload is ${pixels.length} bytes, expected ${expected}`,
    );
  }
  return { width, height, frameId, renderMs, pixels };
}

export function makeParamsMessage(
  psi: number[],
  jaw: number[] = [0, 0, 0],
  camera?: CameraDict,
): ParamsMessage {
  const message: ParamsMessage = { type: "params", psi, jaw };
  if (camera !== undefined) {
    message.camera = camera;
  }
  return message;
}

export function isErrorMessage(obj: unknown): obj is ErrorMessage {
  return (
    typeof obj === "object" &&
    obj !== null &&
    (obj as { type?: unknown }).type === "error"
  );
}
