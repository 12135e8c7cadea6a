import type { Frame, ParamsMessage } from "./protocol.js";
import { decodeFrame, isErrorMessage } from "./protocol.js";

/** The subset of the WebSocket API the client needs; injectable so tests
 * and Node (via the `ws` package) can supply their own implementation. */
export interface SocketLike {
  binaryType: string;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface AssetMeta {
  d_psi: number;
  resolution: number;
  gaussian_count: number;
  sh_degree: number;
  joint_names: string[];
}

export interface StreamClientHandlers {
  onFrame?: (frame: Frame) => void;
  onServerError?: (message: string) => void;
  onClose?: () => void;
}

/** Thin typed wrapper over the /stream websocket. */
export class StreamClient {
  private socket: SocketLike | null = null;

  constructor(
    private readonly url: string,
    private readonly handlers: StreamClientHandlers = {},
    private readonly socketFactory: SocketFactory = (u) =>
      new WebSocket(u) as unknown as SocketLike,
  ) {}

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const socket = this.socketFactory(this.url);
      socket.binaryType = "arraybuffer";
      socket.onopen = () => resolve();
      socket.onerror = (ev) => reject(ev instanceof Error ? ev : new Error("socket error"));
      socket.onclose = () => this.handlers.onClose?.();
      socket.onmessage = (ev) => this.dispatch(ev.data);
      this.socket = socket;
    });
  }

  send(message: ParamsMessage): void {
    if (this.socket === null) {
      throw new Error("not connected");
    }
    this.socket.send(JSON.stringify(message));
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }

  private dispatch(data: unknown): void {
    if (typeof data === "string") {
      const obj: unknown = JSON.parse(data);
      if (isErrorMessage(obj)) {
        this.handlers.onServerError?.(obj.message);
      }
      return;
    }
    let buffer: ArrayBuffer;
    if (data instanceof ArrayBuffer) {
      buffer = data;
    } else if (ArrayBuffer.isView(data as ArrayBufferView)) {
      const view = data as ArrayBufferView;
      buffer = view.buffer.slice(
        view.byteOffset,
        view.byteOffset + view.byteLength,
      ) as ArrayBuffer;
    } else {
      return;
    }
    this.handlers.onFrame?.(decodeFrame(buffer));
  }
}

/** Fetch asset metadata over HTTP; `fetchImpl` is injectable for tests. */
export async function fetchAssetMeta(
  baseUrl: string,
  fetchImpl: typeof fetch = fetch,
): Promise<AssetMeta> {
  const res = await fetchImpl(`${baseUrl}/asset`);
  if (!res.ok) {
    throw new Error(`asset request failed: ${res.status}`);
  }
  return (await res.json()) as AssetMeta;
}
