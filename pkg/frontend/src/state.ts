import type { CameraDict, ParamsMessage } from "./protocol.js";
import { makeParamsMessage } from "./protocol.js";

/** Slider-driven viewer state with client-side latest-wins coalescing.
 *
 * While a send is in flight the newest slider values overwrite any queued
 * ones, so a fast slider drag produces at most one pending message instead
 * of a backlog. Frame ids are checked to be strictly increasing.
 */
export class ViewerState {
  readonly psi: number[];
  jaw: [number, number, number] = [0, 0, 0];
  camera: CameraDict | undefined;

  private pending: ParamsMessage | null = null;
  private inFlight = false;
  private lastFrameId = 0;

  constructor(expressionDim: number, camera?: CameraDict) {
    if (!Number.isInteger(expressionDim) || expressionDim <= 0) {
      throw new Error(`bad expression dimension ${expressionDim}`);
    }
    this.psi = new Array(expressionDim).fill(0);
    this.camera = camera;
  }

  setSlider(index: number, value: number): void {
    if (index < 0 || index >= this.psi.length) {
      throw new Error(`slider index ${index} out of range`);
    }
    this.psi[index] = value;
    this.queue();
  }

  setJaw(jaw: [number, number, number]): void {
    this.jaw = jaw;
    this.queue();
  }

  private queue(): void {
    this.pending = makeParamsMessage([...this.psi], [...this.jaw], this.camera);
  }

  /** Message to send now, or null. Marks the request as in flight. */
  takePending(): ParamsMessage | null {
    if (this.inFlight || this.pending === null) {
      return null;
    }
    const message = this.pending;
    this.pending = null;
    this.inFlight = true;
    return message;
  }

  /** Record an arrived frame; returns false when the id went backwards. */
  frameArrived(frameId: number): boolean {
    this.inFlight = false;
    if (frameId <= this.lastFrameId) {
      return false;
    }
    this.lastFrameId = frameId;
    return true;
  }

  get hasPending(): boolean {
    return this.pending !== null;
  }

  get latestFrameId(): number {
    return this.lastFrameId;
  }
}
