import type { CameraDict } from "./protocol.js";

/** Default head-and-shoulders framing, identical to the service's own
 * front camera: identity rotation, camera `distance` in front of the
 * origin along -z (world-to-camera translation +distance on z), focal
 * length `focalFactor * width`, principal point at the image center. */
export function frontCamera(
  width: number,
  height: number,
  distance = 0.35,
  focalFactor = 1.4,
): CameraDict {
  const w2c = [
    1, 0, 0, 0,
    0, 1, 0, 0,
    0, 0, 1, distance,
    0, 0, 0, 1,
  ];
  return {
    fx: focalFactor * width,
    fy: focalFactor * width,
    cx: width / 2,
    cy: height / 2,
    width,
    height,
    w2c,
  };
}

/** Orbit the front camera around the head's vertical axis. */
export function orbitCamera(
  width: number,
  height: number,
  yawRadians: number,
  distance = 0.35,
  focalFactor = 1.4,
): CameraDict {
  const c = Math.cos(yawRadians);
  const s = Math.sin(yawRadians);
  const ns = s === 0 ? 0 : -s; // avoid JSON-visible negative zero
  // rotate the world about y, then push it `distance` down +z
  const w2c = [
    c, 0, s, 0,
    0, 1, 0, 0,
    ns, 0, c, distance,
    0, 0, 0, 1,
  ];
  return {
    fx: focalFactor * width,
    fy: focalFactor * width,
    cx: width / 2,
    cy: height / 2,
    width,
    height,
    w2c,
  };
}
