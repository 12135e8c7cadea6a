import { frontCamera } from "./camera.js";
import { fetchAssetMeta, StreamClient } from "./client.js";
import type { Frame } from "./protocol.js";
import { ViewerState } from "./state.js";

const SIZE = 512;

async function start(): Promise<void> {
  const canvas = document.getElementById("view") as HTMLCanvasElement;
  const status = document.getElementById("status") as HTMLElement;
  const sliders = document.getElementById("sliders") as HTMLElement;
  const ctx = canvas.getContext("2d")!;
  canvas.width = SIZE;
  canvas.height = SIZE;

  const base = `${location.protocol}//${location.host}`;
  const meta = await fetchAssetMeta(base);
  const state = new ViewerState(meta.d_psi, frontCamera(SIZE, SIZE));

  const client = new StreamClient(
    `${base.replace(/^http/, "ws")}/stream`,
    {
      onFrame: (frame: Frame) => {
        const image = new ImageData(
          new Uint8ClampedArray(frame.pixels),
          frame.width,
          frame.height,
        );
        ctx.putImageData(image, 0, 0);
        state.frameArrived(frame.frameId);
        status.textContent =
          `frame ${frame.frameId}, render ${frame.renderMs.toFixed(1)} ms`;
        pump();
      },
      onServerError: (message) => {
        status.textContent = `server error: ${message}`;
      },
    },
  );

  function pump(): void {
    const message = state.takePending();
    if (message !== null) {
      client.send(message);
    }
  }

  for (let i = 0; i < meta.d_psi; i++) {
    const label = document.createElement("label");
    label.textContent = `psi[${i}]`;
    const input = document.createElement("input");
    input.type = "range";
    input.min = "-2";
    input.max = "2";
    input.step = "0.01";
    input.value = "0";
    input.addEventListener("input", () => {
      state.setSlider(i, parseFloat(input.value));
      pump();
    });
    label.appendChild(input);
    sliders.appendChild(label);
  }

  const jaw = document.createElement("label");
  jaw.textContent = "jaw open";
  const jawInput = document.createElement("input");
  jawInput.type = "range";
  jawInput.min = "0";
  jawInput.max = "0.6";
  jawInput.step = "0.01";
  jawInput.value = "0";
  jawInput.addEventListener("input", () => {
    state.setJaw([parseFloat(jawInput.value), 0, 0]);
    pump();
  });
  jaw.appendChild(jawInput);
  sliders.appendChild(jaw);

  await client.connect();
  state.setJaw([0, 0, 0]); // request the first, neutral frame
  pump();
}

start().catch((err) => {
  const status = document.getElementById("status");
  if (status) {
    status.textContent = String(err);
  }
});
