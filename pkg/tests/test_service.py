import numpy as np
import pytest
from fastapi.testclient import TestClient

from headsplat.compose import build_cloud
from headsplat.headmodel import ExpressionState
from headsplat.rasterizer import Camera, render
from headsplat.service import FRAME_HEADER, create_app
from headsplat.tracks import camera_to_dict


@pytest.fixture(scope="module")
def client(asset64):
    with TestClient(create_app(asset64, threads=1)) as tc:
        yield tc


def small_camera():
    return camera_to_dict(Camera.front(64, 64))


def params_message(psi, jaw=(0.0, 0.0, 0.0)):
    return {"type": "params", "psi": list(psi), "jaw": list(jaw),
            "camera": small_camera()}


def unpack_frame(data):
    width, height, frame_id, render_ms, _ = FRAME_HEADER.unpack(
        data[:FRAME_HEADER.size])
    pixels = data[FRAME_HEADER.size:]
    assert len(pixels) == width * height * 4
    return width, height, frame_id, render_ms, pixels


def expected_pixels(asset, psi, jaw=(0.0, 0.0, 0.0)):
    model = asset.model
    pose = np.zeros((model.num_joints, 3))
    pose[model.jaw_joint] = np.asarray(jaw, dtype=np.float64)
    state = ExpressionState(shape=np.zeros(model.shape_dim),
                            expression=np.asarray(psi, dtype=np.float64),
                            pose=pose)
    fb = render(build_cloud(asset, state), Camera.front(64, 64), threads=1)
    return fb.rgba8().tobytes()


class TestHttp:
    def test_health(self, client):
        res = client.get("/health")
        assert res.status_code == 200
        body = res.json()
        assert body["status"] == "ok"
        assert body["asset"]["d_psi"] == 10

    def test_asset_metadata(self, client, asset64):
        res = client.get("/asset")
        assert res.status_code == 200
        meta = res.json()
        assert meta["gaussian_count"] == asset64.num_gaussians
        assert meta["resolution"] == 64
        assert meta["joint_names"] == ["root", "neck", "jaw", "eyes"]


class TestStream:
    def test_neutral_frame_matches_library_render(self, client, asset64):
        with client.websocket_connect("/stream") as ws:
            ws.send_json(params_message([0.0] * 10))
            width, height, frame_id, render_ms, pixels = unpack_frame(
                ws.receive_bytes())
        assert (width, height) == (64, 64)
        assert frame_id == 1
        assert render_ms > 0.0
        assert pixels == expected_pixels(asset64, [0.0] * 10)

    def test_burst_coalesces_with_increasing_ids(self, client, asset64):
        burst = 20
        with client.websocket_connect("/stream") as ws:
            for k in range(burst):
                ws.send_json(params_message([0.05 * (k + 1)] + [0.0] * 9))
            final = expected_pixels(asset64, [0.05 * burst] + [0.0] * 9)
            ids = []
            while True:
                _, _, frame_id, _, pixels = unpack_frame(ws.receive_bytes())
                ids.append(frame_id)
                if pixels == final:
                    break
                assert len(ids) <= burst, "no frame matched the last params"
        assert ids == sorted(set(ids))
        assert len(ids) <= burst

    def test_bad_psi_keeps_session_alive(self, client, asset64):
        with client.websocket_connect("/stream") as ws:
            ws.send_json({"type": "params", "psi": [0.1, 0.2],
                          "camera": small_camera()})
            reply = ws.receive_json()
            assert reply["type"] == "error"
            assert "psi" in reply["message"]
            ws.send_json(params_message([0.0] * 10))
            _, _, frame_id, _, pixels = unpack_frame(ws.receive_bytes())
        assert frame_id == 1  # the rejected message produced no frame
        assert pixels == expected_pixels(asset64, [0.0] * 10)

    def test_unknown_type_rejected(self, client):
        with client.websocket_connect("/stream") as ws:
            ws.send_json({"type": "bogus"})
            reply = ws.receive_json()
            assert reply["type"] == "error"

    def test_two_sessions_independent(self, client, asset64):
        psi_a = [0.4] + [0.0] * 9
        psi_b = [0.0] * 9 + [-0.4]
        with client.websocket_connect("/stream") as wa, \
                client.websocket_connect("/stream") as wb:
            wa.send_json(params_message(psi_a))
            wb.send_json(params_message(psi_b))
            _, _, id_a, _, pix_a = unpack_frame(wa.receive_bytes())
            _, _, id_b, _, pix_b = unpack_frame(wb.receive_bytes())
        assert id_a == 1 and id_b == 1  # counters are per session
        assert pix_a == expected_pixels(asset64, psi_a)
        assert pix_b == expected_pixels(asset64, psi_b)
        assert pix_a != pix_b
