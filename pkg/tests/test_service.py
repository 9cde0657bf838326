import base64
import io
import threading

import numpy as np
import pytest
from fastapi.testclient import TestClient

from voicemorph import MorphInstance, MorphObject, identity_anchors
from voicemorph.anchors import AnchorSet
from voicemorph.audio import read_wav
from voicemorph.persistence import (
    morph_object_bytes,
    read_morph_object_bytes,
    restore_edit_state_bytes,
    vocp_bytes,
)
from voicemorph.service import create_app

from conftest import SR, random_params


@pytest.fixture
def client():
    return TestClient(create_app())


@pytest.fixture
def session(client, rng):
    sid = client.post("/sessions").json()["session_id"]
    canonical = random_params(rng, n_frames=30)
    nonlinear = random_params(rng, n_frames=40)
    r = client.post(f"/sessions/{sid}/instance?axis=canonical&label=a",
                    content=vocp_bytes(canonical))
    assert r.status_code == 200, r.text
    r = client.post(f"/sessions/{sid}/instance?axis=nonlinear&label=b",
                    content=vocp_bytes(nonlinear))
    assert r.status_code == 200, r.text
    return sid, canonical, nonlinear


class TestSessions:
    def test_unknown_session_404(self, client):
        assert client.get("/sessions/deadbeef").status_code == 404

    def test_create_and_inspect(self, client):
        sid = client.post("/sessions").json()["session_id"]
        doc = client.get(f"/sessions/{sid}").json()
        assert doc["canonical_loaded"] is False
        assert doc["anchors"] is None

    def test_load_vocp_instances(self, session, client):
        sid, canonical, nonlinear = session
        doc = client.get(f"/sessions/{sid}").json()
        assert doc["canonical_loaded"] and doc["nonlinear_loaded"]
        assert doc["anchors"]["duration_canonical"] == pytest.approx(canonical.duration)
        assert doc["anchors"]["duration_instance"] == pytest.approx(nonlinear.duration)

    def test_load_wav_instance(self, client):
        from voicemorph.audio import Waveform, wav_bytes
        sid = client.post("/sessions").json()["session_id"]
        t = np.arange(int(0.2 * SR)) / SR
        tone = wav_bytes(Waveform(0.3 * np.sin(2 * np.pi * 150 * t), SR))
        r = client.post(f"/sessions/{sid}/instance?axis=canonical", content=tone)
        assert r.status_code == 200, r.text
        assert r.json()["state"]["canonical_loaded"]

    def test_garbage_instance_400(self, client):
        sid = client.post("/sessions").json()["session_id"]
        r = client.post(f"/sessions/{sid}/instance?axis=canonical",
                        content=b"junk bytes")
        assert r.status_code == 400

    def test_rate_mismatch_400(self, client, rng):
        sid = client.post("/sessions").json()["session_id"]
        a = random_params(rng)
        b = random_params(rng, sr=44100, nfft=2048)
        client.post(f"/sessions/{sid}/instance?axis=canonical", content=vocp_bytes(a))
        r = client.post(f"/sessions/{sid}/instance?axis=nonlinear", content=vocp_bytes(b))
        assert r.status_code == 400


class TestViews:
    def test_spectrogram_shape_and_fmax(self, session, client):
        sid, canonical, _ = session
        doc = client.get(f"/sessions/{sid}/spectrogram",
                         params={"axis": "canonical", "fmax": 4000}).json()
        assert len(doc["db"]) <= 512 and len(doc["db"][0]) <= 512
        assert doc["freqs"][-1] <= 4000.0
        assert doc["times"][-1] == pytest.approx(canonical.duration)

    def test_warped_spectrogram(self, session, client):
        sid, canonical, _ = session
        doc = client.get(f"/sessions/{sid}/spectrogram",
                         params={"axis": "warped"}).json()
        assert len(doc["db"]) == min(canonical.frame_count, 512)

    def test_waveform_view(self, session, client):
        sid, canonical, _ = session
        doc = client.get(f"/sessions/{sid}/waveform",
                         params={"axis": "canonical", "points": 256}).json()
        assert len(doc["min"]) == 256
        assert all(lo <= hi for lo, hi in zip(doc["min"], doc["max"]))
        assert doc["sample_rate"] == canonical.sample_rate

    def test_distance_requires_both_instances(self, client, rng):
        sid = client.post("/sessions").json()["session_id"]
        client.post(f"/sessions/{sid}/instance?axis=canonical",
                    content=vocp_bytes(random_params(rng)))
        assert client.get(f"/sessions/{sid}/distance").status_code == 400

    def test_distance_trajectory(self, session, client):
        sid, canonical, _ = session
        doc = client.get(f"/sessions/{sid}/distance", params={"fmax": 5000}).json()
        assert len(doc["per_frame"]) == canonical.frame_count
        assert doc["mean"] >= 0.0


class TestAnchorEditing:
    def test_place_and_move_temporal(self, session, client):
        sid, canonical, nonlinear = session
        t = canonical.duration / 2
        r = client.patch(f"/sessions/{sid}/anchors",
                         json={"op": "place_temporal", "t": t})
        assert r.status_code == 200, r.text
        cols = r.json()["state"]["anchors"]["columns"]
        assert len(cols) == 1
        assert cols[0]["t_canonical"] == pytest.approx(t)
        assert r.json()["distance"] is not None

        r = client.patch(f"/sessions/{sid}/anchors",
                         json={"op": "move_temporal", "index": 0,
                               "t_instance": nonlinear.duration * 0.25})
        assert r.status_code == 200
        cols = r.json()["state"]["anchors"]["columns"]
        assert cols[0]["t_instance"] == pytest.approx(nonlinear.duration * 0.25)

    def test_frequency_anchor_lifecycle(self, session, client):
        sid, canonical, _ = session
        client.patch(f"/sessions/{sid}/anchors",
                     json={"op": "place_temporal", "t": canonical.duration / 3})
        r = client.patch(f"/sessions/{sid}/anchors",
                         json={"op": "place_frequency", "column": 0, "f": 1200.0})
        assert r.status_code == 200, r.text
        r = client.patch(f"/sessions/{sid}/anchors",
                         json={"op": "move_frequency", "column": 0, "pair": 0,
                               "f_instance": 1500.0})
        pair = r.json()["state"]["anchors"]["columns"][0]["freq_anchors"][0]
        assert pair == [1200.0, 1500.0]

    def test_invalid_edit_409_state_unchanged(self, session, client):
        sid, canonical, _ = session
        client.patch(f"/sessions/{sid}/anchors",
                     json={"op": "place_temporal", "t": canonical.duration / 2})
        before = client.get(f"/sessions/{sid}").json()
        # dragging past the session duration must be rejected atomically
        r = client.patch(f"/sessions/{sid}/anchors",
                         json={"op": "move_temporal", "index": 0,
                               "t_canonical": canonical.duration * 5})
        assert r.status_code == 409
        after = client.get(f"/sessions/{sid}").json()
        assert after["anchors"] == before["anchors"]
        assert after["undo_depth"] == before["undo_depth"]

    def test_out_of_range_placement_409(self, session, client):
        sid, canonical, _ = session
        r = client.patch(f"/sessions/{sid}/anchors",
                         json={"op": "place_temporal", "t": -1.0})
        assert r.status_code == 409

    def test_undo_removes_latest_edit(self, session, client):
        sid, canonical, _ = session
        for frac in (0.25, 0.5, 0.75):
            client.patch(f"/sessions/{sid}/anchors",
                         json={"op": "place_temporal", "t": canonical.duration * frac})
        r = client.post(f"/sessions/{sid}/undo")
        cols = r.json()["state"]["anchors"]["columns"]
        assert [c["t_canonical"] for c in cols] == \
            pytest.approx([canonical.duration * 0.25, canonical.duration * 0.5])

    def test_undo_on_empty_stack_is_noop(self, session, client):
        sid, _, _ = session
        r = client.post(f"/sessions/{sid}/undo")
        assert r.status_code == 200
        assert r.json()["state"]["anchors"]["columns"] == []

    def test_clear(self, session, client):
        sid, canonical, _ = session
        client.patch(f"/sessions/{sid}/anchors",
                     json={"op": "place_temporal", "t": canonical.duration / 2})
        r = client.post(f"/sessions/{sid}/clear")
        assert r.json()["state"]["anchors"]["columns"] == []
        # clear itself is undoable
        r = client.post(f"/sessions/{sid}/undo")
        assert len(r.json()["state"]["anchors"]["columns"]) == 1

    def test_put_full_anchor_set(self, session, client):
        sid, canonical, nonlinear = session
        doc = client.get(f"/sessions/{sid}").json()["anchors"]
        doc["columns"] = [{
            "t_canonical": canonical.duration / 2,
            "t_instance": nonlinear.duration / 2,
            "freq_anchors": [[800.0, 900.0]],
        }]
        r = client.put(f"/sessions/{sid}/anchors", json=doc)
        assert r.status_code == 200, r.text
        assert len(r.json()["state"]["anchors"]["columns"]) == 1

    def test_put_non_monotone_409(self, session, client):
        sid, canonical, nonlinear = session
        doc = client.get(f"/sessions/{sid}").json()["anchors"]
        doc["columns"] = [
            {"t_canonical": 0.06, "t_instance": 0.02, "freq_anchors": []},
            {"t_canonical": 0.03, "t_instance": 0.05, "freq_anchors": []},
        ]
        assert client.put(f"/sessions/{sid}/anchors", json=doc).status_code == 409


class TestMorphEndpoints:
    def test_morph_by_rate_returns_wav(self, session, client):
        sid, _, _ = session
        r = client.post(f"/sessions/{sid}/morph", json={"rate": 0.5, "seed": 1})
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("audio/wav")
        audio = read_wav(r.content)
        assert audio.samples.size > 0

    def test_morph_deterministic_per_seed(self, session, client):
        sid, _, _ = session
        a = client.post(f"/sessions/{sid}/morph", json={"rate": 0.3, "seed": 5}).content
        b = client.post(f"/sessions/{sid}/morph", json={"rate": 0.3, "seed": 5}).content
        c = client.post(f"/sessions/{sid}/morph", json={"rate": 0.3, "seed": 6}).content
        assert a == b
        assert a != c

    def test_weight_sum_violation_422(self, session, client):
        sid, _, _ = session
        rows = {k: [0.5, 0.5] for k in ("tx", "fx", "sl", "fo", "ap")}
        rows["sl"] = [0.7, 0.7]
        r = client.post(f"/sessions/{sid}/morph", json={"weights": rows})
        assert r.status_code == 422
        assert "sl" in r.json()["error"]

    def test_rate_and_weights_both_given_400(self, session, client):
        sid, _, _ = session
        rows = {k: [0.5, 0.5] for k in ("tx", "fx", "sl", "fo", "ap")}
        r = client.post(f"/sessions/{sid}/morph", json={"rate": 0.5, "weights": rows})
        assert r.status_code == 400

    def test_synthesize_axis(self, session, client):
        sid, canonical, _ = session
        r = client.post(f"/sessions/{sid}/synthesize",
                        params={"axis": "canonical", "seed": 0})
        assert r.status_code == 200
        audio = read_wav(r.content)
        assert abs(audio.duration - canonical.duration) < 0.05


class TestPersistenceEndpoints:
    def test_save_object_loadable(self, session, client):
        sid, canonical, nonlinear = session
        client.patch(f"/sessions/{sid}/anchors",
                     json={"op": "place_temporal", "t": canonical.duration / 2})
        r = client.post(f"/sessions/{sid}/save-object")
        assert r.status_code == 200
        obj = read_morph_object_bytes(r.content)
        assert obj.k == 2
        assert len(obj.instances[1].anchors.columns) == 1

    def test_save_and_restore_edit(self, session, client):
        sid, canonical, _ = session
        client.patch(f"/sessions/{sid}/anchors",
                     json={"op": "place_temporal", "t": canonical.duration / 2})
        blob = client.post(f"/sessions/{sid}/save-edit").content
        state = restore_edit_state_bytes(blob)
        assert len(state.anchors.columns) == 1

        sid2 = client.post("/sessions").json()["session_id"]
        r = client.post(f"/sessions/{sid2}/restore-edit", content=blob)
        assert r.status_code == 200
        doc = client.get(f"/sessions/{sid2}").json()
        assert len(doc["anchors"]["columns"]) == 1
        assert doc["undo_depth"] == 1  # undo history restores too

    def test_rebase_endpoint(self, client, rng):
        canonical = random_params(rng, n_frames=25)
        other = random_params(rng, n_frames=30)
        obj = MorphObject(instances=(
            MorphInstance(canonical, identity_anchors(canonical), label="c"),
            MorphInstance(other, AnchorSet((), canonical.duration, other.duration,
                                           other.nyquist), label="n"),
        ))
        r = client.post("/morphobjects/rebase", json={
            "canonical_vocp": base64.b64encode(vocp_bytes(canonical)).decode(),
            "morph_object": base64.b64encode(morph_object_bytes(obj)).decode(),
        })
        assert r.status_code == 200
        state = restore_edit_state_bytes(r.content)
        assert state.canonical.frame_count == canonical.frame_count


class TestDemo:
    def _load_three(self, client, rng):
        sources = [random_params(rng, n_frames=n) for n in (20, 24, 28)]
        payload = [base64.b64encode(vocp_bytes(p)).decode() for p in sources]
        r = client.post("/demo/load", json={"objects": payload})
        assert r.status_code == 200, r.text
        return sources

    def test_demo_morph_at_vertex(self, client, rng):
        self._load_three(client, rng)
        tri = [[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]]
        r = client.post("/demo/morph", json={"point": [0.0, 0.0], "triangle": tri})
        assert r.status_code == 200
        assert r.headers["X-Weights"].startswith("1.000000,0.000000")

    def test_demo_morph_pattern_pins_attributes(self, client, rng):
        self._load_three(client, rng)
        tri = [[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]]
        centroid = [0.5, 1.0 / 3.0]
        full = client.post("/demo/morph", json={
            "point": centroid, "triangle": tri, "seed": 2}).content
        pinned = client.post("/demo/morph", json={
            "point": centroid, "triangle": tri, "seed": 2,
            "pattern": {"tx": False, "fx": False, "sl": False,
                        "fo": True, "ap": True}}).content
        assert full != pinned

    def test_demo_morph_before_load_400(self, client):
        r = client.post("/demo/morph", json={
            "point": [0, 0], "triangle": [[0, 0], [1, 0], [0, 1]]})
        assert r.status_code == 400

    def test_demo_degenerate_triangle_400(self, client, rng):
        self._load_three(client, rng)
        r = client.post("/demo/morph", json={
            "point": [0.5, 0.5],
            "triangle": [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]})
        assert r.status_code == 400

    def test_demo_load_wrong_count_400(self, client, rng):
        payload = [base64.b64encode(vocp_bytes(random_params(rng))).decode()]
        assert client.post("/demo/load", json={"objects": payload}).status_code == 400


class TestConcurrency:
    def test_parallel_anchor_edits_serialize(self, session, client):
        sid, canonical, _ = session
        times = np.linspace(0.1, 0.9, 16) * canonical.duration
        errors = []

        def place(t):
            try:
                r = client.patch(f"/sessions/{sid}/anchors",
                                 json={"op": "place_temporal", "t": float(t)})
                if r.status_code not in (200, 409):
                    errors.append(r.status_code)
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=place, args=(t,)) for t in times]
        for th in threads:
            th.start()
        for th in threads:
            th.join()
        assert not errors
        doc = client.get(f"/sessions/{sid}").json()
        cols = [c["t_canonical"] for c in doc["anchors"]["columns"]]
        assert cols == sorted(cols)
        assert doc["undo_depth"] == len(cols)
