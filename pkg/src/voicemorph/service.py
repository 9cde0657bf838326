"""HTTP service exposing the interactive morphing workflow.

Sessions model one preparation GUI each: two loaded instances, the current
anchor set, an undo stack, and view state. All mutating endpoints return the
refreshed distance trajectory so a UI can update its plot in one round trip.
"""
from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field, replace

import numpy as np
from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .align import alignment_distance
from .anchors import (
    AnchorColumn,
    AnchorSet,
    FrequencyAnchorPair,
    MorphInstance,
    identity_anchors,
    resample_to_canonical,
)
from .audio import Waveform, read_wav, wav_bytes
from .errors import InvalidAnchors, InvalidWeights, OutOfRange, VoiceMorphError
from .morph import Attribute, MorphObject, WeightMatrix, area_coordinates, morph, rate_to_weights
from .persistence import (
    EditState,
    ViewState,
    VOCP_MAGIC,
    anchors_from_json,
    anchors_to_json,
    edit_state_bytes,
    morph_object_bytes,
    read_morph_object_bytes,
    read_vocp_bytes,
    rebase,
    restore_edit_state_bytes,
)
from .vocoder import VocoderParams, analyze, synthesize

SESSION_TTL_SECONDS = 3600
MAX_TILE = 512


class HttpError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(message)


@dataclass
class Session:
    state: EditState = field(default_factory=EditState)
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_access: float = field(default_factory=time.monotonic)
    audio_cache: dict = field(default_factory=dict)


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self) -> str:
        sid = uuid.uuid4().hex
        with self._lock:
            self._purge()
            self._sessions[sid] = Session()
        return sid

    def get(self, sid: str) -> Session:
        with self._lock:
            self._purge()
            session = self._sessions.get(sid)
            if session is None:
                raise HttpError(404, f"unknown session {sid}")
            session.last_access = time.monotonic()
            return session

    def _purge(self):
        cutoff = time.monotonic() - SESSION_TTL_SECONDS
        stale = [sid for sid, s in self._sessions.items() if s.last_access < cutoff]
        for sid in stale:
            del self._sessions[sid]


class MorphRequest(BaseModel):
    rate: float | None = None
    weights: dict[str, list[float]] | None = None
    seed: int = 0


class RebaseRequest(BaseModel):
    canonical_vocp: str  # base64 .vocp payload
    morph_object: str    # base64 .morb payload


class DemoLoadRequest(BaseModel):
    objects: list[str]  # three base64 .morb or .vocp payloads


class DemoMorphRequest(BaseModel):
    point: list[float]
    triangle: list[list[float]]
    pattern: dict[str, bool] | None = None  # attribute -> knob weights apply
    seed: int = 0


def _decode_params(body: bytes) -> VocoderParams:
    if body[:4] == VOCP_MAGIC:
        return read_vocp_bytes(body)
    if body[:4] == b"RIFF":
        return analyze(read_wav(body))
    raise HttpError(400, "instance body must be a .vocp file or a RIFF WAV file")


def _weight_matrix(req: MorphRequest, k: int) -> WeightMatrix:
    if (req.rate is None) == (req.weights is None):
        raise HttpError(400, "provide exactly one of 'rate' or 'weights'")
    if req.rate is not None:
        if k != 2:
            raise HttpError(400, "'rate' applies to two-instance objects only")
        return rate_to_weights(req.rate)
    rows = {}
    for attr in Attribute:
        if attr.value not in req.weights:
            raise InvalidWeights(f"missing weight row for '{attr.value}'")
        row = np.asarray(req.weights[attr.value], dtype=np.float64)
        if row.size != k:
            raise InvalidWeights(f"row '{attr.value}' must have {k} entries")
        s = float(np.sum(row))
        if abs(s - 1.0) > 1e-9:
            raise InvalidWeights(f"row '{attr.value}' sums to {s}, expected 1")
        rows[attr] = row
    return WeightMatrix(rows=rows)


def _downsample(matrix: np.ndarray, limit: int) -> np.ndarray:
    """Block-mean reduction of both axes down to <= limit each."""
    for axis in (0, 1):
        n = matrix.shape[axis]
        if n > limit:
            factor = -(-n // limit)
            pad = (-n) % factor
            if pad:
                idx = [slice(None)] * 2
                idx[axis] = slice(n - 1, n)
                edge = np.repeat(matrix[tuple(idx)], pad, axis=axis)
                matrix = np.concatenate([matrix, edge], axis=axis)
            shape = list(matrix.shape)
            shape[axis] = matrix.shape[axis] // factor
            matrix = matrix.reshape(
                (shape[0], factor, shape[1]) if axis == 0 else (shape[0], shape[1], factor)
            ).mean(axis=1 if axis == 0 else 2)
    return matrix


def create_app() -> FastAPI:
    app = FastAPI(title="voicemorph service")
    store = SessionStore()
    app.state.sessions = store
    app.state.demo_sources = None

    @app.exception_handler(HttpError)
    async def on_http_error(request: Request, exc: HttpError):
        return JSONResponse(status_code=exc.status, content={"error": exc.message})

    @app.exception_handler(VoiceMorphError)
    async def on_domain_error(request: Request, exc: VoiceMorphError):
        if isinstance(exc, (InvalidAnchors, OutOfRange)):
            status = 409
        elif isinstance(exc, InvalidWeights):
            status = 422
        else:
            status = 400
        return JSONResponse(status_code=status,
                            content={"error": f"{type(exc).__name__}: {exc}"})

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    # --- session helpers -----------------------------------------------------

    def _axis_params(state: EditState, axis: str) -> VocoderParams:
        if axis == "canonical":
            p = state.canonical
        elif axis == "nonlinear":
            p = state.nonlinear
        else:
            raise HttpError(400, f"unknown axis {axis!r}")
        if p is None:
            raise HttpError(400, f"no instance loaded on the {axis} axis")
        return p

    def _ensure_anchors(state: EditState) -> AnchorSet:
        if state.anchors is None:
            if state.canonical is None or state.nonlinear is None:
                raise HttpError(400, "both instances must be loaded first")
            state.anchors = AnchorSet(
                columns=(),
                duration_canonical=state.canonical.duration,
                duration_instance=state.nonlinear.duration,
                nyquist=state.nonlinear.nyquist,
            )
        return state.anchors

    def _distance_json(state: EditState, f_limit: float | None = None):
        if state.canonical is None or state.nonlinear is None:
            return None
        anchors = _ensure_anchors(state)
        inst = MorphInstance(state.nonlinear, anchors, label=state.nonlinear_label)
        warped = resample_to_canonical(inst, state.canonical.frame_times)
        traj = alignment_distance(state.canonical, warped,
                                  f_limit or state.view.f_limit)
        return {
            "frame_times": traj.frame_times.tolist(),
            "per_frame": traj.per_frame.tolist(),
            "mean": traj.mean,
        }

    def _state_json(state: EditState):
        return {
            "canonical_loaded": state.canonical is not None,
            "nonlinear_loaded": state.nonlinear is not None,
            "canonical_label": state.canonical_label,
            "nonlinear_label": state.nonlinear_label,
            "anchors": anchors_to_json(state.anchors) if state.anchors else None,
            "undo_depth": len(state.undo_stack),
            "view": {"f_limit": state.view.f_limit,
                     "display_mode": state.view.display_mode},
        }

    def _mutate_anchors(session: Session, mutate):
        """Apply an anchor edit transactionally: invalid edits leave state untouched."""
        state = session.state
        current = _ensure_anchors(state)
        new_set = mutate(current)  # may raise InvalidAnchors/OutOfRange -> 409
        state.undo_stack.append(current)
        state.anchors = new_set
        return {"state": _state_json(state), "distance": _distance_json(state)}

    def _session_object(state: EditState) -> MorphObject:
        if state.canonical is None or state.nonlinear is None:
            raise HttpError(400, "both instances must be loaded first")
        anchors = _ensure_anchors(state)
        return MorphObject(instances=(
            MorphInstance(state.canonical, identity_anchors(state.canonical),
                          label=state.canonical_label or "canonical"),
            MorphInstance(state.nonlinear, anchors,
                          label=state.nonlinear_label or "nonlinear"),
        ))

    def _display_audio(session: Session, axis: str) -> Waveform:
        if axis not in session.audio_cache:
            params = _axis_params(session.state, axis)
            session.audio_cache[axis] = synthesize(params, seed=0)
        return session.audio_cache[axis]

    # --- session lifecycle ---------------------------------------------------

    @app.post("/sessions")
    def create_session():
        return {"session_id": store.create()}

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session = store.get(sid)
        with session.lock:
            return _state_json(session.state)

    @app.post("/sessions/{sid}/instance")
    async def load_instance(sid: str, request: Request,
                            axis: str = Query(...), label: str = Query("")):
        session = store.get(sid)
        body = await request.body()
        params = _decode_params(body)
        with session.lock:
            state = session.state
            other = state.nonlinear if axis == "canonical" else state.canonical
            if axis not in ("canonical", "nonlinear"):
                raise HttpError(400, f"unknown axis {axis!r}")
            if other is not None:
                if params.sample_rate != other.sample_rate:
                    raise HttpError(400, "sample rates of the two instances differ")
                if params.fft_size != other.fft_size or \
                        params.frame_period != other.frame_period:
                    raise HttpError(400, "frame grid metadata of the two instances differs")
            if axis == "canonical":
                state.canonical = params
                state.canonical_label = label
            else:
                state.nonlinear = params
                state.nonlinear_label = label
            state.anchors = None  # re-derived from the new durations
            state.undo_stack.clear()
            session.audio_cache.pop(axis, None)
            if state.canonical is not None and state.nonlinear is not None:
                _ensure_anchors(state)
            return {"state": _state_json(state), "distance": _distance_json(state)}

    # --- views ---------------------------------------------------------------

    @app.get("/sessions/{sid}/spectrogram")
    def spectrogram(sid: str, axis: str = Query("canonical"),
                    fmax: float | None = Query(None)):
        session = store.get(sid)
        with session.lock:
            state = session.state
            if axis == "warped":
                if state.canonical is None or state.nonlinear is None:
                    raise HttpError(400, "both instances must be loaded first")
                anchors = _ensure_anchors(state)
                params = resample_to_canonical(
                    MorphInstance(state.nonlinear, anchors),
                    state.canonical.frame_times,
                )
            else:
                params = _axis_params(state, axis)
            nyq = params.nyquist
            fmax = min(fmax or nyq, nyq)
            freqs = np.arange(params.n_bins) * (params.sample_rate / params.fft_size)
            mask = freqs <= fmax
            db = 10.0 * np.log10(np.maximum(params.envelope[:, mask], 1e-12))
            tile = _downsample(db, MAX_TILE)
            t_scale = np.linspace(0.0, params.duration, tile.shape[0]).tolist()
            f_scale = np.linspace(0.0, float(freqs[mask][-1]), tile.shape[1]).tolist()
            return {"times": t_scale, "freqs": f_scale, "db": tile.tolist()}

    @app.get("/sessions/{sid}/waveform")
    def waveform_view(sid: str, axis: str = Query("canonical"),
                      points: int = Query(1024)):
        session = store.get(sid)
        with session.lock:
            audio = _display_audio(session, axis)
            n = audio.samples.size
            points = min(max(points, 16), 4096)
            edges = np.linspace(0, n, points + 1).astype(np.int64)
            mins, maxs = [], []
            for a, b in zip(edges[:-1], edges[1:]):
                chunk = audio.samples[a:max(b, a + 1)]
                mins.append(float(chunk.min()))
                maxs.append(float(chunk.max()))
            return {
                "sample_rate": audio.sample_rate,
                "duration": audio.duration,
                "min": mins,
                "max": maxs,
            }

    @app.get("/sessions/{sid}/distance")
    def distance(sid: str, fmax: float | None = Query(None)):
        session = store.get(sid)
        with session.lock:
            traj = _distance_json(session.state, fmax)
            if traj is None:
                raise HttpError(400, "both instances must be loaded first")
            return traj

    # --- anchor editing ------------------------------------------------------

    @app.put("/sessions/{sid}/anchors")
    async def put_anchors(sid: str, request: Request):
        session = store.get(sid)
        doc = await request.json()
        with session.lock:
            return _mutate_anchors(session, lambda _: anchors_from_json(doc))

    @app.patch("/sessions/{sid}/anchors")
    async def patch_anchors(sid: str, request: Request):
        session = store.get(sid)
        doc = await request.json()
        op = doc.get("op")
        with session.lock:
            def apply(current: AnchorSet) -> AnchorSet:
                cols = list(current.columns)
                if op == "place_temporal":
                    t = float(doc["t"])
                    if not (0.0 <= t <= current.duration_canonical):
                        raise OutOfRange(f"t={t} outside the canonical duration")
                    scale = current.duration_instance / current.duration_canonical
                    cols.append(AnchorColumn(t_canonical=t, t_instance=t * scale))
                    cols.sort(key=lambda c: c.t_canonical)
                elif op == "move_temporal":
                    i = int(doc["index"])
                    if not (0 <= i < len(cols)):
                        raise HttpError(400, f"no temporal anchor at index {i}")
                    col = cols[i]
                    cols[i] = replace(
                        col,
                        t_canonical=float(doc.get("t_canonical", col.t_canonical)),
                        t_instance=float(doc.get("t_instance", col.t_instance)),
                    )
                elif op == "place_frequency":
                    i = int(doc["column"])
                    if not (0 <= i < len(cols)):
                        raise HttpError(400, f"no temporal anchor at index {i}")
                    f = float(doc["f"])
                    pairs = list(cols[i].freq_anchors)
                    pairs.append(FrequencyAnchorPair(
                        f_canonical=float(doc.get("f_canonical", f)), f_instance=f))
                    pairs.sort(key=lambda p: p.f_canonical)
                    cols[i] = replace(cols[i], freq_anchors=tuple(pairs))
                elif op == "move_frequency":
                    i = int(doc["column"])
                    j = int(doc["pair"])
                    if not (0 <= i < len(cols)) or not (0 <= j < len(cols[i].freq_anchors)):
                        raise HttpError(400, f"no frequency anchor ({i}, {j})")
                    pairs = list(cols[i].freq_anchors)
                    pair = pairs[j]
                    pairs[j] = FrequencyAnchorPair(
                        f_canonical=float(doc.get("f_canonical", pair.f_canonical)),
                        f_instance=float(doc.get("f_instance", pair.f_instance)),
                    )
                    cols[i] = replace(cols[i], freq_anchors=tuple(pairs))
                else:
                    raise HttpError(400, f"unknown anchor op {op!r}")
                return replace(current, columns=tuple(cols))

            return _mutate_anchors(session, apply)

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str):
        session = store.get(sid)
        with session.lock:
            state = session.state
            if state.undo_stack:
                state.anchors = state.undo_stack.pop()
            return {"state": _state_json(state), "distance": _distance_json(state)}

    @app.post("/sessions/{sid}/clear")
    def clear(sid: str):
        session = store.get(sid)
        with session.lock:
            return _mutate_anchors(session, lambda cur: replace(cur, columns=()))

    # --- synthesis and morphing ----------------------------------------------

    @app.post("/sessions/{sid}/synthesize")
    def synthesize_axis(sid: str, axis: str = Query("canonical"), seed: int = Query(0)):
        session = store.get(sid)
        with session.lock:
            params = _axis_params(session.state, axis)
        audio = synthesize(params, seed=seed)
        return Response(content=wav_bytes(audio), media_type="audio/wav")

    @app.post("/sessions/{sid}/morph")
    def morph_session(sid: str, req: MorphRequest):
        session = store.get(sid)
        with session.lock:
            obj = _session_object(session.state)
        weights = _weight_matrix(req, obj.k)
        audio = synthesize(morph(obj, weights), seed=req.seed)
        return Response(content=wav_bytes(audio), media_type="audio/wav")

    # --- persistence ---------------------------------------------------------

    @app.post("/sessions/{sid}/save-object")
    def save_object(sid: str):
        session = store.get(sid)
        with session.lock:
            obj = _session_object(session.state)
        return Response(content=morph_object_bytes(obj),
                        media_type="application/octet-stream")

    @app.post("/sessions/{sid}/save-edit")
    def save_edit(sid: str):
        session = store.get(sid)
        with session.lock:
            return Response(content=edit_state_bytes(session.state),
                            media_type="application/octet-stream")

    @app.post("/sessions/{sid}/restore-edit")
    async def restore_edit(sid: str, request: Request):
        session = store.get(sid)
        body = await request.body()
        restored = restore_edit_state_bytes(body)
        with session.lock:
            session.state = restored
            session.audio_cache.clear()
            return {"state": _state_json(restored),
                    "distance": _distance_json(restored)}

    @app.post("/morphobjects/rebase")
    def rebase_object(req: RebaseRequest):
        import base64
        new_canonical = read_vocp_bytes(base64.b64decode(req.canonical_vocp))
        obj = read_morph_object_bytes(base64.b64decode(req.morph_object))
        state = rebase(new_canonical, obj)
        return Response(content=edit_state_bytes(state),
                        media_type="application/octet-stream")

    # --- three-instance demo -------------------------------------------------

    @app.post("/demo/load")
    def demo_load(req: DemoLoadRequest):
        import base64
        if len(req.objects) != 3:
            raise HttpError(400, "exactly three sources are required")
        sources = []
        for i, text in enumerate(req.objects):
            data = base64.b64decode(text)
            if data[:4] == VOCP_MAGIC:
                sources.append((read_vocp_bytes(data), f"instance-{i}"))
            else:
                obj = read_morph_object_bytes(data)
                label = obj.canonical.label or f"instance-{i}"
                sources.append((obj.canonical.params, label))
        ref = sources[0][0]
        for p, _ in sources[1:]:
            if (p.sample_rate != ref.sample_rate or p.fft_size != ref.fft_size
                    or p.frame_period != ref.frame_period):
                raise HttpError(400, "demo sources must share sampling metadata")
        app.state.demo_sources = sources
        return {"labels": [label for _, label in sources]}

    @app.post("/demo/morph")
    def demo_morph(req: DemoMorphRequest):
        if app.state.demo_sources is None:
            raise HttpError(400, "load three sources first via /demo/load")
        if len(req.point) != 2 or len(req.triangle) != 3:
            raise HttpError(400, "point must be 2-D and triangle must have 3 vertices")
        w3 = np.array(area_coordinates(req.point, req.triangle))
        pattern = req.pattern or {}
        rows = {}
        pinned = np.array([1.0, 0.0, 0.0])
        for attr in Attribute:
            rows[attr] = w3.copy() if pattern.get(attr.value, True) else pinned.copy()
        sources = app.state.demo_sources
        canon = sources[0][0]
        instances = [MorphInstance(canon, identity_anchors(canon), label=sources[0][1])]
        for p, label in sources[1:]:
            anchors = AnchorSet((), canon.duration, p.duration, p.nyquist)
            instances.append(MorphInstance(p, anchors, label=label))
        obj = MorphObject(instances=tuple(instances))
        audio = synthesize(morph(obj, WeightMatrix(rows=rows)), seed=req.seed)
        return Response(content=wav_bytes(audio), media_type="audio/wav",
                        headers={"X-Weights": ",".join(f"{w:.6f}" for w in w3)})

    return app


app = create_app()
