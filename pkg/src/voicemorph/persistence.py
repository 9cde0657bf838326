"""File formats: .vocp (binary parameters), .morb (morph objects), .medit (edit state).

.vocp is a 48-byte little-endian header followed by float64 arrays. .morb and
.medit are UTF-8 JSON manifests embedding .vocp payloads as base64. Readers
raise typed errors on any malformed input; writers go through a temp file and
an atomic rename.
"""
from __future__ import annotations

import base64
import json
import os
import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .anchors import AnchorColumn, AnchorSet, FrequencyAnchorPair, MorphInstance
from .errors import (
    CorruptFile,
    InvalidObjectFile,
    NotAVocpFile,
    RateMismatch,
    UnsupportedVersion,
    VoiceMorphError,
)
from .morph import MorphObject
from .vocoder import VocoderParams

VOCP_MAGIC = b"VOCP"
VOCP_VERSION = 1
# magic, version, sample_rate, (pad), frame_period, fft_size, frame_count, reserved
_VOCP_HEADER = struct.Struct("<4sII4xdII16x")
MORB_FORMAT = "voicemorph-morph-object"
MEDIT_FORMAT = "voicemorph-edit-state"
SCHEMA_VERSION = 1


def _atomic_write(path, data: bytes) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


# --- .vocp -------------------------------------------------------------------

def vocp_bytes(p: VocoderParams) -> bytes:
    p.validate()
    header = _VOCP_HEADER.pack(
        VOCP_MAGIC, VOCP_VERSION, p.sample_rate, p.frame_period,
        p.fft_size, p.frame_count,
    )
    return b"".join([
        header,
        np.ascontiguousarray(p.fo, dtype="<f8").tobytes(),
        np.ascontiguousarray(p.envelope, dtype="<f8").tobytes(),
        np.ascontiguousarray(p.aperiodicity, dtype="<f8").tobytes(),
    ])


def write_vocp(path, p: VocoderParams) -> None:
    _atomic_write(path, vocp_bytes(p))


def read_vocp_bytes(data: bytes) -> VocoderParams:
    if len(data) < 4 or data[:4] != VOCP_MAGIC:
        raise NotAVocpFile("missing VOCP magic bytes")
    if len(data) < _VOCP_HEADER.size:
        raise CorruptFile("header truncated")
    _, version, sample_rate, frame_period, fft_size, frame_count = \
        _VOCP_HEADER.unpack_from(data)
    if version != VOCP_VERSION:
        raise UnsupportedVersion(f"unsupported vocp version {version}")
    if (sample_rate <= 0 or not np.isfinite(frame_period) or frame_period <= 0
            or fft_size <= 0 or fft_size % 2 or frame_count <= 0):
        raise CorruptFile("header fields out of range")
    n_bins = fft_size // 2 + 1
    expected = _VOCP_HEADER.size + 8 * frame_count * (1 + 2 * n_bins)
    if len(data) != expected:
        raise CorruptFile(f"payload size {len(data)} != expected {expected}")
    flat = np.frombuffer(data, dtype="<f8", offset=_VOCP_HEADER.size)
    fo = flat[:frame_count].copy()
    env = flat[frame_count: frame_count * (1 + n_bins)].reshape(frame_count, n_bins).copy()
    ap = flat[frame_count * (1 + n_bins):].reshape(frame_count, n_bins).copy()
    params = VocoderParams(
        sample_rate=sample_rate, frame_period=frame_period, fft_size=fft_size,
        fo=fo, envelope=env, aperiodicity=ap,
    )
    try:
        params.validate()
    except VoiceMorphError as exc:
        raise CorruptFile(f"payload violates parameter invariants: {exc}") from exc
    return params


def read_vocp(source) -> VocoderParams:
    if isinstance(source, (bytes, bytearray)):
        return read_vocp_bytes(bytes(source))
    with open(source, "rb") as fh:
        return read_vocp_bytes(fh.read())


# --- anchor/JSON helpers -----------------------------------------------------

def anchors_to_json(a: AnchorSet) -> dict:
    return {
        "duration_canonical": a.duration_canonical,
        "duration_instance": a.duration_instance,
        "nyquist": a.nyquist,
        "columns": [
            {
                "t_canonical": c.t_canonical,
                "t_instance": c.t_instance,
                "freq_anchors": [[p.f_canonical, p.f_instance] for p in c.freq_anchors],
            }
            for c in a.columns
        ],
    }


def anchors_from_json(d: dict) -> AnchorSet:
    columns = tuple(
        AnchorColumn(
            t_canonical=float(c["t_canonical"]),
            t_instance=float(c["t_instance"]),
            freq_anchors=tuple(
                FrequencyAnchorPair(float(fc), float(fi)) for fc, fi in c["freq_anchors"]
            ),
        )
        for c in d["columns"]
    )
    return AnchorSet(
        columns=columns,
        duration_canonical=float(d["duration_canonical"]),
        duration_instance=float(d["duration_instance"]),
        nyquist=float(d["nyquist"]),
    )


def _b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def _unb64(text: str) -> bytes:
    try:
        return base64.b64decode(text.encode("ascii"), validate=True)
    except Exception as exc:
        raise CorruptFile(f"invalid base64 payload: {exc}") from exc


# --- .morb -------------------------------------------------------------------

def morph_object_bytes(obj: MorphObject) -> bytes:
    doc = {
        "format": MORB_FORMAT,
        "schema_version": SCHEMA_VERSION,
        "canonical_index": obj.canonical_index,
        "metadata": obj.metadata,
        "instances": [
            {
                "label": inst.label,
                "anchors": anchors_to_json(inst.anchors),
                "params": _b64(vocp_bytes(inst.params)),
            }
            for inst in obj.instances
        ],
    }
    return json.dumps(doc, indent=1).encode("utf-8")


def write_morph_object(path, obj: MorphObject) -> None:
    _atomic_write(path, morph_object_bytes(obj))


def _load_manifest(data: bytes, expected_format: str) -> dict:
    try:
        doc = json.loads(data.decode("utf-8"))
    except Exception as exc:
        raise InvalidObjectFile(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != expected_format:
        raise InvalidObjectFile(f"not a {expected_format} manifest")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise UnsupportedVersion(f"unsupported schema version {version}")
    return doc


def read_morph_object_bytes(data: bytes) -> MorphObject:
    doc = _load_manifest(data, MORB_FORMAT)
    try:
        instances = tuple(
            MorphInstance(
                params=read_vocp_bytes(_unb64(entry["params"])),
                anchors=anchors_from_json(entry["anchors"]),
                label=str(entry.get("label", "")),
            )
            for entry in doc["instances"]
        )
        return MorphObject(
            instances=instances,
            canonical_index=int(doc["canonical_index"]),
            metadata=doc.get("metadata", {}),
        )
    except VoiceMorphError:
        raise
    except Exception as exc:
        raise InvalidObjectFile(f"malformed morph object: {exc}") from exc


def read_morph_object(source) -> MorphObject:
    if isinstance(source, (bytes, bytearray)):
        return read_morph_object_bytes(bytes(source))
    with open(source, "rb") as fh:
        return read_morph_object_bytes(fh.read())


# --- edit state / .medit -----------------------------------------------------

@dataclass(frozen=True)
class ViewState:
    f_limit: float = 6000.0
    display_mode: str = "variable"  # canonical | nonlinear | variable


@dataclass
class EditState:
    """In-progress anchor alignment between two loaded instances."""

    canonical: VocoderParams | None = None
    nonlinear: VocoderParams | None = None
    anchors: AnchorSet | None = None
    undo_stack: list = field(default_factory=list)
    view: ViewState = field(default_factory=ViewState)
    canonical_label: str = ""
    nonlinear_label: str = ""


def edit_state_bytes(state: EditState) -> bytes:
    doc = {
        "format": MEDIT_FORMAT,
        "schema_version": SCHEMA_VERSION,
        "canonical": _b64(vocp_bytes(state.canonical)) if state.canonical else None,
        "nonlinear": _b64(vocp_bytes(state.nonlinear)) if state.nonlinear else None,
        "anchors": anchors_to_json(state.anchors) if state.anchors else None,
        "undo_stack": [anchors_to_json(a) for a in state.undo_stack],
        "view": {"f_limit": state.view.f_limit, "display_mode": state.view.display_mode},
        "canonical_label": state.canonical_label,
        "nonlinear_label": state.nonlinear_label,
    }
    return json.dumps(doc, indent=1).encode("utf-8")


def save_edit_state(path, state: EditState) -> None:
    _atomic_write(path, edit_state_bytes(state))


def restore_edit_state_bytes(data: bytes) -> EditState:
    doc = _load_manifest(data, MEDIT_FORMAT)
    try:
        anchors = doc.get("anchors")
        state = EditState(
            canonical=read_vocp_bytes(_unb64(doc["canonical"])) if doc.get("canonical") else None,
            nonlinear=read_vocp_bytes(_unb64(doc["nonlinear"])) if doc.get("nonlinear") else None,
            anchors=anchors_from_json(anchors) if anchors else None,
            undo_stack=[anchors_from_json(a) for a in doc.get("undo_stack", [])],
            view=ViewState(
                f_limit=float(doc["view"]["f_limit"]),
                display_mode=str(doc["view"]["display_mode"]),
            ),
            canonical_label=str(doc.get("canonical_label", "")),
            nonlinear_label=str(doc.get("nonlinear_label", "")),
        )
    except VoiceMorphError:
        raise
    except Exception as exc:
        raise CorruptFile(f"malformed edit state: {exc}") from exc
    if state.anchors is not None and state.nonlinear is None:
        raise CorruptFile("anchors present but the referenced instance payload is missing")
    return state


def restore_edit_state(source) -> EditState:
    if isinstance(source, (bytes, bytearray)):
        return restore_edit_state_bytes(bytes(source))
    with open(source, "rb") as fh:
        return restore_edit_state_bytes(fh.read())


# --- re-anchoring ------------------------------------------------------------

def rebase(new_canonical: VocoderParams, obj: MorphObject) -> EditState:
    """Start aligning a morph object's content against new canonical parameters.

    The object's canonical instance moves to the non-linear axes; its stored
    canonical-side anchor coordinates become the instance-side anchors of the
    fresh alignment, with the canonical side initialized by linear scaling.
    """
    new_canonical.validate()
    donor = obj.canonical
    if new_canonical.sample_rate != donor.params.sample_rate:
        raise RateMismatch(
            f"sample rates differ: {new_canonical.sample_rate} vs "
            f"{donor.params.sample_rate}"
        )
    source = next(
        inst for i, inst in enumerate(obj.instances) if i != obj.canonical_index
    )
    d_old = source.anchors.duration_canonical
    d_new = new_canonical.duration
    scale = d_new / d_old
    columns = tuple(
        AnchorColumn(
            t_canonical=c.t_canonical * scale,
            t_instance=c.t_canonical,
            freq_anchors=tuple(
                FrequencyAnchorPair(p.f_canonical, p.f_canonical)
                for p in c.freq_anchors
            ),
        )
        for c in source.anchors.columns
    )
    anchors = AnchorSet(
        columns=columns,
        duration_canonical=d_new,
        duration_instance=donor.params.duration,
        nyquist=new_canonical.nyquist,
    )
    return EditState(
        canonical=new_canonical,
        nonlinear=donor.params,
        anchors=anchors,
        canonical_label="new",
        nonlinear_label=donor.label or "object-canonical",
    )
