"""Voice morphing with a classical vocoder and anchor-based warps."""

from .audio import Waveform, read_wav, write_wav, wav_bytes
from .vocoder import AnalysisConfig, VocoderParams, analyze, synthesize
from .anchors import (
    AnchorColumn,
    AnchorSet,
    FrequencyAnchorPair,
    MorphInstance,
    frequency_pairs_at,
    identity_anchors,
    resample_to_canonical,
    warp_frequency,
    warp_time,
)
from .align import DistanceTrajectory, alignment_distance
from .morph import (
    Attribute,
    MorphObject,
    WeightMatrix,
    area_coordinates,
    continuum,
    inverse_transform,
    morph,
    morph_scalar,
    morph_frequency_axis,
    morph_time_axis,
    rate_to_weights,
    transform,
)
from .persistence import (
    EditState,
    ViewState,
    read_morph_object,
    read_vocp,
    rebase,
    restore_edit_state,
    save_edit_state,
    write_morph_object,
    write_vocp,
)
from . import errors

__all__ = [
    "Waveform", "read_wav", "write_wav", "wav_bytes",
    "AnalysisConfig", "VocoderParams", "analyze", "synthesize",
    "AnchorColumn", "AnchorSet", "FrequencyAnchorPair", "MorphInstance",
    "frequency_pairs_at", "identity_anchors", "resample_to_canonical",
    "warp_frequency", "warp_time",
    "DistanceTrajectory", "alignment_distance",
    "Attribute", "MorphObject", "WeightMatrix", "area_coordinates",
    "continuum", "inverse_transform", "morph", "morph_scalar",
    "morph_frequency_axis", "morph_time_axis", "rate_to_weights", "transform",
    "EditState", "ViewState", "read_morph_object", "read_vocp", "rebase",
    "restore_edit_state", "save_edit_state", "write_morph_object", "write_vocp",
    "errors",
]
