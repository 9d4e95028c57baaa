"""Encoders: a deterministic built-in DSP model, plus an optional loader for
pretrained hf:<name> checkpoints when the ML stack and weights are present."""

import hashlib
import math

import numpy as np

from .dsp import N_MELS, SAMPLE_RATE, logmel, smooth
from .errors import ModelLoadError

EMBEDDING_DIM = 192

_PROJECTIONS: dict[int, np.ndarray] = {}


def _projection(in_dim: int) -> np.ndarray:
    """Fixed Gaussian projection to EMBEDDING_DIM; seeded by a constant so
    every process, machine, and run derives the same matrix."""
    if in_dim not in _PROJECTIONS:
        digest = hashlib.sha256(b"tse-forge-adapter:projection:v1").digest()
        gen = np.random.Generator(np.random.Philox(int.from_bytes(digest[:8], "big")))
        _PROJECTIONS[in_dim] = gen.normal(0.0, 1.0 / math.sqrt(in_dim), (EMBEDDING_DIM, in_dim))
    return _PROJECTIONS[in_dim]


def embed_frames(feats: np.ndarray) -> np.ndarray:
    """Stats pooling (mean + std over time) projected to a unit 192-vector."""
    stats = np.concatenate([feats.mean(axis=0), feats.std(axis=0)])
    vec = _projection(stats.shape[0]) @ stats
    norm = np.linalg.norm(vec)
    # the log-mel floor keeps even silence away from the origin
    return vec / norm if norm > 0.0 else vec


class BuiltinDsp:
    """Log-mel front end whose "layers" are successive temporal smoothings."""

    name = "builtin-dsp"
    max_layer = 12
    frame_dim = N_MELS

    def frames(self, samples: np.ndarray, layer: int) -> np.ndarray:
        return smooth(logmel(samples), layer)

    def embed(self, feats: np.ndarray) -> np.ndarray:
        return embed_frames(feats)


class PretrainedEncoder:
    """Wraps a transformers audio encoder; frame features are the chosen
    hidden-state layer, embeddings its projected mean+std statistics."""

    def __init__(self, name, feature_extractor, encoder):
        self.name = name
        self._extractor = feature_extractor
        self._encoder = encoder
        self.max_layer = int(encoder.config.num_hidden_layers)
        self.frame_dim = int(encoder.config.hidden_size)

    def frames(self, samples: np.ndarray, layer: int) -> np.ndarray:
        import torch

        inputs = self._extractor(samples, sampling_rate=SAMPLE_RATE, return_tensors="pt")
        with torch.no_grad():
            out = self._encoder(**inputs, output_hidden_states=True)
        return out.hidden_states[layer][0].cpu().numpy().astype(np.float64)

    def embed(self, feats: np.ndarray) -> np.ndarray:
        return embed_frames(feats)


def _load_pretrained(name: str) -> PretrainedEncoder:
    try:
        import torch  # noqa: F401
        from transformers import AutoFeatureExtractor, AutoModel
    except ImportError as exc:
        raise ModelLoadError(f"hf:{name} needs torch and transformers: {exc}") from exc
    try:
        # local_files_only keeps this usable offline: either the weights are
        # already cached or the model is unavailable, never a silent download
        extractor = AutoFeatureExtractor.from_pretrained(name, local_files_only=True)
        encoder = AutoModel.from_pretrained(name, local_files_only=True)
    except Exception as exc:
        raise ModelLoadError(f"no local weights for hf:{name}: {exc}") from exc
    encoder.eval()
    return PretrainedEncoder(f"hf:{name}", extractor, encoder)


def load_model(model_id: str):
    if model_id == BuiltinDsp.name:
        return BuiltinDsp()
    if model_id.startswith("hf:"):
        return _load_pretrained(model_id[3:])
    raise ModelLoadError(f"unknown model {model_id!r}; use 'builtin-dsp' or 'hf:<name>'")
