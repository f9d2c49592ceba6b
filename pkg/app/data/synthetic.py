"""Desk-scale stand-in for precomputed multimodal features.

Each class owns a latent code shared by all three modalities; a per-modality
random projection of that code gives the class anchor, so every modality alone
carries (noisy) evidence of the class and the modalities agree with each other.
Every timestep is anchor + isotropic Gaussian noise.
"""

import logging

import numpy as np

from app.schemas.config_schema import SynthSpec
from app.schemas.data_schema import MODALITIES, Dataset, Modality, Segment

logger = logging.getLogger(__name__)


def _class_anchors(spec: SynthSpec, rng: np.random.Generator) -> dict[Modality, np.ndarray]:
    latent = rng.standard_normal((spec.classes, spec.latent_dim))
    anchors: dict[Modality, np.ndarray] = {}
    for modality in MODALITIES:
        projection = rng.standard_normal((spec.latent_dim, spec.dim(modality)))
        raw = latent @ projection
        norms = np.linalg.norm(raw, axis=1, keepdims=True)
        anchors[modality] = spec.separation * raw / np.maximum(norms, 1e-12)
    return anchors


def synth_generate(spec: SynthSpec) -> Dataset:
    rng = np.random.default_rng(spec.seed)
    anchors = _class_anchors(spec, rng)
    segments: list[Segment] = []
    for label in range(spec.classes):
        for k in range(spec.per_class):
            features: dict[str, np.ndarray] = {}
            for modality in MODALITIES:
                longest = spec.max_len(modality)
                length = int(rng.integers((longest + 1) // 2, longest + 1))
                noise = rng.standard_normal((length, spec.dim(modality))) * spec.noise
                features[modality.value] = anchors[modality][label] + noise
            segments.append(Segment(id=f"c{label}-{k:05d}", label=label, **features))
    if spec.separation == 0:
        logger.warning("synthetic data generated with separation 0: no class signal")
    return Dataset.from_segments(segments, class_count=spec.classes)
