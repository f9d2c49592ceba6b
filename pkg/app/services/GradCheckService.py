"""Finite-difference verification of the whole training objective."""

import logging

import numpy as np

from app.autograd.gradcheck import finite_diff_report
from app.data.masking import mask_missing
from app.data.synthetic import synth_generate
from app.data.tags import valid_patterns
from app.exceptions.CustomExceptions import ConfigError
from app.losses.objective import TateObjective
from app.models.TateModel import TateModel
from app.models.TeacherModel import TeacherModel
from app.schemas.config_schema import LossVariants, LossWeights, ModelConfig, SynthSpec
from app.schemas.data_schema import MissingPattern
from app.schemas.metrics_schema import GradCheckReport

logger = logging.getLogger(__name__)

TINY_CONFIG = ModelConfig(
    hidden=16,
    heads=2,
    class_count=3,
    dropout=0.0,
    visual_dim=6,
    acoustic_dim=5,
    textual_dim=7,
)
TOLERANCE = 1e-4


class GradCheckService:
    def __init__(
        self,
        config: ModelConfig = TINY_CONFIG,
        weights: LossWeights = LossWeights(),
        variants: LossVariants = LossVariants(),
        samples: int = 2,
        max_coords: int | None = 16,
        eps: float = 1e-5,
        tolerance: float = TOLERANCE,
        seed: int = 0,
    ):
        if config.dropout > 0:
            raise ConfigError(
                f"gradient check needs a deterministic objective, dropout is {config.dropout}"
            )
        if samples < 1:
            raise ConfigError(f"gradient check needs at least one sample, got {samples}")
        self.config = config
        self.weights = weights
        self.variants = variants
        self.samples = samples
        self.max_coords = max_coords
        self.eps = eps
        self.tolerance = tolerance
        self.seed = seed

    def _segments(self):
        spec = SynthSpec(
            classes=self.config.class_count,
            per_class=self.samples,
            visual_dim=self.config.visual_dim,
            acoustic_dim=self.config.acoustic_dim,
            textual_dim=self.config.textual_dim,
            visual_len=3,
            acoustic_len=4,
            textual_len=2,
            seed=self.seed,
        )
        segments = list(synth_generate(spec).segments[: self.samples])
        forced = MissingPattern(missing=frozenset(self.config.disabled))
        dropped = next((p for p in valid_patterns(self.config.modalities) if len(p.missing) == 1), forced)
        # Alternate complete and incomplete samples so the tag path carries signal
        patterns = [forced, dropped.union(forced)]
        return [mask_missing(s, patterns[i % 2]) for i, s in enumerate(segments)], segments

    def run(self) -> GradCheckReport:
        rng = np.random.default_rng(self.seed)
        model = TateModel(self.config, rng)
        masked, complete = self._segments()
        objective = TateObjective(self.weights, self.variants, use_tag=self.config.use_tag)
        e_pre = None
        if "forward" in objective.active_terms():
            teacher = TeacherModel(self.config, rng)
            teacher.freeze()
            e_pre = teacher.represent(complete).value
        labels = np.array([s.label for s in masked])

        def f():
            return objective(model.forward(masked, training=False), e_pre, labels).total

        per_parameter = finite_diff_report(
            f, model.named_parameters(), eps=self.eps, max_coords=self.max_coords, seed=self.seed
        )
        groups = {
            group: max(per_parameter[name] for name in names)
            for group, names in model.parameter_groups().items()
        }
        report = GradCheckReport(tolerance=self.tolerance, groups=groups)
        for group, error in groups.items():
            if error < self.tolerance:
                logger.info(f"gradcheck {group}: {error:.3e}")
            else:
                logger.error(f"gradcheck {group}: {error:.3e} exceeds {self.tolerance:.0e}")
        return report
