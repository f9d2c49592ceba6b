from app.losses.divergence import EPS, cosine_loss, js_divergence, kl_divergence, mean_absolute_error
from app.losses.objective import (
    LossBreakdown,
    TateObjective,
    backward_loss,
    cls_loss,
    forward_loss,
    tag_loss,
    total_loss,
)

__all__ = [
    "EPS",
    "LossBreakdown",
    "TateObjective",
    "backward_loss",
    "cls_loss",
    "cosine_loss",
    "forward_loss",
    "js_divergence",
    "kl_divergence",
    "mean_absolute_error",
    "tag_loss",
    "total_loss",
]
