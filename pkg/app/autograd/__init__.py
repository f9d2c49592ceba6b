from app.autograd.engine import Node, Tensor, backward
from app.autograd.gradcheck import finite_diff_check, finite_diff_report

__all__ = ["Node", "Tensor", "backward", "finite_diff_check", "finite_diff_report"]
