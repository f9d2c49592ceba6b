import numpy as np

from app.schemas.metrics_schema import Metrics


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray, classes: int) -> np.ndarray:
    """Counts with true classes on rows and predictions on columns"""
    matrix = np.zeros((classes, classes), dtype=np.int64)
    np.add.at(matrix, (np.asarray(y_true, dtype=np.int64), np.asarray(y_pred, dtype=np.int64)), 1)
    return matrix


def metrics_from_confusion(matrix: np.ndarray) -> Metrics:
    """Accuracy and macro-F1; a class with P + R = 0 scores F1 = 0"""
    matrix = np.asarray(matrix, dtype=np.int64)
    total = int(matrix.sum())
    tp = np.diag(matrix).astype(np.float64)
    predicted = matrix.sum(axis=0).astype(np.float64)
    actual = matrix.sum(axis=1).astype(np.float64)
    precision = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    recall = np.divide(tp, actual, out=np.zeros_like(tp), where=actual > 0)
    denom = precision + recall
    f1 = np.divide(2.0 * precision * recall, denom, out=np.zeros_like(tp), where=denom > 0)
    return Metrics(
        accuracy=float(tp.sum() / total) if total else 0.0,
        macro_f1=float(f1.mean()),
        per_class_f1=[float(x) for x in f1],
        confusion=matrix.tolist(),
        samples=total,
    )


def compute_metrics(y_true: np.ndarray, y_pred: np.ndarray, classes: int) -> Metrics:
    return metrics_from_confusion(confusion_matrix(y_true, y_pred, classes))
