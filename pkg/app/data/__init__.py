from app.data.masking import assign_patterns, mask_missing, sample_missing_pattern
from app.data.splits import split_dataset
from app.data.synthetic import synth_generate
from app.data.tags import decode_tag, encode_tag, valid_patterns

__all__ = [
    "assign_patterns",
    "decode_tag",
    "encode_tag",
    "mask_missing",
    "sample_missing_pattern",
    "split_dataset",
    "synth_generate",
    "valid_patterns",
]
