"""shapetok: toy-scale triplane shape tokenizer and program decoder.

Consumes datasets written by the shapeforge CLI (JSONL shards plus PLY
point clouds) purely through their file formats.
"""

from .config import TOY_TOKENIZER, DecoderConfig, TokenizerConfig, TrainConfig
from .data import Sample, load_dataset, read_ply_points, resample_points
from .decoder import CharVocab, ProgramDecoder
from .tokenizer import ShapeTokenizer, tokenize
from .train import ToyModel, TrainResult, build_toy_model, greedy_texts, load_checkpoint, train_toy
from .triplane import TriplaneProjector, quantize_to_pixels

__all__ = [
    "TOY_TOKENIZER",
    "CharVocab",
    "DecoderConfig",
    "ProgramDecoder",
    "Sample",
    "ShapeTokenizer",
    "TokenizerConfig",
    "ToyModel",
    "TrainConfig",
    "TrainResult",
    "TriplaneProjector",
    "build_toy_model",
    "greedy_texts",
    "load_checkpoint",
    "load_dataset",
    "quantize_to_pixels",
    "read_ply_points",
    "resample_points",
    "tokenize",
    "train_toy",
]
