"""Configuration dataclasses for the tokenizer, decoder, and toy trainer."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass


@dataclass(frozen=True)
class TokenizerConfig:
    """Shape tokenizer dimensions.

    Defaults are the full-scale contract: 128x128 planes with 32 feature
    channels, 16x16 patches, 128 learnable query tokens of width 1024
    refined by 12 self+cross attention layers, projected to 2048-wide
    output tokens.
    """

    plane_size: int = 128  # H == W
    feature_dim: int = 32  # D1
    patch_size: int = 16  # f
    point_mlp_hidden: int = 64
    plane_transformer_depth: int = 4
    plane_transformer_heads: int = 4
    query_count: int = 128  # L
    query_dim: int = 1024  # D2
    resampler_depth: int = 12
    resampler_heads: int = 8
    output_dim: int = 2048  # D: decoder embedding width

    def __post_init__(self):
        if self.plane_size % self.patch_size != 0:
            raise ValueError("plane_size must be a multiple of patch_size")

    @property
    def patch_tokens(self) -> int:
        n = self.plane_size // self.patch_size
        return 3 * n * n


TOY_TOKENIZER = TokenizerConfig(
    plane_size=32,
    feature_dim=16,
    patch_size=8,
    point_mlp_hidden=32,
    plane_transformer_depth=2,
    plane_transformer_heads=2,
    query_count=16,
    query_dim=64,
    resampler_depth=2,
    resampler_heads=4,
    output_dim=128,
)


@dataclass(frozen=True)
class DecoderConfig:
    """Small character-level autoregressive decoder with a shape-token prefix."""

    embed_dim: int = 128  # must equal TokenizerConfig.output_dim when paired
    depth: int = 2
    heads: int = 4
    ff_dim: int = 384
    max_text_len: int = 384


@dataclass
class TrainConfig:
    dataset_dir: str = ""
    out_dir: str = "toy_run"
    sample_count: int = 32
    point_count: int = 512
    batch_size: int = 16
    learning_rate: float = 1e-3
    max_steps: int = 4000
    target_loss: float = 0.002  # per-character cross entropy early stop
    seed: int = 0
    log_every: int = 50

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)
