"""Shape tokenizer: triplane features -> fixed-length output tokens.

Pipeline: project points to triplane features, patchify each plane into a
1D token sequence, refine with transformer blocks, then compress with a
learnable query set through stacked self- and cross-attention, and project
to the decoder embedding width. Output shape is (query_count, output_dim)
regardless of the input point count.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .config import TokenizerConfig
from .triplane import TriplaneProjector


class SelfAttentionBlock(nn.Module):
    def __init__(self, dim: int, heads: int, ff_mult: int = 4):
        super().__init__()
        self.norm1 = nn.LayerNorm(dim)
        self.attn = nn.MultiheadAttention(dim, heads, batch_first=True)
        self.norm2 = nn.LayerNorm(dim)
        self.ff = nn.Sequential(
            nn.Linear(dim, ff_mult * dim), nn.GELU(), nn.Linear(ff_mult * dim, dim)
        )

    def forward(self, x):
        h = self.norm1(x)
        x = x + self.attn(h, h, h, need_weights=False)[0]
        return x + self.ff(self.norm2(x))


class ResamplerLayer(nn.Module):
    """One self-attention step on the queries plus cross-attention to the
    plane tokens (queries as Q, plane tokens as K and V)."""

    def __init__(self, dim: int, kv_dim: int, heads: int, ff_mult: int = 4):
        super().__init__()
        self.norm_self = nn.LayerNorm(dim)
        self.self_attn = nn.MultiheadAttention(dim, heads, batch_first=True)
        self.norm_q = nn.LayerNorm(dim)
        self.norm_kv = nn.LayerNorm(kv_dim)
        self.cross_attn = nn.MultiheadAttention(
            dim, heads, batch_first=True, kdim=kv_dim, vdim=kv_dim
        )
        self.norm_ff = nn.LayerNorm(dim)
        self.ff = nn.Sequential(
            nn.Linear(dim, ff_mult * dim), nn.GELU(), nn.Linear(ff_mult * dim, dim)
        )

    def forward(self, queries, kv):
        h = self.norm_self(queries)
        queries = queries + self.self_attn(h, h, h, need_weights=False)[0]
        q = self.norm_q(queries)
        k = self.norm_kv(kv)
        queries = queries + self.cross_attn(q, k, k, need_weights=False)[0]
        return queries + self.ff(self.norm_ff(queries))


class ShapeTokenizer(nn.Module):
    def __init__(self, cfg: TokenizerConfig = TokenizerConfig()):
        super().__init__()
        self.cfg = cfg
        self.projector = TriplaneProjector(cfg)
        patch_count = cfg.plane_size // cfg.patch_size
        patch_in = cfg.patch_size * cfg.patch_size * cfg.feature_dim
        self.patch_embed = nn.Linear(patch_in, cfg.feature_dim)
        self.patch_pos = nn.Parameter(
            torch.zeros(3 * patch_count * patch_count, cfg.feature_dim)
        )
        self.plane_blocks = nn.ModuleList(
            SelfAttentionBlock(cfg.feature_dim, cfg.plane_transformer_heads)
            for _ in range(cfg.plane_transformer_depth)
        )
        self.queries = nn.Parameter(torch.zeros(cfg.query_count, cfg.query_dim))
        nn.init.normal_(self.queries, std=0.02)
        nn.init.normal_(self.patch_pos, std=0.02)
        self.resampler = nn.ModuleList(
            ResamplerLayer(cfg.query_dim, cfg.feature_dim, cfg.resampler_heads)
            for _ in range(cfg.resampler_depth)
        )
        self.out_norm = nn.LayerNorm(cfg.query_dim)
        self.out_proj = nn.Sequential(
            nn.Linear(cfg.query_dim, cfg.query_dim),
            nn.GELU(),
            nn.Linear(cfg.query_dim, cfg.output_dim),
        )

    def patchify(self, planes: torch.Tensor) -> torch.Tensor:
        """(3, H, W, D1) -> (3 * H/f * W/f, f*f*D1)."""
        f = self.cfg.patch_size
        h = self.cfg.plane_size // f
        x = planes.view(3, h, f, h, f, self.cfg.feature_dim)
        x = x.permute(0, 1, 3, 2, 4, 5).reshape(3 * h * h, f * f * self.cfg.feature_dim)
        return x

    def forward_batch(self, clouds: list[torch.Tensor]) -> torch.Tensor:
        """Batch of point clouds (variable N) -> (B, query_count, output_dim).

        Rasterization runs per cloud (data-dependent scatter); the
        transformer stack runs batched.
        """
        planes = torch.stack([self.patchify(self.projector(p)) for p in clouds])
        v = self.patch_embed(planes) + self.patch_pos
        for block in self.plane_blocks:
            v = block(v)
        q = self.queries.unsqueeze(0).expand(len(clouds), -1, -1)
        for layer in self.resampler:
            q = layer(q, v)
        return self.out_proj(self.out_norm(q))

    def forward(self, points: torch.Tensor) -> torch.Tensor:
        """Points (N, 3) in [-1, 1] -> shape tokens (query_count, output_dim)."""
        return self.forward_batch([points]).squeeze(0)


def tokenize(model: ShapeTokenizer, points: torch.Tensor) -> torch.Tensor:
    """Deterministic eval-mode tokenization."""
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            return model(points)
    finally:
        model.train(was_training)
