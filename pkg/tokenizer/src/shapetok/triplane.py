"""Triplane projection: per-point features max-pooled onto three planes."""

from __future__ import annotations

import torch
import torch.nn as nn

from .config import TokenizerConfig


def quantize_to_pixels(coords: torch.Tensor, size: int) -> torch.Tensor:
    """Map coordinates in [-1, 1] to pixel indices floor((c+1)/2 * size)."""
    idx = torch.floor((coords + 1.0) / 2.0 * size)
    return idx.clamp_(0, size - 1).long()


class TriplaneProjector(nn.Module):
    """Shared point MLP followed by max-pool rasterization to three planes.

    Output tensor has shape (3, H, W, D1); pixels no point projects to are
    exactly zero. Max-pooling makes the result invariant (bitwise) to
    point order and duplication.
    """

    def __init__(self, cfg: TokenizerConfig):
        super().__init__()
        self.cfg = cfg
        self.point_mlp = nn.Sequential(
            nn.Linear(3, cfg.point_mlp_hidden),
            nn.GELU(),
            nn.Linear(cfg.point_mlp_hidden, cfg.feature_dim),
        )

    def forward(self, points: torch.Tensor) -> torch.Tensor:
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError("points must have shape (N, 3)")
        if len(points) == 0:
            raise ValueError("empty point cloud")
        pts = points.clamp(-1.0, 1.0)
        feats = self.point_mlp(pts)  # (N, D1)

        size = self.cfg.plane_size
        d1 = self.cfg.feature_dim
        ix = quantize_to_pixels(pts[:, 0], size)
        iy = quantize_to_pixels(pts[:, 1], size)
        iz = quantize_to_pixels(pts[:, 2], size)
        # plane 0: (x, y); plane 1: (y, z); plane 2: (x, z)
        rows = torch.stack([ix, iy, ix])
        cols = torch.stack([iy, iz, iz])
        plane_ids = torch.arange(3, device=points.device).unsqueeze(1)
        flat_idx = (plane_ids * size * size + rows * size + cols).reshape(-1)  # (3N,)

        neg_inf = torch.finfo(feats.dtype).min
        planes = feats.new_full((3 * size * size, d1), neg_inf)
        planes.scatter_reduce_(
            0,
            flat_idx.unsqueeze(1).expand(-1, d1),
            feats.repeat(3, 1),
            reduce="amax",
            include_self=True,
        )
        planes = torch.where(planes == neg_inf, torch.zeros_like(planes), planes)
        return planes.view(3, size, size, d1)
