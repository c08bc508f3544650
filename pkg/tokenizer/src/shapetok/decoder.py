"""Character-level autoregressive decoder with a shape-token prefix.

The decoder consumes a sequence [shape tokens .. BOS c1 c2 ..] under a
causal mask and predicts the next character at every text position; shape
tokens occupy the first ``prefix_len`` positions and contribute context
only. Stands in for a large language model at toy scale while preserving
the multimodal-prefix interface.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from .config import DecoderConfig

PAD, BOS, EOS = 0, 1, 2
SPECIAL = 3


class CharVocab:
    def __init__(self, corpus: list[str]):
        chars = sorted({c for text in corpus for c in text})
        self.itos = {i + SPECIAL: c for i, c in enumerate(chars)}
        self.stoi = {c: i for i, c in self.itos.items()}
        self.size = SPECIAL + len(chars)

    def encode(self, text: str) -> list[int]:
        return [BOS] + [self.stoi[c] for c in text] + [EOS]

    def decode(self, ids) -> str:
        return "".join(self.itos.get(int(i), "") for i in ids if int(i) >= SPECIAL)


class ProgramDecoder(nn.Module):
    def __init__(self, cfg: DecoderConfig, vocab_size: int, prefix_len: int):
        super().__init__()
        self.cfg = cfg
        self.prefix_len = prefix_len
        self.char_embed = nn.Embedding(vocab_size, cfg.embed_dim)
        self.pos_embed = nn.Parameter(
            torch.zeros(prefix_len + cfg.max_text_len + 2, cfg.embed_dim)
        )
        nn.init.normal_(self.pos_embed, std=0.02)
        layer = nn.TransformerEncoderLayer(
            d_model=cfg.embed_dim,
            nhead=cfg.heads,
            dim_feedforward=cfg.ff_dim,
            batch_first=True,
            norm_first=True,
            dropout=0.0,
            activation="gelu",
        )
        self.blocks = nn.TransformerEncoder(layer, cfg.depth)
        self.norm = nn.LayerNorm(cfg.embed_dim)
        self.head = nn.Linear(cfg.embed_dim, vocab_size)

    def forward(self, shape_tokens: torch.Tensor, char_ids: torch.Tensor) -> torch.Tensor:
        """(B, L, D) prefix + (B, T) char ids -> logits (B, T, vocab)."""
        b, t = char_ids.shape
        chars = self.char_embed(char_ids)
        seq = torch.cat([shape_tokens, chars], dim=1)
        seq = seq + self.pos_embed[: seq.shape[1]]
        mask = nn.Transformer.generate_square_subsequent_mask(
            seq.shape[1], device=seq.device, dtype=seq.dtype
        )
        out = self.blocks(seq, mask=mask, is_causal=True)
        return self.head(self.norm(out[:, self.prefix_len :]))

    def loss(self, shape_tokens, char_ids) -> torch.Tensor:
        """Next-character cross entropy over text positions (PAD ignored)."""
        logits = self.forward(shape_tokens, char_ids[:, :-1])
        return F.cross_entropy(
            logits.reshape(-1, logits.shape[-1]),
            char_ids[:, 1:].reshape(-1),
            ignore_index=PAD,
        )

    @torch.no_grad()
    def greedy_decode(self, shape_tokens: torch.Tensor, max_len: int) -> list[int]:
        """Greedy generation from a (L, D) prefix until EOS."""
        self.eval()
        ids = torch.tensor([[BOS]], dtype=torch.long, device=shape_tokens.device)
        prefix = shape_tokens.unsqueeze(0)
        for _ in range(max_len):
            logits = self.forward(prefix, ids)
            nxt = int(logits[0, -1].argmax())
            ids = torch.cat([ids, torch.tensor([[nxt]], device=ids.device)], dim=1)
            if nxt == EOS:
                break
        return ids[0].tolist()
