"""Toy training harness: overfit the tokenizer + decoder on a small corpus.

Trains the shape tokenizer jointly with the character decoder using
next-token cross entropy on program text, exactly the interface a large
decoder would see (shape tokens as a multimodal prefix). Writes a
checkpoint, a config snapshot, and a loss curve CSV.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .config import TOY_TOKENIZER, DecoderConfig, TokenizerConfig, TrainConfig
from .data import Sample, load_dataset, resample_points
from .decoder import PAD, CharVocab, ProgramDecoder
from .tokenizer import ShapeTokenizer


@dataclass
class ToyModel:
    tokenizer: ShapeTokenizer
    decoder: ProgramDecoder
    vocab: CharVocab

    def shape_tokens(self, points: torch.Tensor) -> torch.Tensor:
        return self.tokenizer(points)


@dataclass
class TrainResult:
    initial_loss: float
    final_loss: float
    steps: int
    checkpoint: Path
    loss_csv: Path
    memorized: int
    sample_count: int


def build_toy_model(
    corpus: list[str],
    tok_cfg: TokenizerConfig = TOY_TOKENIZER,
    dec_cfg: DecoderConfig | None = None,
) -> ToyModel:
    vocab = CharVocab(corpus)
    dec_cfg = dec_cfg or DecoderConfig(embed_dim=tok_cfg.output_dim)
    if dec_cfg.embed_dim != tok_cfg.output_dim:
        raise ValueError("decoder embed_dim must equal tokenizer output_dim")
    decoder = ProgramDecoder(dec_cfg, vocab.size, prefix_len=tok_cfg.query_count)
    return ToyModel(ShapeTokenizer(tok_cfg), decoder, vocab)


def _encode_batch(vocab: CharVocab, texts: list[str], device) -> torch.Tensor:
    rows = [vocab.encode(t) for t in texts]
    width = max(len(r) for r in rows)
    out = torch.full((len(rows), width), PAD, dtype=torch.long, device=device)
    for i, r in enumerate(rows):
        out[i, : len(r)] = torch.tensor(r, dtype=torch.long, device=device)
    return out


def _prep_points(samples: list[Sample], count: int, seed: int) -> list[torch.Tensor]:
    return [
        torch.from_numpy(resample_points(s.points, count, seed + i)).float()
        for i, s in enumerate(samples)
    ]


def greedy_texts(model: ToyModel, clouds: list[torch.Tensor], max_len: int) -> list[str]:
    model.tokenizer.eval()
    model.decoder.eval()
    outputs = []
    with torch.no_grad():
        for pts in clouds:
            prefix = model.tokenizer(pts)
            ids = model.decoder.greedy_decode(prefix, max_len)
            outputs.append(model.vocab.decode(ids))
    return outputs


def train_toy(cfg: TrainConfig, tok_cfg: TokenizerConfig = TOY_TOKENIZER) -> TrainResult:
    """Overfit on ``sample_count`` records; loss must fall by >= 90%."""
    torch.manual_seed(cfg.seed)
    samples = load_dataset(cfg.dataset_dir, limit=cfg.sample_count)
    if len(samples) < cfg.sample_count:
        raise ValueError(
            f"dataset holds only {len(samples)} records, need {cfg.sample_count}"
        )
    texts = [s.program_text for s in samples]
    longest = max(len(t) for t in texts)
    dec_cfg = DecoderConfig(embed_dim=tok_cfg.output_dim, max_text_len=longest + 8)
    model = build_toy_model(texts, tok_cfg, dec_cfg)
    clouds = _prep_points(samples, cfg.point_count, cfg.seed)
    char_ids = _encode_batch(model.vocab, texts, "cpu")

    params = list(model.tokenizer.parameters()) + list(model.decoder.parameters())
    opt = torch.optim.AdamW(params, lr=cfg.learning_rate)

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    losses: list[tuple[int, float]] = []
    rng = np.random.default_rng(cfg.seed)
    n = len(samples)

    def batch_loss(indices) -> torch.Tensor:
        prefixes = model.tokenizer.forward_batch([clouds[i] for i in indices])
        return model.decoder.loss(prefixes, char_ids[list(indices)])

    with torch.no_grad():
        model.tokenizer.eval()
        model.decoder.eval()
        initial = float(batch_loss(range(n)))
    losses.append((0, initial))

    model.tokenizer.train()
    model.decoder.train()
    step = 0
    final = initial
    t0 = time.perf_counter()
    while step < cfg.max_steps:
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            opt.zero_grad()
            loss = batch_loss(idx)
            if not torch.isfinite(loss):
                raise RuntimeError(f"training diverged at step {step} (loss {loss})")
            loss.backward()
            opt.step()
            step += 1
            if step % cfg.log_every == 0 or step >= cfg.max_steps:
                with torch.no_grad():
                    model.tokenizer.eval()
                    model.decoder.eval()
                    final = float(batch_loss(range(n)))
                    model.tokenizer.train()
                    model.decoder.train()
                losses.append((step, final))
                if final <= cfg.target_loss:
                    break
        if final <= cfg.target_loss or step >= cfg.max_steps:
            break

    decoded = greedy_texts(model, clouds, max_len=longest + 8)
    memorized = sum(1 for d, t in zip(decoded, texts) if d == t)

    checkpoint = out_dir / "checkpoint.pt"
    torch.save(
        {
            "tokenizer": model.tokenizer.state_dict(),
            "decoder": model.decoder.state_dict(),
            "vocab_corpus": texts,
            "tokenizer_config": tok_cfg.__dict__,
            "decoder_config": dec_cfg.__dict__,
        },
        checkpoint,
    )
    (out_dir / "train_config.json").write_text(cfg.to_json(), encoding="utf-8")
    loss_csv = out_dir / "loss.csv"
    with open(loss_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "loss"])
        writer.writerows(losses)
    print(
        f"trained {step} steps in {time.perf_counter() - t0:.0f}s: "
        f"loss {initial:.4f} -> {final:.4f}, memorized {memorized}/{n}"
    )
    return TrainResult(initial, final, step, checkpoint, loss_csv, memorized, n)


def load_checkpoint(path) -> ToyModel:
    blob = torch.load(path, weights_only=False)
    tok_cfg = TokenizerConfig(**blob["tokenizer_config"])
    dec_cfg = DecoderConfig(**blob["decoder_config"])
    model = build_toy_model(blob["vocab_corpus"], tok_cfg, dec_cfg)
    model.tokenizer.load_state_dict(blob["tokenizer"])
    model.decoder.load_state_dict(blob["decoder"])
    model.tokenizer.eval()
    model.decoder.eval()
    return model
