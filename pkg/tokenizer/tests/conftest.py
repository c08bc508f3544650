import json
import subprocess
import sys

import pytest
import torch


@pytest.fixture(scope="session", autouse=True)
def _determinism():
    torch.manual_seed(1234)
    torch.use_deterministic_algorithms(True)


@pytest.fixture(scope="session")
def default_model():
    from shapetok import ShapeTokenizer, TokenizerConfig

    torch.manual_seed(7)
    model = ShapeTokenizer(TokenizerConfig())
    model.eval()
    return model


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    """Primitive-only dataset with materialized clouds, via the shapeforge CLI."""
    out = tmp_path_factory.mktemp("dataset") / "parts"
    cfg = tmp_path_factory.mktemp("cfg") / "gen.json"
    cfg.write_text(
        json.dumps({"family_weights": {"primitive": 1.0}, "count": 40, "seed": 60})
    )
    result = subprocess.run(
        [
            sys.executable,
            "-m",
            "shapeforge.cli",
            "generate",
            "--config",
            str(cfg),
            "--out",
            str(out),
            "--materialize",
            "clouds",
        ],
        capture_output=True,
        text=True,
    )
    if result.returncode != 0:
        pytest.skip(f"shapeforge CLI unavailable: {result.stderr.strip()[:200]}")
    return out
