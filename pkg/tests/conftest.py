import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def small_corpus():
    """A handful of sampled programs per family, shared across tests."""
    from shapeforge.sampler import FAMILIES, sample_part

    corpus = {}
    for family in FAMILIES:
        corpus[family] = [sample_part(family, 31000 + i) for i in range(8)]
    return corpus


@pytest.fixture(scope="session")
def cube_mesh():
    from shapeforge.dsl.types import PrimitiveKind
    from shapeforge.geometry import make_primitive

    return make_primitive(PrimitiveKind("cube"))
