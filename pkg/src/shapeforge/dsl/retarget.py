"""Retargeting: re-expressing statements under a similarity transform.

The transform is folded into the statement's own transform field, so the
retargeted statement executes to exactly the transformed mesh (no curve
parameters are rewritten).
"""

from __future__ import annotations

import dataclasses

from ..transforms import compose
from .types import Op, PartStatement, SimilarityTransform


def retarget_op(op: Op, t: SimilarityTransform) -> Op:
    return dataclasses.replace(op, transform=compose(t, op.transform))


def retarget_statement(s: PartStatement, t: SimilarityTransform) -> PartStatement:
    """Statement whose execution equals executing ``s`` then transforming by ``t``."""
    return PartStatement(s.part_name, s.part_index, retarget_op(s.op, t))
