"""Service configuration: checkpoint identifiers and batching limits.

Checkpoint ids are configuration, never hard-coded by clients; the server
echoes them in responses so every run records exactly which models scored
it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

DEFAULT_CHECKPOINTS = {
    "sts": "cross-encoder/ms-marco-MiniLM-L-6-v2",
    "is": "cross-encoder/qnli-electra-base",
}

CHECKPOINT_ENV = {
    "sts": "SCORER_STS_CHECKPOINT",
    "is": "SCORER_IS_CHECKPOINT",
}


@dataclass(frozen=True)
class ServiceConfig:
    checkpoints: dict = field(default_factory=lambda: dict(DEFAULT_CHECKPOINTS))
    batch_cap: int = 64
    device: str = "cpu"

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        checkpoints = {
            model: os.environ.get(env_var, DEFAULT_CHECKPOINTS[model])
            for model, env_var in CHECKPOINT_ENV.items()
        }
        return cls(
            checkpoints=checkpoints,
            batch_cap=int(os.environ.get("SCORER_BATCH_CAP", "64")),
            device=os.environ.get("SCORER_DEVICE", "cpu"),
        )
