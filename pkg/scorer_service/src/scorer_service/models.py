"""Model backends and the loading registry.

A backend is anything with ``predict(pairs) -> list[float]`` (raw scores,
logits allowed) and a ``checkpoint_id``. The registry loads backends in a
background thread so the HTTP layer can answer 503 while checkpoints are
still coming up, then normalizes raw outputs into [0, 1]: if a batch
contains any value outside the unit interval the whole batch is passed
through a sigmoid (the checkpoint emits logits), and everything is clipped.
"""

from __future__ import annotations

import math
import threading
from typing import Protocol, Sequence

from .config import ServiceConfig


class ModelBackend(Protocol):
    checkpoint_id: str

    def predict(self, pairs: Sequence[tuple[str, str]]) -> list[float]: ...


class CrossEncoderBackend:
    """sentence-transformers cross-encoder wrapper (inference mode only)."""

    def __init__(self, checkpoint_id: str, device: str = "cpu"):
        from sentence_transformers import CrossEncoder
        self.checkpoint_id = checkpoint_id
        self._model = CrossEncoder(checkpoint_id, device=device)

    def predict(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        scores = self._model.predict([list(p) for p in pairs],
                                     convert_to_numpy=True,
                                     show_progress_bar=False)
        return [float(s) for s in scores]


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def normalize_scores(raw: Sequence[float]) -> list[float]:
    """Map raw head outputs into [0, 1]; sigmoid the batch when it looks
    like logits, clip regardless."""
    if any(s < 0.0 or s > 1.0 for s in raw):
        raw = [_sigmoid(s) for s in raw]
    return [min(1.0, max(0.0, float(s))) for s in raw]


class ModelRegistry:
    """Holds per-model backends plus their loading state."""

    def __init__(self, config: ServiceConfig,
                 backends: dict[str, ModelBackend] | None = None,
                 loader=None):
        self.config = config
        self._backends: dict[str, ModelBackend] = dict(backends or {})
        self._lock = threading.Lock()
        self._error: str | None = None
        self._loader = loader or self._default_loader
        self._thread: threading.Thread | None = None

    def _default_loader(self, model: str) -> ModelBackend:
        return CrossEncoderBackend(self.config.checkpoints[model],
                                   device=self.config.device)

    def start_loading(self) -> None:
        """Load any missing backends off-thread; idempotent."""
        missing = [m for m in self.config.checkpoints if m not in self._backends]
        if not missing or self._thread is not None:
            return

        def load():
            for model in missing:
                try:
                    backend = self._loader(model)
                except Exception as exc:  # surfaced via /health and 503s
                    with self._lock:
                        self._error = f"{model}: {exc}"
                    return
                with self._lock:
                    self._backends[model] = backend

        self._thread = threading.Thread(target=load, daemon=True)
        self._thread.start()

    def get(self, model: str) -> ModelBackend | None:
        with self._lock:
            return self._backends.get(model)

    @property
    def ready(self) -> bool:
        with self._lock:
            return all(m in self._backends for m in self.config.checkpoints)

    @property
    def error(self) -> str | None:
        with self._lock:
            return self._error

    def checkpoint_ids(self) -> list[str]:
        with self._lock:
            return [self._backends[m].checkpoint_id
                    for m in sorted(self._backends)]

    def score(self, model: str, pairs: Sequence[tuple[str, str]]) -> list[float]:
        """Chunked, order-preserving scoring with unit-interval outputs."""
        backend = self.get(model)
        if backend is None:
            raise KeyError(model)
        cap = max(1, self.config.batch_cap)
        out: list[float] = []
        for start in range(0, len(pairs), cap):
            chunk = pairs[start:start + cap]
            raw = backend.predict(chunk)
            if len(raw) != len(chunk):
                raise RuntimeError(
                    f"backend returned {len(raw)} scores for {len(chunk)} pairs")
            out.extend(normalize_scores(raw))
        return out
