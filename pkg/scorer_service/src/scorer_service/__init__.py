"""Batch cross-encoder scoring service."""

from .app import create_app
from .config import ServiceConfig
from .models import CrossEncoderBackend, ModelRegistry, normalize_scores

__version__ = "0.1.0"
