"""HTTP service layer: FastAPI app plus request/response schemas."""

from .app import app

__all__ = ["app"]
