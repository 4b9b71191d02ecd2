"""Database models and session management."""

from .db import configure, get_session, init_db
from .models import DesignRun, SweepRun, SweepRecordRow

__all__ = [
    "configure",
    "get_session",
    "init_db",
    "DesignRun",
    "SweepRun",
    "SweepRecordRow"
]
