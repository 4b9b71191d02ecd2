"""
Database session management and initialization.
"""

from contextlib import contextmanager
from typing import Iterator, Optional

import structlog
from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import sessionmaker, Session
from sqlalchemy.pool import StaticPool

from ..config import settings
from .models import Base

log = structlog.get_logger(__name__)

_engine: Optional[Engine] = None
_session_factory: Optional[sessionmaker] = None


def configure(database_url: Optional[str] = None) -> Engine:
    """(Re)bind the engine and session factory, e.g. to an in-memory database in tests."""
    global _engine, _session_factory
    url = database_url or settings.database_url
    if url.startswith("sqlite"):
        kwargs = {"connect_args": {"check_same_thread": False}}
        if url in ("sqlite://", "sqlite:///:memory:"):
            kwargs["poolclass"] = StaticPool
    else:
        kwargs = {"pool_pre_ping": True}
    _engine = create_engine(url, echo=False, **kwargs)
    _session_factory = sessionmaker(autocommit=False, autoflush=False, bind=_engine)
    return _engine


def get_engine() -> Engine:
    if _engine is None:
        configure()
    return _engine


def init_db():
    """Initialize database schema."""
    engine = get_engine()
    Base.metadata.create_all(bind=engine)
    log.info("database_initialized", url=str(engine.url))


@contextmanager
def get_session() -> Iterator[Session]:
    """
    Get database session context manager.

    Usage:
        with get_session() as session:
            session.query(...)
    """
    if _session_factory is None:
        configure()
    session = _session_factory()
    try:
        yield session
        session.commit()
    except Exception as e:
        session.rollback()
        log.error("database_error", error=str(e))
        raise
    finally:
        session.close()
