"""
SQLAlchemy database models for design construction and sweep runs.
"""

from sqlalchemy import Column, Integer, String, Float, DateTime, JSON, ForeignKey, Boolean, Text
from sqlalchemy.orm import declarative_base, relationship
from datetime import datetime
import uuid

Base = declarative_base()


def generate_uuid():
    """Generate UUID string."""
    return str(uuid.uuid4())


class DesignRun(Base):
    """Constructed point sets with their certificates, reused as a design cache."""
    __tablename__ = 'design_runs'

    id = Column(String, primary_key=True, default=generate_uuid)
    d = Column(Integer, nullable=False)
    t = Column(Integer, nullable=False)
    n_points = Column(Integer, nullable=False)
    seed = Column(Integer, nullable=False)
    options_hash = Column(String, nullable=False, index=True)

    options = Column(JSON, nullable=False)
    points = Column(JSON, nullable=False)  # N x (d+1) nested lists
    certificate = Column(JSON, nullable=False)

    verdict = Column(String, nullable=False)
    total_residual = Column(Float)
    success = Column(Boolean, default=False)
    elapsed_seconds = Column(Float)
    created_at = Column(DateTime, default=datetime.utcnow)


class SweepRun(Base):
    """Sweep runs."""
    __tablename__ = 'sweep_runs'

    id = Column(String, primary_key=True, default=generate_uuid)
    source = Column(String, nullable=False)
    d = Column(Integer, nullable=False)
    kinds = Column(JSON, nullable=False)
    config = Column(JSON)

    started_at = Column(DateTime, default=datetime.utcnow)
    finished_at = Column(DateTime)
    fit = Column(JSON)  # residual exponent fit, when requested
    notes = Column(Text)

    # Relationships
    records = relationship("SweepRecordRow", back_populates="sweep_run")


class SweepRecordRow(Base):
    """Individual records of a sweep."""
    __tablename__ = 'sweep_records'

    id = Column(String, primary_key=True, default=generate_uuid)
    sweep_id = Column(String, ForeignKey('sweep_runs.id'))

    t = Column(Integer)
    n_points = Column(Integer)
    d = Column(Integer, nullable=False)
    kind = Column(String, nullable=False)
    s = Column(Float)

    measured = Column(Float)
    leading = Column(Float)
    second = Column(Float)
    residual = Column(Float)
    min_separation = Column(Float)
    source = Column(String)
    error = Column(Text)

    # Relationships
    sweep_run = relationship("SweepRun", back_populates="records")
