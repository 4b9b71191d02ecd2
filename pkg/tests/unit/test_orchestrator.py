"""Unit tests for the orchestrator and its database persistence."""
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np
import pandas as pd
import pytest

from sphere_energy.core.errors import DomainError
from sphere_energy.core.kernels import LOG, RIESZ
from sphere_energy.db.models import DesignRun, SweepRecordRow, SweepRun
from sphere_energy.orchestrator import Orchestrator, options_hash


@pytest.fixture
def orchestrator(tmp_path):
    """Orchestrator without persistence, caching kernels under tmp_path."""
    return Orchestrator(persist=False, threads=1, cache_dir=str(tmp_path / "cache"))


@pytest.fixture
def persistent(memory_db, tmp_path):
    """Orchestrator bound to the in-memory database."""
    return Orchestrator(persist=True, threads=1, cache_dir=str(tmp_path / "cache"))


def test_options_hash_ignores_threads(fast_options):
    """Test that thread count does not change the design key."""
    assert options_hash(fast_options) == options_hash(fast_options.model_copy(update={"threads": 4}))
    assert options_hash(fast_options) != options_hash(fast_options.model_copy(update={"restarts": 3}))


def test_to_safe_json(orchestrator):
    """Test numpy values and non-finite floats are made JSON-safe."""
    data = orchestrator.to_safe_json({"a": np.float64(1.5), "b": np.arange(2), "c": math.inf, "d": (np.int64(2),)})
    assert data == {"a": 1.5, "b": [0, 1], "c": None, "d": [2]}


def test_run_energy_with_split(orchestrator, tetrahedron, tmp_path):
    """Test the energy report with split and quadrature exactness."""
    result = orchestrator.run_energy(tetrahedron, RIESZ, s=2.0, t=2, nmax=1000)
    assert result["value"] == pytest.approx(2.25)
    assert abs(result["split_discrepancy"]) < 1e-7
    assert result["quadrature"]["relative_gap"] < 1e-12
    assert result["split"]["lam"] == 4.0
    assert result["method"] == "kernel_split(4, 2)"
    assert (result["lam"], result["t"]) == (4.0, 2)
    assert orchestrator.run_energy(tetrahedron, RIESZ, s=2.0)["method"] == "direct"
    assert len(list((tmp_path / "cache").glob("*.json"))) == 1


def test_run_energy_validation(orchestrator, tetrahedron):
    """Test missing s and unknown kinds."""
    with pytest.raises(DomainError):
        orchestrator.run_energy(tetrahedron, RIESZ)
    with pytest.raises(DomainError):
        orchestrator.run_energy(tetrahedron, "coulomb")


def test_run_verify(orchestrator, icosahedron):
    """Test the verification payload."""
    result = orchestrator.run_verify(icosahedron, 5, tolerance=1e-12)
    assert result["verdict"] == "pass"
    assert len(result["per_degree_residuals"]) == 5


@pytest.mark.parametrize("kind,s", [(RIESZ, 2.0), (LOG, None)])
def test_run_kernel_table(orchestrator, kind, s):
    """Test head + tail reproduces the kernel on the interior grid."""
    frame = orchestrator.run_kernel(kind, 2, 4, s=s, nmax=2000, grid=11)
    assert list(frame.columns) == ["x", "head", "tail", "exact", "error"]
    assert len(frame) == 11
    assert frame["x"].between(-1, 1, inclusive="neither").all()
    assert frame["error"].abs().max() < 1e-6


def test_run_kernel_log_matches_distance_form(orchestrator):
    """Test the log table is log 1/|x - y| with |x - y|^2 = 2(1 - x)."""
    frame = orchestrator.run_kernel(LOG, 2, 3, nmax=2000, grid=3)
    x = frame["x"].to_numpy()
    np.testing.assert_allclose(frame["exact"], -0.5 * np.log(2 * (1 - x)), rtol=1e-13)


def test_run_predict(orchestrator):
    """Test the prediction payload."""
    result = orchestrator.run_predict(RIESZ, 2, 100, s=2.0, t=4)
    assert result["leading_term"] == pytest.approx(3750.0)
    assert orchestrator.run_predict(LOG, 2, 10)["kind"] == LOG
    with pytest.raises(DomainError):
        orchestrator.run_predict(RIESZ, 2, 100)


def test_construct_persists_and_reuses(persistent, memory_db, fast_options, tmp_path, mocker):
    """Test a constructed design is stored and served again without optimizing."""
    out = tmp_path / "design.txt"
    first = persistent.run_construct(2, 2, 4, seed=1, options=fast_options, output=str(out))
    assert not first["reused"]
    assert first["certificate"]["verdict"] == "pass"
    assert out.read_text().startswith("# d: 2")

    with memory_db.get_session() as session:
        row = session.query(DesignRun).one()
        assert row.n_points == 4
        assert row.options_hash == options_hash(fast_options)

    constructor = mocker.patch("sphere_energy.orchestrator.DesignConstructor")
    second = persistent.run_construct(2, 2, 4, seed=1, options=fast_options)
    assert second["reused"]
    assert second["certificate"]["total_residual"] == first["certificate"]["total_residual"]
    X, certificate = persistent.lookup_design(2, 2, 4, seed=1, options=fast_options)
    assert X.N == 4 and certificate.passed
    constructor.assert_not_called()


def test_construct_without_reuse(persistent, fast_options, mocker):
    """Test reuse=False always constructs."""
    persistent.run_construct(2, 2, 4, seed=1, options=fast_options)
    spy = mocker.spy(persistent, "_load_design")
    result = persistent.run_construct(2, 2, 4, seed=1, options=fast_options, reuse=False)
    assert not result["reused"]
    spy.assert_not_called()


def test_sweep_persisted_with_fits(persistent, memory_db):
    """Test sweep runs, records and fits are stored."""
    records, fits = persistent.run_sweep("fibonacci", 2, ["log"], N_values=[20, 40, 80, 160], fit=True)
    assert len(records) == 4
    assert "exponent" in fits["log"]

    with memory_db.get_session() as session:
        run = session.query(SweepRun).one()
        assert run.kinds == ["log"]
        assert session.query(SweepRecordRow).count() == 4
        assert run.fit["log"]["count"] == 4


def test_run_fit_from_csv(orchestrator, tmp_path):
    """Test fitting a sweep CSV for both models."""
    records, _ = orchestrator.run_sweep("fibonacci", 2, ["log", "riesz:3"], N_values=[50, 100, 200, 400])
    path = tmp_path / "sweep.csv"
    orchestrator.records_frame(records).to_csv(path, index=False)

    power = orchestrator.run_fit(str(path), "power", kind="log")
    assert power.count == 4
    trend = orchestrator.run_fit(str(path), "log_trend", kind="riesz:3", normalize_power=2.5)
    assert trend.model == "log_trend"
    with pytest.raises(DomainError):
        orchestrator.run_fit(str(path), "spline")


def test_run_fit_missing_columns(orchestrator, tmp_path):
    """Test a CSV without N and residual is rejected."""
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(DomainError):
        orchestrator.run_fit(str(path))


def test_design_sessions_are_serialized(persistent, fast_options, mocker):
    """Test concurrent design lookups never hold two database sessions at once."""
    state = {"open": 0, "peak": 0}
    guard = threading.Lock()

    @contextmanager
    def tracked_session():
        with guard:
            state["open"] += 1
            state["peak"] = max(state["peak"], state["open"])
        session = mocker.MagicMock()
        session.query.return_value.filter_by.return_value.order_by.return_value.first.return_value = None
        try:
            time.sleep(0.01)
            yield session
        finally:
            with guard:
                state["open"] -= 1

    mocker.patch("sphere_energy.orchestrator.get_session", tracked_session)
    with ThreadPoolExecutor(max_workers=8) as executor:
        results = list(executor.map(
            lambda seed: persistent._load_design(2, 2, 4, seed, fast_options), range(16)
        ))
    assert results == [None] * 16
    assert state["peak"] == 1


def test_run_fit_skips_error_rows(orchestrator, tmp_path):
    """Test rows carrying an error message are left out of the fit."""
    records, _ = orchestrator.run_sweep("fibonacci", 2, ["log"], N_values=[50, 100, 200, 400])
    frame = orchestrator.records_frame(records)
    assert list(frame.columns)[-1] == "error"
    failed = frame.iloc[[0]].assign(N=800, residual=1e9, error="construction failed")
    path = tmp_path / "sweep.csv"
    pd.concat([frame, failed]).to_csv(path, index=False)

    assert orchestrator.run_fit(str(path), "power", kind="log").count == 4
