"""
Unit tests for the backend registry and the HiGHS backend.
"""

import pytest

from logit_mp.backends import HighsBackend, SolveParams, SolveStatus, get_backend
from logit_mp.errors import InvalidInput
from logit_mp.model import ModelIR


def _lp():
    model = ModelIR("lp")
    model.add_variable("a")
    model.add_variable("b")
    model.add_row({"a": 1.0, "b": 2.0}, "<=", 4.0)
    model.add_row({"a": 1.0}, "<=", 3.0)
    model.set_objective({"a": 1.0, "b": 1.0}, "max")
    return model


def test_get_backend_by_name_and_env(monkeypatch):
    """Names are case-insensitive and the environment picks the default"""
    assert isinstance(get_backend("HiGHS"), HighsBackend)
    monkeypatch.setenv("LOGIT_MP_BACKEND", "highs")
    assert get_backend().name == "highs"
    with pytest.raises(InvalidInput):
        get_backend("cplex-by-mail")


def test_capabilities():
    """HiGHS solves MIPs but not cones"""
    caps = get_backend().capabilities()
    assert caps.mip and not caps.cones


def test_solve_params_validation():
    """Limits, gaps and thread counts are checked"""
    with pytest.raises(InvalidInput):
        SolveParams(time_limit_s=0)
    with pytest.raises(InvalidInput):
        SolveParams(rel_gap=1.0)
    with pytest.raises(InvalidInput):
        SolveParams(threads=0)


def test_linear_program(backend):
    """max a + b with a + 2b <= 4 and a <= 3"""
    solution = backend.solve(_lp())
    assert solution.status == SolveStatus.OPTIMAL
    assert solution.objective == pytest.approx(3.5)
    assert solution.best_bound == pytest.approx(3.5)
    assert solution.value("a") == pytest.approx(3.0)
    assert solution.value("b") == pytest.approx(0.5)
    assert solution.has_values


def test_mixed_integer_program(backend, quick_params):
    """Two binaries that cannot both be chosen"""
    model = ModelIR("mip")
    model.add_variable("p", 0.0, 1.0, binary=True)
    model.add_variable("q", 0.0, 1.0, binary=True)
    model.add_row({"p": 1.0, "q": 1.0}, "<=", 1.5)
    model.set_objective({"p": 3.0, "q": 2.0}, "max")
    solution = backend.solve(model, quick_params)
    assert solution.status == SolveStatus.OPTIMAL
    assert solution.objective == pytest.approx(3.0)
    assert solution.value("p") == pytest.approx(1.0)


def test_minimize_with_constant(backend):
    """The objective constant is added back to the reported value"""
    model = ModelIR()
    model.add_variable("a", 1.0, 10.0)
    model.set_objective({"a": 1.0}, "min", constant=5.0)
    assert backend.solve(model).objective == pytest.approx(6.0)


def test_infeasible_model_is_dumped(backend, monkeypatch, tmp_path):
    """An infeasible solve is reported and written as an LP file"""
    monkeypatch.setenv("LOGIT_MP_DUMP_LP", str(tmp_path / "dumps"))
    model = ModelIR("broken")
    model.add_variable("a", 0.0, 1.0)
    model.add_row({"a": 1.0}, ">=", 2.0, "too_big")
    model.set_objective({"a": 1.0}, "max")
    solution = backend.solve(model)
    assert solution.status == SolveStatus.INFEASIBLE
    assert not solution.has_values
    dumps = list((tmp_path / "dumps").glob("broken-*.lp"))
    assert len(dumps) == 1
    assert "too_big" in dumps[0].read_text()
