"""
Unit tests for the perspective, Big-M, conic, mixture and robust builders.
"""

import numpy as np
import pytest

from logit_mp.backends import SolveStatus
from logit_mp.bruteforce import brute_force_optimum, robust_brute_force
from logit_mp.choice_model import enumerate_choice_set
from logit_mp.errors import (
    BadBounds,
    ConeUnsupported,
    EmptyUncertainty,
    InvalidInput,
    MissingRmc,
    NotBigM,
    WeightsNotSimplex,
)
from logit_mp.formulations import (
    ConstraintSet,
    UncertaintySet,
    add_conic,
    build_base_perspective,
    build_bigm,
    build_mixture,
    build_robust,
    lp_relax,
    set_assortment_objective,
)
from logit_mp.hypergraph import Bundle
from logit_mp.instances import GenSpec, generate_mixture, generate_single
from logit_mp.model import VariableNamer, assortment_from_values
from logit_mp.relaxation import default_oracle, standard_linear_relaxation


def _small_instances(count=6):
    for seed in range(count):
        spec = GenSpec(n=6, d=3, theta=0.3, pi=0.8, seed=seed, cardinality_ratio=0.5)
        yield generate_single(spec)


def _solve(backend, model, params):
    solution = backend.solve(model, params)
    assert solution.status == SolveStatus.OPTIMAL
    return solution


def test_constraint_set_rows():
    """Cardinality rows accept small assortments only"""
    X = ConstraintSet.cardinality(4, 2)
    assert X.is_satisfied([1, 3])
    assert not X.is_satisfied([1, 2, 3])
    assert ConstraintSet.unconstrained(4).is_satisfied([1, 2, 3, 4])
    assert ConstraintSet.from_dict(4, X.to_dict()) == X
    assert X.as_model_rows()[0].coeffs == {"x_1": 1.0, "x_2": 1.0, "x_3": 1.0, "x_4": 1.0}
    with pytest.raises(InvalidInput):
        ConstraintSet.cardinality(4, -1)


def test_perspective_model_shape(pair_instance):
    """One rho, a y per bundle, binary x and the RMC rows"""
    model = build_base_perspective(pair_instance)
    assert model.binaries() == ["x_1", "x_2"]
    assert {"rho", "y_1", "y_2", "y_1_2"} <= set(model.variable_names)
    names = {row.name for row in model.rows}
    assert {"norm", "oracle_0", "cap_1_2", "base1_1", "base4_2"} <= names
    assert model.meta["num_products"] == 2
    assert len(model.blocks) == 1


def test_perspective_needs_rmc_rows(triple_instance):
    """An oracle without the RMC rows is rejected"""
    with pytest.raises(MissingRmc):
        build_base_perspective(triple_instance, oracle_cuts=standard_linear_relaxation(triple_instance))
    _, rmc = default_oracle(triple_instance)
    model = build_base_perspective(triple_instance, oracle_cuts=rmc + standard_linear_relaxation(triple_instance))
    assert "y_1_2" in model.variable_names


def test_choice_points_are_feasible(triple_instance):
    """Every choice point with its x is feasible for the perspective model"""
    model = build_base_perspective(triple_instance)
    namer = VariableNamer()
    for x, point in enumerate_choice_set(triple_instance):
        values = {namer.rho(): point.rho}
        for e in model.blocks[0].bundles:
            values[namer.y(e)] = point.rho if all(x[i - 1] for i in e) else 0.0
        for i in triple_instance.products:
            values[namer.x(i)] = float(x[i - 1])
        assert model.max_violation(values) <= 1e-9


@pytest.mark.parametrize("builder", [build_base_perspective, build_bigm])
def test_mip_matches_brute_force(builder, backend, quick_params):
    """Perspective and Big-M optima equal enumeration"""
    for hypergraph, X in _small_instances():
        model = set_assortment_objective(builder(hypergraph, X=X), hypergraph)
        solution = _solve(backend, model, quick_params)
        expected = brute_force_optimum(hypergraph, X)
        assert solution.objective == pytest.approx(expected.value, abs=1e-5)
        assert X.is_satisfied(assortment_from_values(solution.values, hypergraph.num_products))


def test_perspective_lp_is_tighter_than_bigm(backend, quick_params):
    """With the same oracle and bounds (0, 1), the perspective LP bound is never weaker"""
    for hypergraph, X in _small_instances():
        pers = set_assortment_objective(build_base_perspective(hypergraph, X=X), hypergraph)
        bigm = set_assortment_objective(build_bigm(hypergraph, X=X, rho_L=0.0, rho_U=1.0), hypergraph)
        pers_lp = _solve(backend, lp_relax(pers), quick_params).objective
        bigm_lp = _solve(backend, lp_relax(bigm), quick_params).objective
        assert pers_lp <= bigm_lp + 1e-8


def test_perspective_lp_strictly_tighter_on_pair(pair_instance, backend, quick_params):
    """On the r = (2, 3, 5) pair instance the gap between the two LPs is strict"""
    pers = set_assortment_objective(build_base_perspective(pair_instance), pair_instance)
    bigm = set_assortment_objective(build_bigm(pair_instance, rho_L=0.0, rho_U=1.0), pair_instance)
    pers_lp = _solve(backend, lp_relax(pers), quick_params).objective
    bigm_lp = _solve(backend, lp_relax(bigm), quick_params).objective
    assert pers_lp == pytest.approx(2.5, abs=1e-6)
    assert bigm_lp > pers_lp + 1e-3


def test_bigm_bounds(pair_instance):
    """rho bounds must satisfy 0 <= rho_L <= rho_U <= 1"""
    with pytest.raises(BadBounds):
        build_bigm(pair_instance, rho_L=0.6, rho_U=0.5)
    with pytest.raises(BadBounds):
        build_bigm(pair_instance, rho_U=1.5)
    model = build_bigm(pair_instance)
    assert model.meta["rho_bounds"] == (pytest.approx(0.25), 1.0)
    assert "z_1_2" in model.variable_names


def test_conic_rows(pair_instance, backend):
    """Cone rows hold at choice points and need a cone-capable backend"""
    with pytest.raises(NotBigM):
        add_conic(build_base_perspective(pair_instance), pair_instance)
    bigm = set_assortment_objective(build_bigm(pair_instance), pair_instance)
    conic = add_conic(bigm, pair_instance)
    assert conic.kind == "conic"
    assert len(conic.cones) == len(pair_instance) + 1
    assert not bigm.cones

    for x, point in enumerate_choice_set(pair_instance):
        values = {"rho": point.rho, "x_1": float(x[0]), "x_2": float(x[1]), "z_1_2": float(x[0] and x[1])}
        values.update({f"y_{e.name}": point.y[e] for e in pair_instance.edges})
        assert max(cone.violation(values) for cone in conic.cones) <= 1e-12

    assert not backend.capabilities().cones
    with pytest.raises(ConeUnsupported):
        backend.solve(conic)


def test_lp_relax_keeps_original(pair_instance):
    """Relaxing copies the model and leaves the MIP intact"""
    model = build_base_perspective(pair_instance)
    relaxed = lp_relax(model)
    assert relaxed.binaries() == []
    assert model.binaries() == ["x_1", "x_2"]
    assert relaxed.variables["x_1"].upper == 1.0


def test_mixture_matches_weighted_enumeration(backend, quick_params):
    """The mixture optimum equals the lambda-weighted enumeration"""
    for seed in range(4):
        segments, uncertainty, _ = generate_mixture(GenSpec(n=6, d=2, theta=0.4, pi=0.5, k=2, seed=seed))
        weights = uncertainty.center.tolist()
        X = ConstraintSet.cardinality(6, 3)
        model = build_mixture(list(zip(segments, weights)), X)
        solution = _solve(backend, model, quick_params)
        expected = brute_force_optimum(segments[0], X, segments=segments, weights=weights)
        assert solution.objective == pytest.approx(expected.value, abs=1e-5)


def test_mixture_validates_weights(pair_instance):
    """Weights must lie in the simplex; one segment is a plain perspective model"""
    with pytest.raises(WeightsNotSimplex):
        build_mixture([(pair_instance, 0.7), (pair_instance, 0.7)])
    single = build_mixture([(pair_instance, 1.0)])
    assert single.kind == "perspective"
    assert single.variables.get("rho") is not None


def test_uncertainty_sets(backend):
    """Singleton and box-budget sets contain their center"""
    single = UncertaintySet.singleton([0.3, 0.7])
    value, lam = single.worst_case([1.0, 2.0], backend)
    assert value == pytest.approx(1.7)
    assert lam.tolist() == pytest.approx([0.3, 0.7])

    box = UncertaintySet.box_budget([0.5, 0.5], 0.9, 1.1, 0.1)
    assert not box.is_empty(backend)
    value, lam = box.worst_case([1.0, 2.0], backend)
    # Shift 0.05 of weight to the cheaper segment
    assert value == pytest.approx(0.55 * 1.0 + 0.45 * 2.0)
    assert UncertaintySet.from_dict(box.to_dict()).B.shape == box.B.shape

    empty = UncertaintySet(np.array([[1.0], [-1.0]]), np.array([1.0, 0.0]), 1)
    assert empty.is_empty(backend)
    with pytest.raises(EmptyUncertainty):
        empty.worst_case([1.0], backend)


def test_robust_matches_enumeration(backend, quick_params):
    """The dualized robust model equals worst-case enumeration"""
    for seed in range(3):
        segments, uncertainty, _ = generate_mixture(GenSpec(n=5, d=2, theta=0.5, pi=0.5, k=2, seed=seed))
        X = ConstraintSet.cardinality(5, 3)
        model = build_robust(segments, uncertainty, X, backend)
        solution = _solve(backend, model, quick_params)
        expected = robust_brute_force(segments, uncertainty, X, backend)
        assert solution.objective == pytest.approx(expected.value, abs=1e-5)


def test_robust_with_singleton_set_is_the_mixture(backend, quick_params):
    """A singleton weight set reduces the robust model to the mixture"""
    segments, uncertainty, _ = generate_mixture(GenSpec(n=5, d=2, theta=0.5, pi=0.5, k=2, seed=9))
    weights = uncertainty.center.tolist()
    X = ConstraintSet.cardinality(5, 2)
    robust = _solve(backend, build_robust(segments, UncertaintySet.singleton(weights), X, backend), quick_params)
    mixture = _solve(backend, build_mixture(list(zip(segments, weights)), X), quick_params)
    assert robust.objective == pytest.approx(mixture.objective, abs=1e-5)


def test_robust_rejects_mismatched_sets(pair_instance, backend):
    """The weight set must have one weight per segment and be non-empty"""
    with pytest.raises(InvalidInput):
        build_robust([pair_instance], UncertaintySet.singleton([0.5, 0.5]), backend=backend)
    empty = UncertaintySet(np.array([[1.0], [-1.0]]), np.array([1.0, 0.0]), 1)
    with pytest.raises(EmptyUncertainty):
        build_robust([pair_instance], empty, backend=backend)


def test_oracle_bundles_become_variables(triple_instance):
    """Auxiliary RMC bundles get y variables in the perspective block"""
    model = build_base_perspective(triple_instance)
    assert Bundle.of(1, 2) in model.blocks[0].bundles
    assert "y_1_2" in model.variable_names
