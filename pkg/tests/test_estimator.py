import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optcorr.discovery import dual_alpha, named_alpha
from optcorr.estimator import (
    ExtensionAnsatz,
    InfiniteMeasureError,
    Objective,
    ansatz_from_extension,
    estimate_measure,
    extension_from_ansatz,
    lower_bound,
    purification_ansatz,
    purify,
    random_ansatz,
    trivial_ansatz,
    witness_value,
)
from optcorr.states import (
    bell_state,
    classical_copy_extension,
    classical_state,
    entropy_report,
    f_alpha,
    mutual_information,
    partial_trace,
    random_density_matrix,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_canonical_purification_is_deterministic():
    rho = random_density_matrix({"A": 2, "B": 2}, 0, rank=3)
    p1, p2 = purify(rho), purify(rho)
    assert np.array_equal(p1.psi, p2.psi)
    assert list(p1.eigenvalues) == sorted(p1.eigenvalues, reverse=True)
    assert np.allclose(p1.psi @ p1.psi.conj().T, rho.matrix, atol=1e-12)


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_random_ansatz_gives_an_extension(seed):
    rho = random_density_matrix({"A": 2, "B": 2}, seed)
    pur = purify(rho)
    an = random_ansatz(pur.d_E, 3, seed=seed)
    assert an.isometry_error() < 1e-12
    ext = extension_from_ansatz(rho, an, pur)
    ext.validate()
    assert np.allclose(partial_trace(ext, ["A", "B"]).matrix, rho.matrix, atol=1e-10)


def test_trivial_and_purification_ansatze():
    rho = random_density_matrix({"A": 2, "B": 2}, 1)
    pur = purify(rho)
    triv = extension_from_ansatz(rho, trivial_ansatz(pur.d_E, 4), pur)
    assert entropy_report(triv)["V"] == pytest.approx(0, abs=1e-9)
    full = extension_from_ansatz(rho, purification_ansatz(pur.d_E, 4), pur)
    assert entropy_report(full)["ABV"] == pytest.approx(0, abs=1e-9)


def test_ansatz_from_extension_replays():
    p = [0.6, 0.4]
    rho = classical_state(p)
    ext = classical_copy_extension(p)
    an = ansatz_from_extension(rho, ext, d_V=2)
    back = extension_from_ansatz(rho, an)
    assert np.allclose(back.matrix, ext.matrix, atol=1e-10)


def test_objective_matches_state_entropies():
    rho = random_density_matrix({"A": 2, "B": 2}, 2)
    pur = purify(rho)
    an = random_ansatz(pur.d_E, 2, seed=5)
    a = np.random.default_rng(0).normal(size=7)
    obj = Objective(a, pur, an.d_V, an.d_F)
    assert obj.value(an.W) == pytest.approx(f_alpha(a, extension_from_ansatz(rho, an, pur)), abs=1e-10)


def test_gradient_matches_finite_differences():
    rho = random_density_matrix({"A": 2, "B": 2}, 3)
    pur = purify(rho)
    an = random_ansatz(pur.d_E, 2, seed=4)
    obj = Objective(named_alpha("R"), pur, an.d_V, an.d_F)
    _, G = obj.value_and_grad(an.W)
    rng = np.random.default_rng(1)
    D = rng.normal(size=an.W.shape) + 1j * rng.normal(size=an.W.shape)
    h = 1e-5
    fd = (obj.value_and_grad(an.W + h * D)[0] - obj.value_and_grad(an.W - h * D)[0]) / (2 * h)
    assert float(np.vdot(G, D).real) == pytest.approx(fd, rel=1e-4)


def test_ansatz_json_round_trip():
    an = random_ansatz(3, 2, seed=0)
    back = ExtensionAnsatz.from_json(an.to_json())
    assert np.array_equal(back.W, an.W)


def test_bell_estimates():
    for m in "PQR":
        est = estimate_measure(named_alpha(m), bell_state(), restarts=2)
        assert 1.0 - 1e-9 <= est.value <= 1.001
        assert est.lower_bound == pytest.approx(1.0)
        assert witness_value(est, bell_state()) == pytest.approx(est.value, abs=1e-9)


def test_classical_e_r():
    est = estimate_measure(named_alpha("R"), classical_state([0.5, 0.5]), restarts=2)
    assert est.value == pytest.approx(0.5, abs=5e-3)


def test_estimate_is_deterministic():
    rho = random_density_matrix({"A": 2, "B": 2}, 8)
    a = estimate_measure(named_alpha("Q"), rho, restarts=2, max_iters=200, seed=3)
    b = estimate_measure(named_alpha("Q"), rho, restarts=2, max_iters=200, seed=3)
    assert a.value == b.value
    assert a.restart_values == b.restart_values


def test_dual_alpha_gives_same_estimate():
    rho = random_density_matrix({"A": 2, "B": 2}, 6)
    e = estimate_measure(named_alpha("P"), rho, restarts=3)
    d = estimate_measure(dual_alpha(named_alpha("P")), rho, restarts=3)
    assert e.value == pytest.approx(d.value, abs=2e-3)


def test_infinite_measure_rejected():
    with pytest.raises(InfiniteMeasureError):
        estimate_measure([0, 0, -1, 0, 0, 0, 0], bell_state())


def test_lower_bounds():
    rho = random_density_matrix({"A": 2, "B": 2}, 7)
    half_i = 0.5 * mutual_information(rho)
    assert lower_bound(named_alpha("Q"), rho) == pytest.approx(half_i)
    assert lower_bound(named_alpha("R") * 2, rho) == pytest.approx(2 * half_i)
    assert lower_bound(dual_alpha(named_alpha("P")), rho) == pytest.approx(half_i)
    assert lower_bound(named_alpha("sq"), rho) == 0.0
    assert lower_bound([1, 0, 0, 0, 0, 0, 0], rho) is None


def test_sandwich_on_random_state():
    rho = random_density_matrix({"A": 2, "B": 2}, 11)
    s_min = min(partial_trace(rho, "A").entropy(), partial_trace(rho, "B").entropy())
    est = estimate_measure(named_alpha("P"), rho, restarts=2)
    assert est.lower_bound - 1e-9 <= est.value <= s_min + 1e-9
    assert est.gap >= -1e-9
    assert math.isfinite(est.value)
