import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optcorr.states import (
    DensityMatrix,
    StateError,
    antisymmetric_state,
    bell_state,
    classical_extension,
    classical_state,
    entropy_report,
    entropy_vector,
    entropy_vectors,
    f_alpha,
    haar_isometry,
    load_state,
    maximally_mixed,
    merge,
    mutual_information,
    named_state,
    partial_trace,
    permute,
    product_state,
    pure_random_state,
    purification,
    random_density_matrices,
    random_density_matrix,
    random_local_channel,
    save_state,
    state_from_json,
    state_to_json,
    symmetric_random_state,
    tensor,
    von_neumann_entropy,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_bell_marginals():
    rho = bell_state()
    assert von_neumann_entropy(rho) == pytest.approx(0, abs=1e-12)
    assert partial_trace(rho, "A").entropy() == pytest.approx(1)
    assert mutual_information(rho) == pytest.approx(2)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_maximally_mixed_entropy(d):
    assert von_neumann_entropy(maximally_mixed("X", d)) == pytest.approx(math.log2(d))


def test_validation_messages():
    with pytest.raises(StateError, match="Hermitian"):
        DensityMatrix({"A": 2}, [[0.5, 0.3], [0.1, 0.5]])
    with pytest.raises(StateError, match="trace"):
        DensityMatrix({"A": 2}, np.eye(2))
    with pytest.raises(StateError, match="positive"):
        DensityMatrix({"A": 2}, [[1.5, 0], [0, -0.5]])
    with pytest.raises(StateError, match="shape"):
        DensityMatrix({"A": 3}, np.eye(2) / 2)


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_partial_trace_composes(seed):
    rho = random_density_matrix({"A": 2, "B": 3, "C": 2}, seed)
    step = partial_trace(partial_trace(rho, ["A", "B"]), ["A"])
    assert np.allclose(step.matrix, partial_trace(rho, ["A"]).matrix, atol=1e-12)


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_pure_bipartition_entropies_match(seed):
    rho = pure_random_state(3, seed, d_B=2)
    assert partial_trace(rho, "A").entropy() == pytest.approx(
        partial_trace(rho, "B").entropy(), abs=1e-9)


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_ssa_on_random_tripartite(seed):
    rep = entropy_report(random_density_matrix({"A": 2, "B": 2, "V": 2}, seed))
    # I(A:B|V) and weak monotonicity S(V|A) + S(V|B) >= 0
    assert rep["AV"] + rep["BV"] - rep["ABV"] - rep["V"] >= -1e-9
    assert rep["AV"] - rep["A"] + rep["BV"] - rep["B"] >= -1e-9


def test_batched_entropies_agree():
    mats = random_density_matrices(4, 8, seed=2)
    batch = entropy_vectors(mats, (2, 2, 2))
    for m, row in zip(mats, batch):
        single = entropy_vector(DensityMatrix({"A": 2, "B": 2, "V": 2}, m))
        assert np.allclose(row, single, atol=1e-10)


def test_tensor_permute_merge():
    a = random_density_matrix({"A": 2}, 1)
    b = random_density_matrix({"B": 3}, 2)
    ab = tensor(a, b)
    ba = permute(ab, ["B", "A"])
    assert np.allclose(partial_trace(ba, "A").matrix, a.matrix)
    m = merge(ab, ["A", "B"], "X")
    assert m.dims == {"X": 6}
    with pytest.raises(ValueError):
        tensor(a, a)


def test_purification_is_pure_and_reduces():
    rho = random_density_matrix({"A": 2, "B": 2}, 4, rank=3)
    psi = purification(rho)
    assert psi.dims["E"] == 3
    assert von_neumann_entropy(psi) == pytest.approx(0, abs=1e-9)
    assert np.allclose(partial_trace(psi, ["A", "B"]).matrix, rho.matrix, atol=1e-10)


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_haar_isometry(seed):
    W = haar_isometry(3, 7, seed)
    assert np.allclose(W.conj().T @ W, np.eye(3), atol=1e-12)


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_local_channel_is_trace_preserving(seed):
    rho = random_density_matrix({"A": 2, "B": 3}, seed)
    ch = random_local_channel("B", 3, 2, kraus_rank=2, seed=seed)
    out = ch(rho)
    out.validate()
    assert out.dims == {"A": 2, "B": 2}
    # a channel on B leaves A untouched
    assert np.allclose(partial_trace(out, "A").matrix, partial_trace(rho, "A").matrix)


def test_local_channels_do_not_increase_mutual_information():
    for seed in range(10):
        rho = random_density_matrix({"A": 2, "B": 2}, seed)
        ch = random_local_channel("A", 2, 3, kraus_rank=2, seed=100 + seed)
        assert mutual_information(ch(rho)) <= mutual_information(rho) + 1e-9


def test_classical_extension_reduces():
    p = [0.2, 0.3, 0.5]
    ext = classical_extension(p, d_V=2, seed=0)
    ext.validate()
    assert np.allclose(partial_trace(ext, ["A", "B"]).matrix, classical_state(p).matrix, atol=1e-12)


def test_symmetric_and_antisymmetric_supports():
    anti = antisymmetric_state(3)
    assert anti.entropy() == pytest.approx(math.log2(3))
    sym = symmetric_random_state(2, seed=1)
    sym.validate()
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    assert np.allclose(swap @ sym.matrix, sym.matrix)


def test_f_alpha_picks_slots():
    rho = tensor(bell_state(), maximally_mixed("V", 2))
    assert f_alpha([0, 0, 1, 0, 0, 0, 0], rho) == pytest.approx(1)
    assert f_alpha([0, 0, 0, 1, 0, 0, 0], rho) == pytest.approx(0, abs=1e-9)


@pytest.mark.parametrize("spec,dims", [
    ("bell", (2, 2)),
    ("classical:0.5,0.25,0.25", (3, 3)),
    ("antisym:3", (3, 3)),
    ("sym-random:2,7", (2, 2)),
    ("pure-random:2,3", (2, 2)),
    ("product:diag:0.4,0.6|random:3,5", (2, 3)),
])
def test_named_states(spec, dims):
    rho = named_state(spec)
    assert rho.labels == ("A", "B") and rho.shape == dims
    rho.validate()


def test_named_state_errors():
    with pytest.raises(ValueError):
        named_state("nonsense")
    with pytest.raises(ValueError):
        named_state("product:diag:1")


def test_product_state_has_no_correlation():
    rho = product_state(random_density_matrix({"X": 2}, 0), random_density_matrix({"X": 3}, 1))
    assert mutual_information(rho) == pytest.approx(0, abs=1e-9)


def test_json_round_trip(tmp_path):
    rho = random_density_matrix({"A": 2, "B": 2}, 9)
    path = tmp_path / "s.json"
    save_state(rho, path)
    back = load_state(path)
    assert back.dims == rho.dims
    assert np.array_equal(back.matrix, rho.matrix)
    data = json.loads(path.read_text())
    data["dims"] = [["A", 2], ["B", 2]]
    assert np.array_equal(state_from_json(data).matrix, rho.matrix)


def test_json_rejects_bad_matrix():
    data = state_to_json(bell_state())
    data["matrix"][0][1] = [0.3, 0.0]
    with pytest.raises(StateError, match="Hermitian"):
        state_from_json(data)
