"""Density matrices on labelled subsystems, entropies in bits, and test-state families."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .entropy_space import ALPHA_SLOTS, PartySet

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
EIG_CUTOFF = 1e-12


class StateError(ValueError):
    """A matrix violates a density-matrix invariant."""


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix over ordered labelled subsystems.

    The last label varies fastest in the matrix index.
    """

    dims: dict
    matrix: np.ndarray

    def __init__(self, dims: Mapping | Sequence, matrix, validate: bool = True):
        dims = dict(dims)
        matrix = np.asarray(matrix, dtype=complex)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", matrix)
        if any(int(d) < 1 for d in dims.values()):
            raise StateError("subsystem dimensions must be >= 1")
        if not dims:
            raise StateError("a state needs at least one subsystem")
        D = math.prod(dims.values())
        if matrix.shape != (D, D):
            raise StateError(f"matrix shape {matrix.shape} does not match dims {dims}")
        if validate:
            self.validate()

    def validate(self):
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if herm > HERM_TOL:
            raise StateError(f"matrix is not Hermitian (max deviation {herm:.3g})")
        tr = np.trace(m).real
        if abs(tr - 1) > TRACE_TOL:
            raise StateError(f"trace is {tr!r}, not 1")
        lam = np.linalg.eigvalsh(m).min()
        if lam < -PSD_TOL:
            raise StateError(f"matrix is not positive semidefinite (min eigenvalue {lam:.3g})")

    @property
    def labels(self) -> tuple:
        return tuple(self.dims)

    @property
    def shape(self) -> tuple:
        return tuple(self.dims.values())

    def ptrace(self, keep: Iterable) -> DensityMatrix:
        return partial_trace(self, keep)

    def entropy(self) -> float:
        return von_neumann_entropy(self)

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims})"


def partial_trace_array(matrix: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a (possibly batched) matrix, keeping axes ``keep`` in order.

    ``matrix`` has shape ``(..., D, D)`` with ``D = prod(dims)``.
    """
    n = len(dims)
    keep = sorted(keep)
    batch = matrix.shape[:-2]
    t = matrix.reshape(*batch, *dims, *dims)
    nb = len(batch)
    # einsum subscripts: batch axes, ket axes, bra axes (bra = ket for traced)
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    bsub = [next(letters) for _ in range(nb)]
    ket = [next(letters) for _ in range(n)]
    bra = [ket[k] if k not in keep else next(letters) for k in range(n)]
    out = bsub + [ket[k] for k in keep] + [bra[k] for k in keep]
    r = np.einsum("".join(bsub + ket + bra) + "->" + "".join(out), t)
    dk = math.prod(dims[k] for k in keep)
    return r.reshape(*batch, dk, dk)


def partial_trace(rho: DensityMatrix, keep: Iterable) -> DensityMatrix:
    """Reduced state on ``keep``; labels stay in their original order."""
    keep = set([keep] if isinstance(keep, str) else keep)
    if not keep:
        raise ValueError("keep set is empty")
    unknown = keep - set(rho.labels)
    if unknown:
        raise KeyError(f"unknown labels {sorted(unknown)}")
    idx = [k for k, lab in enumerate(rho.labels) if lab in keep]
    m = partial_trace_array(rho.matrix, rho.shape, idx)
    return DensityMatrix({rho.labels[k]: rho.shape[k] for k in idx}, m, validate=False)


def entropy_of_spectrum(lam: np.ndarray) -> np.ndarray:
    lam = np.where(lam < EIG_CUTOFF, 0.0, lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, -lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0)
    return np.maximum(terms.sum(axis=-1), 0.0)


def von_neumann_entropy(rho) -> float:
    """``-Tr rho log2 rho``; eigenvalues below 1e-12 count as zero."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(entropy_of_spectrum(np.linalg.eigvalsh(m)))


def entropy_vector(rho: DensityMatrix) -> np.ndarray:
    """Entropies of every nonempty subset of ``rho``'s subsystems, bitmask order."""
    n = len(rho.dims)
    out = np.empty((1 << n) - 1)
    for mask in range(1, 1 << n):
        idx = [k for k in range(n) if mask >> k & 1]
        out[mask - 1] = von_neumann_entropy(partial_trace_array(rho.matrix, rho.shape, idx))
    return out


def entropy_vectors(matrices: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Batched :func:`entropy_vector` for an array of shape ``(N, D, D)``."""
    n = len(dims)
    out = np.empty((matrices.shape[0], (1 << n) - 1))
    for mask in range(1, 1 << n):
        idx = [k for k in range(n) if mask >> k & 1]
        red = partial_trace_array(matrices, dims, idx)
        out[:, mask - 1] = entropy_of_spectrum(np.linalg.eigvalsh(red))
    return out


def _require_abv(rho: DensityMatrix):
    if set(rho.labels) != {"A", "B", "V"} or len(rho.labels) != 3:
        raise KeyError(f"expected subsystems A, B, V; got {rho.labels}")


def entropy_report(rho: DensityMatrix) -> dict:
    """The seven entropies S_A ... S_ABV of a tripartite state, in bits."""
    _require_abv(rho)
    ps = PartySet(rho.labels)
    h = entropy_vector(rho)
    return {slot: float(h[ps.index(tuple(slot)) - 1]) for slot in ALPHA_SLOTS}


def f_alpha(alpha, rho: DensityMatrix) -> float:
    """``sum_J alpha_J S_J`` on a state with subsystems A, B, V."""
    rep = entropy_report(rho)
    return float(sum(float(a) * rep[s] for a, s in zip(alpha, ALPHA_SLOTS)))


def mutual_information(rho: DensityMatrix, X="A", Y="B") -> float:
    X = [X] if isinstance(X, str) else list(X)
    Y = [Y] if isinstance(Y, str) else list(Y)
    return (partial_trace(rho, X).entropy() + partial_trace(rho, Y).entropy()
            - partial_trace(rho, X + Y).entropy())


# ---------------------------------------------------------------- construction

def pure(dims: Mapping | Sequence, psi: np.ndarray) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(dims, np.outer(psi, psi.conj()))


def tensor(*states: DensityMatrix) -> DensityMatrix:
    dims = {}
    m = np.ones((1, 1), dtype=complex)
    for s in states:
        clash = set(dims) & set(s.dims)
        if clash:
            raise ValueError(f"labels {sorted(clash)} appear twice")
        dims.update(s.dims)
        m = np.kron(m, s.matrix)
    return DensityMatrix(dims, m, validate=False)


def permute(rho: DensityMatrix, order: Sequence[str]) -> DensityMatrix:
    """Reorder subsystems to ``order`` (a permutation of the labels)."""
    if sorted(order) != sorted(rho.labels):
        raise KeyError(f"{order} is not a permutation of {rho.labels}")
    n = len(order)
    perm = [rho.labels.index(lab) for lab in order]
    t = rho.matrix.reshape(*rho.shape, *rho.shape)
    t = t.transpose(*perm, *[n + p for p in perm])
    D = rho.matrix.shape[0]
    return DensityMatrix({lab: rho.dims[lab] for lab in order}, t.reshape(D, D), validate=False)


def relabel(rho: DensityMatrix, mapping: Mapping) -> DensityMatrix:
    dims = {mapping.get(k, k): d for k, d in rho.dims.items()}
    return DensityMatrix(dims, rho.matrix, validate=False)


def merge(rho: DensityMatrix, labels: Sequence[str], new_label: str) -> DensityMatrix:
    """Fuse adjacent subsystems ``labels`` into one subsystem ``new_label``."""
    labs = list(rho.labels)
    start = labs.index(labels[0])
    if labs[start:start + len(labels)] != list(labels):
        raise ValueError(f"{labels} are not adjacent in {rho.labels}; permute first")
    dims = {}
    for lab in labs[:start]:
        dims[lab] = rho.dims[lab]
    dims[new_label] = math.prod(rho.dims[lab] for lab in labels)
    for lab in labs[start + len(labels):]:
        dims[lab] = rho.dims[lab]
    return DensityMatrix(dims, rho.matrix, validate=False)


def maximally_mixed(label: str, d: int) -> DensityMatrix:
    return DensityMatrix({label: d}, np.eye(d) / d)


def basis_state(label: str, d: int, i: int = 0) -> DensityMatrix:
    m = np.zeros((d, d), dtype=complex)
    m[i, i] = 1
    return DensityMatrix({label: d}, m)


def bell_state() -> DensityMatrix:
    """Phi+ on qubits A, B."""
    return pure({"A": 2, "B": 2}, np.array([1, 0, 0, 1]) / np.sqrt(2))


def _check_probs(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or len(p) == 0 or np.any(p < -TRACE_TOL) or abs(p.sum() - 1) > TRACE_TOL:
        raise StateError(f"{list(p)} is not a probability vector")
    return np.clip(p, 0, None)


def classical_state(p) -> DensityMatrix:
    """``sum_i p_i |ii><ii|`` on A, B."""
    p = _check_probs(p)
    d = len(p)
    m = np.zeros((d * d, d * d), dtype=complex)
    for i, pi in enumerate(p):
        m[i * d + i, i * d + i] = pi
    return DensityMatrix({"A": d, "B": d}, m)


def classical_copy_extension(p) -> DensityMatrix:
    """``sum_i p_i |iii><iii|`` on A, B, V."""
    p = _check_probs(p)
    d = len(p)
    m = np.zeros((d ** 3, d ** 3), dtype=complex)
    for i, pi in enumerate(p):
        k = (i * d + i) * d + i
        m[k, k] = pi
    return DensityMatrix({"A": d, "B": d, "V": d}, m)


def classical_extension(p, d_V: int, d_F: int | None = None, seed=None) -> DensityMatrix:
    """Random extension ``sum_ij sqrt(p_i p_j) |ii><jj| (x) Tr_F |v_i><v_j|`` of the classical state.

    The ``v_i`` are orthonormal (columns of a Haar isometry into ``V (x) F``),
    which is what makes the AB marginal diagonal.
    """
    p = _check_probs(p)
    d = len(p)
    d_F = d_F or d_V * d
    v = haar_isometry(d, d_V * d_F, seed).T
    psi = np.zeros((d, d, d_V * d_F), dtype=complex)
    for i in range(d):
        psi[i, i] = np.sqrt(p[i]) * v[i]
    psi = psi.reshape(d * d * d_V, d_F)
    return DensityMatrix({"A": d, "B": d, "V": d_V}, psi @ psi.conj().T)


def _swap_operator(d: int) -> np.ndarray:
    F = np.zeros((d * d, d * d))
    for i, j in itertools.product(range(d), repeat=2):
        F[i * d + j, j * d + i] = 1
    return F


def antisymmetric_projector(d: int) -> np.ndarray:
    return (np.eye(d * d) - _swap_operator(d)) / 2


def symmetric_projector(d: int) -> np.ndarray:
    return (np.eye(d * d) + _swap_operator(d)) / 2


def antisymmetric_state(d: int) -> DensityMatrix:
    """Normalized projector onto the antisymmetric subspace of ``d (x) d``."""
    if d < 2:
        raise StateError("the antisymmetric subspace is empty for d < 2")
    P = antisymmetric_projector(d)
    return DensityMatrix({"A": d, "B": d}, P / np.trace(P))


def symmetric_random_state(d: int, seed=None, rank: int | None = None) -> DensityMatrix:
    """Random mixed state supported on the symmetric subspace of ``d (x) d``."""
    rng = _rng(seed)
    P = symmetric_projector(d)
    k = rank or d * (d + 1) // 2
    G = rng.normal(size=(d * d, k)) + 1j * rng.normal(size=(d * d, k))
    G = P @ G
    m = G @ G.conj().T
    return DensityMatrix({"A": d, "B": d}, m / np.trace(m).real)


def random_pure_vector(D: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    v = rng.normal(size=D) + 1j * rng.normal(size=D)
    return v / np.linalg.norm(v)


def pure_random_state(d: int, seed=None, d_B: int | None = None) -> DensityMatrix:
    """Haar-random pure state on ``A (x) B``."""
    d_B = d_B or d
    return pure({"A": d, "B": d_B}, random_pure_vector(d * d_B, seed))


def random_density_matrix(dims: Mapping, seed=None, rank: int | None = None) -> DensityMatrix:
    """Induced-measure random state: trace out a Haar-random environment.

    With ``rank=None`` the environment has the same dimension as the system.
    """
    rng = _rng(seed)
    D = math.prod(dict(dims).values())
    k = rank or D
    G = rng.normal(size=(D, k)) + 1j * rng.normal(size=(D, k))
    m = G @ G.conj().T
    return DensityMatrix(dims, m / np.trace(m).real)


def random_density_matrices(n: int, D: int, seed=None, ranks: Sequence[int] | None = None) -> np.ndarray:
    """Array of ``n`` induced-measure states of size ``D``; ranks cycle through ``ranks``."""
    rng = _rng(seed)
    ranks = list(ranks or [D])
    out = np.empty((n, D, D), dtype=complex)
    for r in sorted(set(ranks)):
        sel = [i for i in range(n) if ranks[i % len(ranks)] == r]
        G = rng.normal(size=(len(sel), D, r)) + 1j * rng.normal(size=(len(sel), D, r))
        m = G @ G.conj().transpose(0, 2, 1)
        out[sel] = m / np.trace(m, axis1=1, axis2=2).real[:, None, None]
    return out


def product_state(rho_A: DensityMatrix, rho_B: DensityMatrix) -> DensityMatrix:
    return tensor(relabel(rho_A, {rho_A.labels[0]: "A"}), relabel(rho_B, {rho_B.labels[0]: "B"}))


def purification(rho: DensityMatrix, label: str = "E") -> DensityMatrix:
    """Pure state on ``rho``'s subsystems plus a purifying system of dimension rank(rho)."""
    lam, U = np.linalg.eigh(rho.matrix)
    keep = lam > 1e-10
    lam, U = lam[keep], U[:, keep]
    psi = (U * np.sqrt(lam)).reshape(-1)
    return pure({**rho.dims, label: len(lam)}, psi)


# ---------------------------------------------------------------- channels

def haar_isometry(d_in: int, d_out: int, seed=None) -> np.ndarray:
    """``d_out x d_in`` matrix with orthonormal columns, Haar distributed."""
    if d_out < d_in:
        raise ValueError(f"no isometry from dimension {d_in} into {d_out}")
    rng = _rng(seed)
    Z = rng.normal(size=(d_out, d_in)) + 1j * rng.normal(size=(d_out, d_in))
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


@dataclass(frozen=True, eq=False)
class LocalChannel:
    """CPTP map on one labelled subsystem, as Kraus operators ``(d_out, d_in)``."""

    label: str
    kraus: tuple

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        return self.apply(rho)

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.dims.get(self.label) != self.d_in:
            raise StateError(f"channel acts on {self.label} of dimension {self.d_in}")
        k = rho.labels.index(self.label)
        shape = rho.shape
        n = len(shape)
        t = rho.matrix.reshape(*shape, *shape)
        out = 0
        for K in self.kraus:
            s = np.moveaxis(np.tensordot(K, t, axes=([1], [k])), 0, k)
            s = np.moveaxis(np.tensordot(s, K.conj(), axes=([n + k], [1])), -1, n + k)
            out = out + s
        dims = dict(rho.dims)
        dims[self.label] = self.d_out
        D = math.prod(dims.values())
        return DensityMatrix(dims, out.reshape(D, D), validate=False)


def random_local_channel(label: str, d_in: int, d_out: int, kraus_rank: int = 1, seed=None) -> LocalChannel:
    """Haar-random Stinespring isometry ``d_in -> d_out * kraus_rank``, environment traced."""
    if min(d_in, d_out, kraus_rank) < 1:
        raise ValueError("channel dimensions must be >= 1")
    env = max(kraus_rank, -(-d_in // d_out))  # the dilation must fit an isometry
    W = haar_isometry(d_in, d_out * env, seed).reshape(d_out, env, d_in)
    return LocalChannel(label, tuple(W[:, j, :] for j in range(env)))


# ---------------------------------------------------------------- named specs

def _single_party(spec: str, seed_default=0) -> DensityMatrix:
    kind, _, args = spec.partition(":")
    if kind == "diag":
        p = _check_probs([float(x) for x in args.split(",")])
        return DensityMatrix({"X": len(p)}, np.diag(p).astype(complex))
    if kind == "random":
        d, _, seed = args.partition(",")
        return random_density_matrix({"X": int(d)}, int(seed or seed_default))
    if kind == "pure":
        d, _, seed = args.partition(",")
        return pure({"X": int(d)}, random_pure_vector(int(d), int(seed or seed_default)))
    raise ValueError(f"unknown single-party spec {spec!r}")


NAMED_STATE_HELP = """\
bell                      Phi+ on two qubits
classical:p1,p2,...       sum_i p_i |ii><ii|
antisym:d                 normalized antisymmetric projector on d x d
sym-random:d,seed         random state on the symmetric subspace of d x d
pure-random:d,seed        Haar-random pure state on d x d
product:X|Y               rho_A (x) rho_B with X, Y each one of
                            diag:p1,...  random:d,seed  pure:d,seed
"""


def named_state(spec: str) -> DensityMatrix:
    """Parse the named-state mini-grammar (see ``NAMED_STATE_HELP``)."""
    kind, _, args = spec.strip().partition(":")
    try:
        if kind == "bell":
            return bell_state()
        if kind == "classical":
            return classical_state([float(x) for x in args.split(",")])
        if kind in ("antisym", "antisymmetric"):
            return antisymmetric_state(int(args))
        if kind in ("sym-random", "symmetric_random"):
            d, _, seed = args.partition(",")
            return symmetric_random_state(int(d), int(seed or 0))
        if kind in ("pure-random", "pure_random"):
            d, _, seed = args.partition(",")
            return pure_random_state(int(d), int(seed or 0))
        if kind == "product":
            a, sep, b = args.partition("|")
            if not sep:
                raise ValueError("product needs two factors separated by '|'")
            return product_state(_single_party(a), _single_party(b))
    except (TypeError, IndexError) as exc:
        raise ValueError(f"malformed state spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown named state {spec!r}")


# ---------------------------------------------------------------- file format

def state_to_json(rho: DensityMatrix) -> dict:
    return {
        "dims": {k: int(v) for k, v in rho.dims.items()},
        # json writes floats via repr(), which round-trips exactly
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho.matrix],
    }


def state_from_json(data: Mapping) -> DensityMatrix:
    dims = data["dims"]
    if isinstance(dims, Mapping):
        dims = list(dims.items())
    dims = {str(k): int(v) for k, v in dims}
    try:
        m = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
    except (TypeError, ValueError) as exc:
        raise StateError(f"matrix entries must be [re, im] pairs: {exc}") from None
    return DensityMatrix(dims, m)


def save_state(rho: DensityMatrix, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_json(rho), fh)


def load_state(path) -> DensityMatrix:
    with open(path) as fh:
        return state_from_json(json.load(fh))
