"""Variational upper bounds on ``E_alpha(rho_AB) = inf_{rho_ABV} f^alpha(rho_ABV)``.

Every extension with a ``d_V``-dimensional V arises from a fixed purification
``|psi>_ABE`` of ``rho_AB`` by a channel ``E -> V``; its Stinespring isometry
``W : E -> V (x) F`` is the optimization variable.  The objective is minimized
by gradient descent on the complex Stiefel manifold with a QR retraction,
Barzilai-Borwein trial steps and Armijo backtracking.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .discovery import NAMED_ALPHAS, dual_alpha, finiteness_check
from .entropy_space import ALPHA_SLOTS, AlphaVector
from .states import (
    DensityMatrix,
    entropy_of_spectrum,
    haar_isometry,
    merge,
    mutual_information,
    partial_trace,
    permute,
    relabel,
    tensor,
)

LN2 = math.log(2)
ISOMETRY_TOL = 1e-10
REG = 1e-10


class InfiniteMeasureError(ValueError):
    """``f^alpha`` is unbounded below, so ``E_alpha = -inf``."""


@dataclass(frozen=True)
class Purification:
    """``|psi> = sum_i sqrt(lam_i) |e_i>_AB |i>_E`` stored as the ``(d_A d_B, d_E)`` matrix."""

    d_A: int
    d_B: int
    psi: np.ndarray
    eigenvalues: np.ndarray

    @property
    def d_E(self) -> int:
        return self.psi.shape[1]

    def state(self) -> DensityMatrix:
        v = self.psi.reshape(-1)
        return DensityMatrix({"A": self.d_A, "B": self.d_B, "E": self.d_E}, np.outer(v, v.conj()))


def _check_ab(rho: DensityMatrix):
    if rho.labels != ("A", "B"):
        raise KeyError(f"expected a state on (A, B), got {rho.labels}")


def purify(rho_AB: DensityMatrix) -> Purification:
    """Canonical purification: eigenvalues descending, first nonzero eigenvector entry real positive."""
    _check_ab(rho_AB)
    lam, U = np.linalg.eigh(rho_AB.matrix)
    order = np.argsort(-lam, kind="stable")
    lam, U = lam[order], U[:, order]
    keep = lam > 1e-10
    lam, U = lam[keep], U[:, keep]
    for j in range(U.shape[1]):
        k = np.flatnonzero(np.abs(U[:, j]) > 1e-12)[0]
        U[:, j] *= abs(U[k, j]) / U[k, j]
    d_A, d_B = rho_AB.shape
    return Purification(d_A, d_B, U * np.sqrt(lam), lam)


@dataclass
class ExtensionAnsatz:
    """Isometry ``W : E -> V (x) F`` (F fastest), acting on a fixed purification."""

    d_E: int
    d_V: int
    d_F: int
    W: np.ndarray

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=complex)
        if self.W.shape != (self.d_V * self.d_F, self.d_E):
            raise ValueError(
                f"isometry shape {self.W.shape} != ({self.d_V * self.d_F}, {self.d_E})")

    @property
    def params(self) -> np.ndarray:
        """Real parameter vector (real parts then imaginary parts)."""
        return np.concatenate([self.W.real.ravel(), self.W.imag.ravel()])

    @classmethod
    def from_params(cls, d_E, d_V, d_F, params):
        n = d_V * d_F * d_E
        W = (params[:n] + 1j * params[n:]).reshape(d_V * d_F, d_E)
        return cls(d_E, d_V, d_F, W)

    def isometry_error(self) -> float:
        return float(np.max(np.abs(self.W.conj().T @ self.W - np.eye(self.d_E))))

    def to_json(self) -> dict:
        return {"d_E": self.d_E, "d_V": self.d_V, "d_F": self.d_F,
                "real": self.W.real.tolist(), "imag": self.W.imag.tolist()}

    @classmethod
    def from_json(cls, data) -> ExtensionAnsatz:
        W = np.array(data["real"]) + 1j * np.array(data["imag"])
        return cls(data["d_E"], data["d_V"], data["d_F"], W)


def _retract(Y: np.ndarray) -> np.ndarray:
    Q, R = np.linalg.qr(Y)
    d = np.diag(R)
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1), 1)
    return Q * ph


def trivial_ansatz(d_E: int, d_V: int, d_F: int | None = None) -> ExtensionAnsatz:
    """``W = |0>_V (x) (E -> F)``: the extension ``rho_AB (x) |0><0|_V``."""
    d_F = d_F or d_V * d_E
    if d_F < d_E:
        raise ValueError("trivial extension needs d_F >= d_E")
    W = np.zeros((d_V, d_F, d_E), dtype=complex)
    W[0, :d_E, :] = np.eye(d_E)
    return ExtensionAnsatz(d_E, d_V, d_F, W.reshape(d_V * d_F, d_E))


def purification_ansatz(d_E: int, d_V: int, d_F: int | None = None) -> ExtensionAnsatz:
    """``W = (E -> V) (x) |0>_F``: V holds the purifying system."""
    d_F = d_F or d_V * d_E
    if d_V < d_E:
        raise ValueError("purification extension needs d_V >= d_E")
    W = np.zeros((d_V, d_F, d_E), dtype=complex)
    W[:d_E, 0, :] = np.eye(d_E)
    return ExtensionAnsatz(d_E, d_V, d_F, W.reshape(d_V * d_F, d_E))


def random_ansatz(d_E: int, d_V: int, d_F: int | None = None, seed=None) -> ExtensionAnsatz:
    d_F = d_F or d_V * d_E
    return ExtensionAnsatz(d_E, d_V, d_F, haar_isometry(d_E, d_V * d_F, seed))


def _pure_abvf(pur: Purification, an: ExtensionAnsatz) -> np.ndarray:
    if an.d_E != pur.d_E:
        raise ValueError(f"ansatz expects d_E={an.d_E}, purification has {pur.d_E}")
    return (pur.psi @ an.W.T).reshape(pur.d_A, pur.d_B, an.d_V, an.d_F)


def extension_from_ansatz(rho_AB: DensityMatrix, ansatz: ExtensionAnsatz,
                          pur: Purification | None = None) -> DensityMatrix:
    """``rho_ABV = Tr_F (1 (x) W) |psi><psi| (1 (x) W)^dagger``."""
    pur = pur or purify(rho_AB)
    err = ansatz.isometry_error()
    if err > ISOMETRY_TOL:
        raise ValueError(f"ansatz is not an isometry (W^dagger W - 1 = {err:.3g})")
    phi = _pure_abvf(pur, ansatz)
    M = phi.reshape(-1, ansatz.d_F)
    d_A, d_B = pur.d_A, pur.d_B
    rho = DensityMatrix({"A": d_A, "B": d_B, "V": ansatz.d_V}, M @ M.conj().T, validate=False)
    back = partial_trace(rho, ("A", "B")).matrix
    dev = np.max(np.abs(back - rho_AB.matrix))
    if dev > 1e-9:
        raise AssertionError(f"extension does not reduce to rho_AB (deviation {dev:.3g})")
    return rho


def ansatz_from_extension(rho_AB: DensityMatrix, rho_ABV: DensityMatrix, d_V: int | None = None,
                          d_F: int | None = None, pur: Purification | None = None) -> ExtensionAnsatz:
    """Isometry reproducing a given extension on the canonical purification.

    Both ``|phi>_ABVF`` (a purification of ``rho_ABV``) and ``|psi>_ABE``
    purify ``rho_AB``, so ``W^T = psi^+ phi`` with ``psi^+`` the pseudo-inverse.
    V is zero-padded up to ``d_V`` and F up to ``d_F``.
    """
    pur = pur or purify(rho_AB)
    if rho_ABV.labels != ("A", "B", "V"):
        raise KeyError(f"expected an extension on (A, B, V), got {rho_ABV.labels}")
    dv0 = rho_ABV.dims["V"]
    d_V = d_V or dv0
    if d_V < dv0:
        raise ValueError(f"extension has d_V={dv0} > requested {d_V}")
    lam, U = np.linalg.eigh(rho_ABV.matrix)
    keep = lam > 1e-12
    lam, U = lam[keep], U[:, keep]
    f0 = len(lam)
    d_F = d_F or d_V * pur.d_E
    if d_F < f0:
        raise ValueError(f"extension has rank {f0} > d_F={d_F}")
    phi = (U * np.sqrt(lam)).reshape(pur.d_A * pur.d_B, dv0, f0)
    padded = np.zeros((pur.d_A * pur.d_B, d_V, d_F), dtype=complex)
    padded[:, :dv0, :f0] = phi
    Wt = np.linalg.pinv(pur.psi) @ padded.reshape(pur.d_A * pur.d_B, d_V * d_F)
    W = _retract(Wt.T)
    return ExtensionAnsatz(pur.d_E, d_V, d_F, W)


# ---------------------------------------------------------------- objective

_SLOT_AXES = {slot: tuple("ABV".index(c) for c in slot) for slot in ALPHA_SLOTS}


class Objective:
    """``f^alpha`` and its Euclidean gradient as functions of the isometry ``W``.

    With ``reg > 0`` each marginal is replaced by ``rho + reg * I / d`` so the
    entropy derivative ``-(log2 rho + 1/ln 2)`` stays finite.
    """

    def __init__(self, alpha, pur: Purification, d_V: int, d_F: int):
        self.terms = [(slot, float(a)) for slot, a in zip(ALPHA_SLOTS, alpha) if a != 0]
        self.pur = pur
        self.d_V, self.d_F = d_V, d_F
        self.shape = (pur.d_A, pur.d_B, d_V, d_F)

    def phi(self, W: np.ndarray) -> np.ndarray:
        return (self.pur.psi @ W.T).reshape(self.shape)

    def value(self, W: np.ndarray, reg: float = 0.0) -> float:
        phi = self.phi(W)
        f = 0.0
        for slot, a in self.terms:
            M, _ = self._unfold(phi, slot)
            rho = M @ M.conj().T
            if reg:
                rho = rho + reg / rho.shape[0] * np.eye(rho.shape[0])
                f += a * _reg_entropy(np.linalg.eigvalsh(rho))
            else:
                f += a * float(entropy_of_spectrum(np.linalg.eigvalsh(rho)))
        return f

    def _unfold(self, phi, slot):
        axes = _SLOT_AXES[slot]
        rest = tuple(k for k in range(4) if k not in axes)
        dJ = math.prod(self.shape[k] for k in axes)
        return phi.transpose(axes + rest).reshape(dJ, -1), axes + rest

    def value_and_grad(self, W: np.ndarray, reg: float = REG):
        phi = self.phi(W)
        f = 0.0
        gamma = np.zeros_like(phi)
        for slot, a in self.terms:
            M, perm = self._unfold(phi, slot)
            rho = M @ M.conj().T
            d = rho.shape[0]
            rho = rho + reg / d * np.eye(d)
            lam, U = np.linalg.eigh(rho)
            lam = np.maximum(lam, reg / d if reg else 1e-300)
            f += a * _reg_entropy(lam)
            g = -(np.log2(lam) + 1 / LN2)
            GM = ((U * g) @ (U.conj().T @ M))
            shp = [self.shape[k] for k in perm]
            gamma += a * GM.reshape(shp).transpose(np.argsort(perm))
        gmat = gamma.reshape(self.shape[0] * self.shape[1], -1)
        # df = Re sum conj(G) dW with G = 2 Gamma^T conj(psi)
        G = 2 * gmat.T @ self.pur.psi.conj()
        return f, G


def _reg_entropy(lam: np.ndarray) -> float:
    lam = lam[lam > 0]
    return float(-(lam * np.log2(lam)).sum())


# ---------------------------------------------------------------- optimizer

@dataclass
class _Run:
    W: np.ndarray
    value: float
    iterations: int
    converged: bool


def _minimize(obj: Objective, W0: np.ndarray, max_iters: int, tol: float, window: int) -> _Run:
    W = _retract(W0)
    f, G = obj.value_and_grad(W)
    history = [f]
    t = 1.0
    prev = None
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        H = W.conj().T @ G
        xi = G - W @ ((H + H.conj().T) / 2)
        gn2 = float(np.vdot(xi, xi).real)
        if gn2 < 1e-28:
            converged = True
            break
        if prev is not None:
            # Barzilai-Borwein trial step
            s = W - prev[0]
            y = xi - prev[1]
            sy = abs(float(np.vdot(s, y).real))
            if sy > 1e-30:
                t = float(np.vdot(s, s).real) / sy
        t = min(max(t, 1e-8), 1e3)
        while True:
            Wn = _retract(W - t * xi)
            fn, Gn = obj.value_and_grad(Wn)
            if fn <= f - 1e-4 * t * gn2 or t < 1e-14:
                break
            t *= 0.5
        if fn > f:  # no descent possible at this resolution
            converged = True
            break
        prev = (W, xi)
        W, f, G = Wn, fn, Gn
        history.append(f)
        if len(history) > window and history[-window - 1] - f < tol:
            converged = True
            break
    return _Run(W, f, it, converged)


@dataclass
class MeasureEstimate:
    alpha: AlphaVector
    value: float
    lower_bound: float | None
    witness: ExtensionAnsatz
    d_V: int
    restarts: int
    max_iters: int
    seed: int
    iterations: int
    converged: bool
    restart_values: list = field(default_factory=list)
    warm_start_values: list = field(default_factory=list)

    @property
    def gap(self) -> float | None:
        return None if self.lower_bound is None else self.value - self.lower_bound

    def to_json(self) -> dict:
        return {
            "alpha": [float(a) for a in self.alpha],
            "value": self.value,
            "lower_bound": self.lower_bound,
            "gap": self.gap,
            "d_V": self.d_V,
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "seed": self.seed,
            "iterations": self.iterations,
            "converged": self.converged,
            "restart_values": self.restart_values,
            "warm_start_values": self.warm_start_values,
            "witness": self.witness.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def estimate_measure(alpha, rho_AB: DensityMatrix, d_V: int | None = None, restarts: int = 8,
                     max_iters: int = 2000, seed: int = 0, d_F: int | None = None,
                     warm_starts: Sequence = (), tol: float = 1e-8, window: int = 50) -> MeasureEstimate:
    """Best ``f^alpha`` over extensions with ``dim V <= d_V``; an upper bound on ``E_alpha``.

    The trivial extension, the purification (when ``d_V >= rank rho_AB``) and
    any extensions in ``warm_starts`` are always tried besides ``restarts``
    Haar-random isometries seeded by ``(seed, restart index)``.
    """
    alpha = alpha if isinstance(alpha, AlphaVector) else AlphaVector.real(alpha)
    if not finiteness_check(alpha):
        raise InfiniteMeasureError(
            f"alpha {alpha} has negative weight on V; E_alpha is -infinity")
    _check_ab(rho_AB)
    pur = purify(rho_AB)
    d_V = d_V or rho_AB.shape[0] * rho_AB.shape[1]
    if d_V < 1:
        raise ValueError("d_V must be >= 1")
    d_F = d_F or d_V * pur.d_E
    obj = Objective(alpha, pur, d_V, d_F)

    starts = [trivial_ansatz(pur.d_E, d_V, d_F).W]
    if d_V >= pur.d_E:
        starts.append(purification_ansatz(pur.d_E, d_V, d_F).W)
    for ext in warm_starts:
        starts.append(ansatz_from_extension(rho_AB, ext, d_V, d_F, pur).W)
    n_warm = len(starts)
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        starts.append(haar_isometry(pur.d_E, d_V * d_F, rng))

    best = None
    values, iters, conv = [], 0, True
    for W0 in starts:
        run = _minimize(obj, W0, max_iters, tol, window)
        iters += run.iterations
        conv &= run.converged
        # the reported value is unregularized; keep the start if it was better
        cands = [(obj.value(run.W), run.W), (obj.value(_retract(W0)), _retract(W0))]
        v, W = min(cands, key=lambda c: c[0])
        values.append(v)
        if best is None or v < best[0]:
            best = (v, W)
    witness = ExtensionAnsatz(pur.d_E, d_V, d_F, best[1])
    return MeasureEstimate(
        alpha=alpha, value=best[0], lower_bound=lower_bound(alpha, rho_AB), witness=witness,
        d_V=d_V, restarts=restarts, max_iters=max_iters, seed=seed, iterations=iters,
        converged=conv, restart_values=values[n_warm:], warm_start_values=values[:n_warm])


def witness_value(est: MeasureEstimate, rho_AB: DensityMatrix) -> float:
    """Replay the witness: ``f^alpha`` of the extension it realizes."""
    from .states import f_alpha
    return f_alpha(est.alpha, extension_from_ansatz(rho_AB, est.witness))


def _positive_multiple(alpha, ref) -> float | None:
    a = np.array([float(x) for x in alpha])
    r = np.array([float(x) for x in ref])
    c = float(a @ r / (r @ r))
    if c > 0 and np.allclose(a, c * r, atol=1e-12, rtol=0):
        return c
    return None


def lower_bound(alpha, rho_AB: DensityMatrix) -> float | None:
    """Certified lower bound on ``E_alpha`` when alpha is a known measure, else None.

    ``E_P, E_Q, E_R >= I(A:B)/2`` and ``inf I(A:B|V) >= 0``; positive multiples
    and purification duals of these objectives inherit the bound.
    """
    for name in ("P", "Q", "R", "sq"):
        ref = NAMED_ALPHAS[name]
        for cand in (ref, dual_alpha(ref)):
            c = _positive_multiple(alpha, cand)
            if c is not None:
                return 0.0 if name == "sq" else c * 0.5 * mutual_information(rho_AB)
    return None


# ---------------------------------------------------------------- products

def product_extension(ext1: DensityMatrix, ext2: DensityMatrix) -> DensityMatrix:
    """``rho_{A1B1V1} (x) rho_{A2B2V2}`` regrouped as an extension on A=A1A2, B=B1B2, V=V1V2."""
    t = tensor(relabel(ext1, {"A": "A1", "B": "B1", "V": "V1"}),
               relabel(ext2, {"A": "A2", "B": "B2", "V": "V2"}))
    t = permute(t, ["A1", "A2", "B1", "B2", "V1", "V2"])
    t = merge(merge(merge(t, ["A1", "A2"], "A"), ["B1", "B2"], "B"), ["V1", "V2"], "V")
    return t


def product_pair(rho1: DensityMatrix, rho2: DensityMatrix) -> DensityMatrix:
    """``rho_{A1B1} (x) rho_{A2B2}`` as a bipartite state on A=A1A2, B=B1B2."""
    t = tensor(relabel(rho1, {"A": "A1", "B": "B1"}), relabel(rho2, {"A": "A2", "B": "B2"}))
    t = permute(t, ["A1", "A2", "B1", "B2"])
    return merge(merge(t, ["A1", "A2"], "A"), ["B1", "B2"], "B")


def estimate_product(alpha, rho1: DensityMatrix, rho2: DensityMatrix, d_V1: int | None = None,
                     d_V2: int | None = None, **kw) -> tuple:
    """Estimate on ``rho1 (x) rho2``, warm-started from the product of the factor witnesses.

    Returns ``(joint, first, second)`` estimates.
    """
    e1 = estimate_measure(alpha, rho1, d_V1, **kw)
    e2 = estimate_measure(alpha, rho2, d_V2, **kw)
    w = product_extension(extension_from_ansatz(rho1, e1.witness),
                          extension_from_ansatz(rho2, e2.witness))
    joint = estimate_measure(alpha, product_pair(rho1, rho2), d_V=w.dims["V"],
                             warm_starts=[w], **kw)
    return joint, e1, e2
