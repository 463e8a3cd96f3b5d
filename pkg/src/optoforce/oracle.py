"""Independent validation engines.

Two deliberately separate code paths back every closed form in the package:

* fixed-step RK4 integration of the exact moment ODEs
  dm/dt = A m + c(t),  dV/dt = A V + V A^T  (and the propagator itself),
* truncated Fock-space moment computation for the thermal, two-mode
  squeezed and single-mode squeezed initial states.

Both are deterministic; neither shares code with the closed-form
propagators they certify.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

Generator = Callable[[float], tuple[np.ndarray, np.ndarray]]

_MAX_CUTOFF = 600
_STEP_SAFETY = 0.1


@dataclass(frozen=True)
class OdeSpec:
    """Fixed-step RK4 problem: generator t -> (A, c), horizon and step count."""

    dim: int
    generator: Generator
    t_final: float
    n_steps: int

    def __post_init__(self):
        if self.dim <= 0 or self.dim % 2:
            raise ValueError("dim must be a positive even integer")
        if self.n_steps < 100:
            raise ValueError("n_steps must be >= 100")
        a, c = self.generator(0.0)
        if a.shape != (self.dim, self.dim) or c.shape != (self.dim,):
            raise ValueError("generator output does not match dim")


def _check_step(spec: OdeSpec) -> None:
    a, _ = spec.generator(0.0)
    h = spec.t_final / spec.n_steps
    norm = np.linalg.norm(a, 2)
    if norm * abs(h) >= _STEP_SAFETY:
        needed = int(np.ceil(norm * abs(spec.t_final) / _STEP_SAFETY)) + 1
        raise ValueError(
            f"step size too large: ||A|| h = {norm * abs(h):.3g} >= {_STEP_SAFETY}; "
            f"use n_steps >= {needed}"
        )


def _rk4(spec: OdeSpec, y0: np.ndarray, rhs) -> np.ndarray:
    h = spec.t_final / spec.n_steps
    y = y0
    t = 0.0
    for _ in range(spec.n_steps):
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2.0, y + (h / 2.0) * k1)
        k3 = rhs(t + h / 2.0, y + (h / 2.0) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
    return y


def integrate_moments(
    spec: OdeSpec, m0: np.ndarray, v0: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """RK4 solution of the mean and covariance ODEs at t_final."""
    _check_step(spec)
    m0 = np.asarray(m0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    d = spec.dim

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        a, c = spec.generator(t)
        m = y[:d]
        v = y[d:].reshape(d, d)
        dm = a @ m + c
        dv = a @ v + v @ a.T
        return np.concatenate([dm, dv.ravel()])

    y = _rk4(spec, np.concatenate([m0, v0.ravel()]), rhs)
    m = y[:d]
    v = y[d:].reshape(d, d)
    return m, 0.5 * (v + v.T)


def integrate_propagator(spec: OdeSpec) -> tuple[np.ndarray, np.ndarray]:
    """RK4 solution of M' = A M, d' = A d + c with M(0) = 1, d(0) = 0."""
    _check_step(spec)
    d = spec.dim

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        a, c = spec.generator(t)
        m = y[: d * d].reshape(d, d)
        disp = y[d * d :]
        return np.concatenate([(a @ m).ravel(), a @ disp + c])

    y0 = np.concatenate([np.eye(d).ravel(), np.zeros(d)])
    y = _rk4(spec, y0, rhs)
    return y[: d * d].reshape(d, d), y[d * d :]


def expm_propagator(a: np.ndarray, t: float) -> np.ndarray:
    """Matrix-exponential reference for constant generators (machine precision)."""
    return expm(a * t)


def convergence_report(spec: OdeSpec, m0: np.ndarray, v0: np.ndarray) -> dict:
    """Self-convergence certificate for the RK4 oracle.

    Runs at n, 2n and 4n steps, reports the max componentwise differences
    and the observed convergence order; for a time-independent A also the
    deviation of the homogeneous propagator from the matrix exponential.
    """
    runs = {}
    for mult in (1, 2, 4):
        sub = OdeSpec(spec.dim, spec.generator, spec.t_final, spec.n_steps * mult)
        m, v = integrate_moments(sub, m0, v0)
        runs[mult] = np.concatenate([m, v.ravel()])
    diff_12 = float(np.max(np.abs(runs[1] - runs[2])))
    diff_24 = float(np.max(np.abs(runs[2] - runs[4])))
    order = float(np.log2(diff_12 / diff_24)) if diff_24 > 0 else float("inf")

    a0, _ = spec.generator(0.0)
    a1, _ = spec.generator(0.5 * spec.t_final)
    report = {
        "n_steps": spec.n_steps,
        "diff_n_2n": diff_12,
        "diff_2n_4n": diff_24,
        "observed_order": order,
    }
    if np.array_equal(a0, a1):
        mat, _ = integrate_propagator(spec)
        report["expm_deviation"] = float(
            np.max(np.abs(mat - expm_propagator(a0, spec.t_final)))
        )
    return report


# ---------------------------------------------------------------------------
# Truncated Fock-space moments


@dataclass(frozen=True)
class FockSpec:
    """Initial-state family for the Fock oracle.

    family: 'thermal' (param = n_bar), 'tmsv' or 'squeezed' (param = s,
    with optional angle phi for 'squeezed').  The cutoff is chosen so the
    neglected tail weight is below tail_tol.
    """

    family: str
    param: float
    phi: float = 0.0
    tail_tol: float = 1e-12

    def __post_init__(self):
        if self.family not in ("thermal", "tmsv", "squeezed"):
            raise ValueError(f"unknown family {self.family!r}")

    def cutoff(self) -> int:
        if self.family == "thermal":
            n_bar = self.param
            if n_bar < 0:
                raise ValueError("n_bar must be nonnegative")
            if n_bar == 0:
                return 1
            q = n_bar / (1.0 + n_bar)
            n = int(np.ceil(np.log(self.tail_tol) / np.log(q))) + 1
        elif self.family == "tmsv":
            lam = abs(np.tanh(self.param))
            if lam == 0:
                return 1
            n = int(np.ceil(np.log(self.tail_tol) / (2.0 * np.log(lam)))) + 1
        else:  # squeezed: same geometric tail rate as tmsv, with margin
            lam = abs(np.tanh(self.param))
            if lam == 0:
                return 4  # keep the tail check meaningful
            n = 2 * (int(np.ceil(np.log(self.tail_tol) / (2.0 * np.log(lam)))) + 8)
        if n > _MAX_CUTOFF:
            raise ValueError(
                f"cutoff {n} exceeds {_MAX_CUTOFF}: Fock oracle is validated for "
                "|s| <= 1.5 and n_bar <= 5 only"
            )
        return n


def _ladder(cut: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cut + 1)), k=1)


def _quadratures(cut: int) -> tuple[np.ndarray, np.ndarray]:
    a = _ladder(cut).astype(complex)
    x = (a + a.T) / 2.0
    y = (a - a.T) / 2.0j
    return x, y


def fock_moments(spec: FockSpec) -> tuple[np.ndarray, np.ndarray]:
    """First and second quadrature moments by direct ladder-operator algebra."""
    if spec.family == "thermal":
        return _thermal_moments(spec)
    if spec.family == "tmsv":
        return _tmsv_moments(spec)
    return _squeezed_moments(spec)


def _sym_cov(ops: list[np.ndarray], weight) -> tuple[np.ndarray, np.ndarray]:
    """Mean and symmetrized covariance of operators under weight(op) = <op>."""
    k = len(ops)
    mean = np.array([weight(op) for op in ops])
    cov = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            sym = 0.5 * (ops[i] @ ops[j] + ops[j] @ ops[i])
            cov[i, j] = cov[j, i] = weight(sym) - mean[i] * mean[j]
    return mean, cov


def _thermal_moments(spec: FockSpec) -> tuple[np.ndarray, np.ndarray]:
    cut = spec.cutoff()
    n_bar = spec.param
    if n_bar == 0:
        w = np.zeros(cut + 1)
        w[0] = 1.0
    else:
        q = n_bar / (1.0 + n_bar)
        w = (1.0 - q) * q ** np.arange(cut + 1)
    x, y = _quadratures(cut)

    def weight(op: np.ndarray) -> float:
        return float(np.real(np.sum(w * np.diagonal(op))))

    return _sym_cov([x, y], weight)


def _tmsv_moments(spec: FockSpec) -> tuple[np.ndarray, np.ndarray]:
    """Moments of sqrt(1 - tanh^2 s) sum_n tanh^n(s) |n, n>.

    The state is diagonal in the pair index, so for a product operator
    O1 x O2 the expectation reduces to c^T (O1 * O2) c with * elementwise.
    """
    cut = spec.cutoff()
    lam = np.tanh(spec.param)
    c = lam ** np.arange(cut + 1)
    c *= np.sqrt(1.0 - lam**2)
    x, y = _quadratures(cut)
    eye = np.eye(cut + 1, dtype=complex)
    # quadratures as (mode-1 factor, mode-2 factor) pairs
    ops = [(x, eye), (y, eye), (eye, x), (eye, y)]

    def expect(o1: np.ndarray, o2: np.ndarray) -> float:
        return float(np.real(c @ (o1 * o2) @ c))

    mean = np.array([expect(o1, o2) for o1, o2 in ops])
    cov = np.zeros((4, 4))
    for i in range(4):
        for j in range(i, 4):
            a1, a2 = ops[i]
            b1, b2 = ops[j]
            sym = 0.5 * (expect(a1 @ b1, a2 @ b2) + expect(b1 @ a1, b2 @ a2))
            cov[i, j] = cov[j, i] = sym - mean[i] * mean[j]
    return mean, cov


def _squeezed_moments(spec: FockSpec) -> tuple[np.ndarray, np.ndarray]:
    """Moments of exp[zeta* a^2 - zeta a^dag^2]|0>, zeta = (s/2) e^{2i phi}."""
    cut = spec.cutoff()
    a = _ladder(cut)
    zeta = 0.5 * spec.param * np.exp(2j * spec.phi)
    gen = np.conj(zeta) * (a @ a) - zeta * (a.T @ a.T)
    psi = expm(gen) @ np.eye(cut + 1)[:, 0]
    tail = abs(psi[-1]) ** 2 + abs(psi[-2]) ** 2
    if tail > spec.tail_tol:
        raise ValueError(
            f"truncation tail {tail:.3g} exceeds {spec.tail_tol}; "
            "squeezed oracle validated for |s| <= 1.5"
        )
    x, y = _quadratures(cut)

    def weight(op: np.ndarray) -> float:
        return float(np.real(np.conj(psi) @ op @ psi))

    return _sym_cov([x, y], weight)
