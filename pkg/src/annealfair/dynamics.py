"""Schroedinger evolution of the annealing Hamiltonian.

H(t) = (t/T) H_p + (1 - t/T) H_q with H_p diagonal in the computational
basis and H_q the transverse-field driver -sum_i sigma_i^x. States are
complex vectors over bitmask basis states; the operator is applied
matrix-free (cost n * 2^n per evaluation).

The integrator is an adaptive embedded Dormand-Prince 5(4) pair run in a
co-moving phase frame: the instantaneous energy expectation <psi|H|psi>
(a real scalar) is subtracted from H at every stage and its integral is
carried as one extra ODE variable, then restored as exp(-i * integral) on
the final state. This is an exact reformulation - all amplitudes and the
global phase agree with the plain equation - but the dominant phase
rotation no longer limits the step size, which is what makes anneal times
of 1e5 tractable and keeps the norm drift far below the 1e-6 budget.
Norm is monitored and asserted, never silently renormalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import IsingModel
from .oracle import all_config_energies

MAX_SPINS = 14
NORM_DRIFT_TOL = 1e-6
_MAX_STEP_FRACTION = 0.02  # cap h at T/50 so the schedule is always resolved
_MAX_STEPS = 1_000_000_000


class DynamicsError(RuntimeError):
    """Base class for integration failures; carries the failure time."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t = {t:g})")
        self.t = t


class StiffnessError(DynamicsError):
    pass


class NormDriftError(DynamicsError):
    pass


@dataclass(frozen=True)
class QuantumState:
    """Normalized amplitude vector over the 2^n computational basis states."""

    amplitudes: np.ndarray
    n: int

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def check_norm(self, tol: float = NORM_DRIFT_TOL) -> None:
        drift = abs(self.norm_sq() - 1.0)
        if drift > tol:
            raise NormDriftError(f"norm drift {drift:.3e} exceeds {tol:g}", t=float("nan"))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class AnnealRun:
    """One evolution: total time T (hbar = 1) and integrator settings."""

    T: float
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    drop_offset: bool = True

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError(f"anneal time must be positive, got {self.T}")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("integrator tolerances must be positive")


@dataclass(frozen=True)
class EvolveStats:
    steps: int
    accepted: int
    rejected: int
    norm_drift: float


def initial_state(n: int) -> QuantumState:
    """Uniform superposition, the driver ground state prepared at t = 0."""
    if not 1 <= n <= MAX_SPINS:
        raise ValueError(f"spin count must be in [1, {MAX_SPINS}], got {n}")
    dim = 1 << n
    amp = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
    return QuantumState(amplitudes=amp, n=n)


def apply_hamiltonian(diag: np.ndarray, s: float, state):
    """Apply s * diag(E) + (1-s) * driver to a state or raw vector.

    out[x] = s * diag[x] * in[x] - (1 - s) * sum_i in[x XOR 2^i].
    """
    vec = state.amplitudes if isinstance(state, QuantumState) else np.asarray(state)
    dim = len(diag)
    n = dim.bit_length() - 1
    if dim != 1 << n or len(vec) != dim:
        raise ValueError("diagonal and state must both have length 2^n")
    out = s * np.asarray(diag) * vec
    x = np.arange(dim)
    for i in range(n):
        out = out - (1.0 - s) * vec[x ^ (1 << i)]
    if isinstance(state, QuantumState):
        return QuantumState(amplitudes=out, n=state.n)
    return out


# Dormand-Prince 5(4) tableau (FSAL: stage 7 is the next step's stage 1).
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9


@njit(cache=True, nogil=True, fastmath=True)
def _shifted_rhs(diag, masks, s, y, out):
    """out = -i (H(s) y - <y|H|y>/<y|y> * y); returns the shift (phase rate).

    masks are the XOR offsets of the driver's single-flip neighbors; in the
    spin-flip-even sector the top-bit flip turns into complementing the
    remaining bits, so the sector driver is again a plain mask table.
    """
    dim = y.shape[0]
    nmask = masks.shape[0]
    num = 0.0
    den = 0.0
    for x in range(dim):
        acc = 0.0 + 0.0j
        for i in range(nmask):
            acc += y[x ^ masks[i]]
        w = s * diag[x] * y[x] - (1.0 - s) * acc
        out[x] = w
        yx = y[x]
        num += yx.real * w.real + yx.imag * w.imag
        den += yx.real * yx.real + yx.imag * yx.imag
    c = num / den
    for x in range(dim):
        out[x] = -1j * (out[x] - c * y[x])
    return c


@njit(cache=True, nogil=True, fastmath=True)
def _evolve_kernel(diag, masks, T, rtol, atol, hmax, max_steps):
    dim = diag.shape[0]
    y = np.full(dim, 1.0 / np.sqrt(dim) + 0.0j)
    ynew = np.empty(dim, np.complex128)
    ytmp = np.empty(dim, np.complex128)
    k1 = np.empty(dim, np.complex128)
    k2 = np.empty(dim, np.complex128)
    k3 = np.empty(dim, np.complex128)
    k4 = np.empty(dim, np.complex128)
    k5 = np.empty(dim, np.complex128)
    k6 = np.empty(dim, np.complex128)
    k7 = np.empty(dim, np.complex128)

    phase = 0.0
    t = 0.0
    h = min(T * 1e-6, hmax)
    p1 = _shifted_rhs(diag, masks, 0.0, y, k1)
    nsteps = 0
    naccept = 0
    nreject = 0

    while t < T:
        if nsteps >= max_steps:
            return y, phase, 2, t, nsteps, naccept, nreject
        if h < 1e-14 * max(t, 1.0):
            return y, phase, 1, t, nsteps, naccept, nreject
        last = t + h >= T
        if last:
            h = T - t

        s2 = min((t + _C2 * h) / T, 1.0)
        s3 = min((t + _C3 * h) / T, 1.0)
        s4 = min((t + _C4 * h) / T, 1.0)
        s5 = min((t + _C5 * h) / T, 1.0)
        s6 = min((t + h) / T, 1.0)

        for x in range(dim):
            ytmp[x] = y[x] + h * (_A21 * k1[x])
        p2 = _shifted_rhs(diag, masks, s2, ytmp, k2)
        for x in range(dim):
            ytmp[x] = y[x] + h * (_A31 * k1[x] + _A32 * k2[x])
        p3 = _shifted_rhs(diag, masks, s3, ytmp, k3)
        for x in range(dim):
            ytmp[x] = y[x] + h * (_A41 * k1[x] + _A42 * k2[x] + _A43 * k3[x])
        p4 = _shifted_rhs(diag, masks, s4, ytmp, k4)
        for x in range(dim):
            ytmp[x] = y[x] + h * (_A51 * k1[x] + _A52 * k2[x] + _A53 * k3[x] + _A54 * k4[x])
        p5 = _shifted_rhs(diag, masks, s5, ytmp, k5)
        for x in range(dim):
            ytmp[x] = y[x] + h * (
                _A61 * k1[x] + _A62 * k2[x] + _A63 * k3[x] + _A64 * k4[x] + _A65 * k5[x]
            )
        p6 = _shifted_rhs(diag, masks, s6, ytmp, k6)
        for x in range(dim):
            ynew[x] = y[x] + h * (
                _B1 * k1[x] + _B3 * k3[x] + _B4 * k4[x] + _B5 * k5[x] + _B6 * k6[x]
            )
        pnew = phase + h * (_B1 * p1 + _B3 * p3 + _B4 * p4 + _B5 * p5 + _B6 * p6)
        p7 = _shifted_rhs(diag, masks, s6, ynew, k7)

        err_sq = 0.0
        for x in range(dim):
            e = h * (
                _E1 * k1[x] + _E3 * k3[x] + _E4 * k4[x] + _E5 * k5[x] + _E6 * k6[x] + _E7 * k7[x]
            )
            yx = y[x]
            yn = ynew[x]
            ay2 = yx.real * yx.real + yx.imag * yx.imag
            an2 = yn.real * yn.real + yn.imag * yn.imag
            sc = atol + rtol * np.sqrt(ay2 if ay2 > an2 else an2)
            err_sq += (e.real * e.real + e.imag * e.imag) / (sc * sc)
        e_ph = h * (_E1 * p1 + _E3 * p3 + _E4 * p4 + _E5 * p5 + _E6 * p6 + _E7 * p7)
        aph = abs(phase)
        anew = abs(pnew)
        sc_ph = atol + rtol * (aph if aph > anew else anew)
        err_sq += (e_ph / sc_ph) * (e_ph / sc_ph)
        err = np.sqrt(err_sq / (dim + 1))

        nsteps += 1
        if err <= 1.0:
            naccept += 1
            t = T if last else t + h
            tmp = y
            y = ynew
            ynew = tmp
            phase = pnew
            tmp = k1
            k1 = k7
            k7 = tmp
            p1 = p7
            if err == 0.0:
                factor = 5.0
            else:
                factor = 0.9 * err ** (-0.2)
                if factor > 5.0:
                    factor = 5.0
                elif factor < 0.2:
                    factor = 0.2
            h = min(h * factor, hmax)
        else:
            nreject += 1
            factor = 0.9 * err ** (-0.2)
            if factor < 0.2:
                factor = 0.2
            elif factor > 1.0:
                factor = 1.0
            h = h * factor

    return y, phase, 0, T, nsteps, naccept, nreject


def evolve(model: IsingModel, run: AnnealRun, return_stats: bool = False):
    """Integrate from the uniform superposition to t = T, returning psi(T).

    The constant model offset is excluded from the diagonal when
    run.drop_offset is set (it only contributes a global phase). When the
    model has no local fields, H commutes with the global spin flip and
    the initial state is flip-even, so the evolution runs exactly in the
    even sector at half the dimension and is expanded afterwards. Raises
    StiffnessError on step-size underflow and NormDriftError if the final
    norm has drifted by more than 1e-6; failures report the time reached.
    """
    if model.n > MAX_SPINS:
        raise ValueError(f"{model.n} spins exceeds the dynamics cap of {MAX_SPINS}")
    n = model.n
    diag = all_config_energies(model, include_offset=not run.drop_offset)
    flip_even = n >= 2 and not any(model.h)
    if flip_even:
        half = 1 << (n - 1)
        kernel_diag = diag[:half]
        masks = np.array([1 << i for i in range(n - 1)] + [half - 1], dtype=np.int64)
    else:
        kernel_diag = diag
        masks = np.array([1 << i for i in range(n)], dtype=np.int64)
    y, phase, status, t, nsteps, naccept, nreject = _evolve_kernel(
        kernel_diag,
        masks,
        float(run.T),
        float(run.rel_tol),
        float(run.abs_tol),
        float(run.T) * _MAX_STEP_FRACTION,
        _MAX_STEPS,
    )
    if status == 1:
        raise StiffnessError("step size underflow", t=t)
    if status == 2:
        raise StiffnessError(f"step budget of {_MAX_STEPS} exhausted", t=t)
    if flip_even:
        half = 1 << (n - 1)
        full = np.empty(1 << n, dtype=np.complex128)
        full[:half] = y / np.sqrt(2.0)
        full[half:] = full[:half][::-1]  # complement of x < half is (2^n - 1) - x
        y = full
    psi = y * np.exp(-1j * phase)
    drift = abs(float(np.sum(psi.real**2 + psi.imag**2)) - 1.0)
    if drift > NORM_DRIFT_TOL:
        raise NormDriftError(f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL:g}", t=t)
    state = QuantumState(amplitudes=psi, n=model.n)
    if return_stats:
        return state, EvolveStats(nsteps, naccept, nreject, drift)
    return state


def ground_state_probabilities(
    state: QuantumState, ground_set
) -> tuple[float, list[float]]:
    """Probability of each listed configuration and their total."""
    dim = len(state.amplitudes)
    p_per_state = []
    for config in ground_set:
        if not 0 <= config < dim:
            raise ValueError(f"configuration {config} out of range for {state.n} spins")
        a = state.amplitudes[config]
        p_per_state.append(float(a.real * a.real + a.imag * a.imag))
    return float(sum(p_per_state)), p_per_state
