"""Continuous-time three-layer associative network with winner-take-all dynamics.

The middle layer of n linear-threshold neurons receives synaptic currents
s_i = sum_j gx[i][j] * x_j, competes through a local excitatory feedback
(gain alpha) against a global inhibitory feedback (gain beta) plus an
external inhibition drive, and projects through an output matrix gy.
Membrane potentials obey

    tau * du_i/dt + u_i = s_i + alpha * r_i - q
    r_i = max(u_i, 0)
    q   = beta * sum_i r_i + x_inh

For 1 < alpha < 1 + beta the layer is in the winner-take-all regime: the
neuron(s) with maximal s_i outgrow the rest, the equilibrium with several
survivors is unstable, and injected noise leaves exactly one winner.

While the set of active neurons (u_i > 0) is constant and inputs are step
functions, the trajectory has a closed form combining a growing exponential
exp(a*t) with a = (alpha - 1)/tau on the deviation from the active-set
average, and a decaying exponential exp(-b*t) with
b = (1 + beta*n1 - alpha)/tau on the average itself (n1 = number of active
neurons).  ``closed_form_u`` evaluates it and serves as the integrator's
oracle on such intervals.

Driving the network with a "psychological" clock (input during the first
half of each cycle, a strong inhibition pulse during the second half that
wipes residual activity, outputs sampled at mid-cycle) turns it into a
combinatorial symbol machine over the codes stored in gx/gy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from numba import njit

from .errors import (ConfigurationError, DimensionMismatchError,
                     NonConvergenceError, NumericalDivergenceError,
                     ResetFailureError, SingularParameterError)

DEFAULT_NOISE_AMP = 1e-6
MAX_SETTLE_TIME_TAU = 1000.0


@dataclass
class Ann0Params:
    """Network geometry and gains; gx is n x m, gy is out_dim x n."""

    alpha: float
    beta: float
    tau: float
    gx: np.ndarray
    gy: np.ndarray
    noise_amp: float = 0.0

    def __post_init__(self):
        self.gx = np.asarray(self.gx, dtype=np.float64)
        self.gy = np.asarray(self.gy, dtype=np.float64)
        if self.tau <= 0:
            raise ConfigurationError(f"tau must be positive, got {self.tau}")
        if self.gx.ndim != 2 or self.gy.ndim != 2:
            raise ConfigurationError("gx and gy must be 2-d arrays")
        if self.gy.shape[1] != self.gx.shape[0]:
            raise DimensionMismatchError(
                f"gy has {self.gy.shape[1]} columns but the network has "
                f"{self.gx.shape[0]} neurons")
        if not (np.all(np.isfinite(self.gx)) and np.all(np.isfinite(self.gy))):
            raise ConfigurationError("gx/gy must be finite")
        if self.noise_amp < 0:
            raise ConfigurationError("noise_amp must be non-negative")

    @property
    def n(self) -> int:
        return self.gx.shape[0]

    @property
    def m(self) -> int:
        return self.gx.shape[1]

    @property
    def out_dim(self) -> int:
        return self.gy.shape[0]

    @property
    def wta_regime(self) -> bool:
        return 1.0 < self.alpha < 1.0 + self.beta


@dataclass
class Ann0State:
    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.float64).copy()


@dataclass
class DriveSchedule:
    """Psychological clock: cycle length dt_psy, inhibition pulse xinh0.

    ``xinh0=None`` autoselects 10 * max synaptic current seen in the run,
    which guarantees full deactivation during the reset half-cycle.
    ``dt=None`` uses tau/100.
    """

    dt_psy: float
    xinh0: Optional[float] = None
    dt: Optional[float] = None


def synaptic_currents(x: Sequence[float], params: Ann0Params) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.m,):
        raise DimensionMismatchError(f"input has shape {x.shape}, expected ({params.m},)")
    return params.gx @ x


def output_projection(r: Sequence[float], params: Ann0Params) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (params.n,):
        raise DimensionMismatchError(f"r has shape {r.shape}, expected ({params.n},)")
    return params.gy @ r


@njit(cache=True)
def _rk4_record(u, s, xinh, alpha, beta, tau, dt, steps, noise_amp, seed, out):
    n = u.shape[0]
    if noise_amp > 0.0:
        np.random.seed(seed)
    out[0, :] = u
    for k in range(steps):
        k1 = _deriv(u, s, xinh, alpha, beta, tau)
        k2 = _deriv(u + 0.5 * dt * k1, s, xinh, alpha, beta, tau)
        k3 = _deriv(u + 0.5 * dt * k2, s, xinh, alpha, beta, tau)
        k4 = _deriv(u + dt * k3, s, xinh, alpha, beta, tau)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if noise_amp > 0.0:
            for i in range(n):
                u[i] += np.random.uniform(-noise_amp, noise_amp)
        out[k + 1, :] = u
    return u


@njit(cache=True, inline="always")
def _deriv(u, s, xinh, alpha, beta, tau):
    n = u.shape[0]
    r_sum = 0.0
    for i in range(n):
        if u[i] > 0.0:
            r_sum += u[i]
    q = beta * r_sum + xinh
    du = np.empty(n)
    for i in range(n):
        r_i = u[i] if u[i] > 0.0 else 0.0
        du[i] = (s[i] + alpha * r_i - q - u[i]) / tau
    return du


@njit(cache=True)
def _wta_settle(u, s, xinh, alpha, beta, tau, dt, noise_amp, seed,
                max_steps, settle_steps, du_tol):
    """Integrate until exactly one neuron stays active for settle_steps.

    Returns (winner, steps, status): status 1 settled, 0 timed out,
    -1 diverged.  The |du| criterion uses the deterministic increment,
    evaluated before the noise kick.
    """
    n = u.shape[0]
    if noise_amp > 0.0:
        np.random.seed(seed)
    stable = 0
    prev_active = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        prev_active[i] = u[i] > 0.0
    for k in range(max_steps):
        k1 = _deriv(u, s, xinh, alpha, beta, tau)
        k2 = _deriv(u + 0.5 * dt * k1, s, xinh, alpha, beta, tau)
        k3 = _deriv(u + 0.5 * dt * k2, s, xinh, alpha, beta, tau)
        k4 = _deriv(u + dt * k3, s, xinh, alpha, beta, tau)
        du = (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        du_max = 0.0
        for i in range(n):
            a = abs(du[i])
            if a > du_max:
                du_max = a
            u[i] += du[i]
        if noise_amp > 0.0:
            for i in range(n):
                u[i] += np.random.uniform(-noise_amp, noise_amp)
        n_active = 0
        winner = -1
        same = True
        for i in range(n):
            act = u[i] > 0.0
            if act:
                n_active += 1
                winner = i
            if act != prev_active[i]:
                same = False
            prev_active[i] = act
        if not np.all(np.isfinite(u)):
            return -1, k + 1, -1
        if same and n_active == 1 and du_max < du_tol:
            stable += 1
            if stable >= settle_steps:
                return winner, k + 1, 1
        else:
            stable = 0
    return -1, max_steps, 0


def integrate(state: Ann0State, s: Sequence[float], x_inh: float,
              params: Ann0Params, dt: float, steps: int,
              seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Advance the network ODEs with step-constant s and x_inh.

    Returns (times, U) where U[k] is the potential vector after k steps.
    Noise of amplitude params.noise_amp is injected independently per step.
    """
    if dt > params.tau / 50.0:
        raise ConfigurationError(f"dt={dt} too coarse; need dt <= tau/50 = {params.tau / 50}")
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (params.n,):
        raise DimensionMismatchError(f"s has shape {s.shape}, expected ({params.n},)")
    out = np.empty((steps + 1, params.n), dtype=np.float64)
    _rk4_record(state.u.copy(), s, float(x_inh), params.alpha, params.beta,
                params.tau, dt, steps, params.noise_amp,
                int(seed) & 0xFFFFFFFF, out)
    if not np.all(np.isfinite(out[-1])):
        raise NumericalDivergenceError("non-finite potentials during integration")
    times = state.t + dt * np.arange(steps + 1)
    return times, out


def closed_form_u(params: Ann0Params, s: Sequence[float], u0: Sequence[float],
                  x_inh: float, active: Sequence[int], t: float) -> np.ndarray:
    """Explicit transient solution for the neurons in ``active``.

    Valid only while all listed neurons keep u > 0 over [0, t] and every
    other neuron stays off; callers are responsible for that precondition.
    """
    s = np.asarray(s, dtype=np.float64)
    u0 = np.asarray(u0, dtype=np.float64)
    idx = np.asarray(list(active), dtype=np.intp)
    n1 = len(idx)
    if n1 == 0:
        return np.empty(0)
    denom1 = params.alpha - 1.0
    denom2 = 1.0 + params.beta * n1 - params.alpha
    if abs(denom1) < 1e-12:
        raise SingularParameterError("alpha = 1 makes the transient expression singular")
    if abs(denom2) < 1e-12:
        raise SingularParameterError(
            f"alpha = 1 + beta*n1 (= {1 + params.beta * n1}) makes the transient singular")
    a = denom1 / params.tau
    b = denom2 / params.tau
    s_act = s[idx]
    u0_act = u0[idx]
    s_av = s_act.mean()
    u0_av = u0_act.mean()
    return ((s_act - s_av) / denom1 * (np.exp(a * t) - 1.0)
            + (u0_act - u0_av) * np.exp(a * t)
            + (s_av - x_inh) / denom2 * (1.0 - np.exp(-b * t))
            + u0_av * np.exp(-b * t))


@dataclass(frozen=True)
class WtaResult:
    winner: int
    settle_time: float


def run_wta(params: Ann0Params, s: Sequence[float], x_inh: float = 0.0,
            seed: int = 0, dt: Optional[float] = None) -> WtaResult:
    """Run the competition from rest until a single settled winner remains.

    Settlement means the active set is {winner} and the deterministic
    per-step increment stays below tolerance for one full tau.  The
    tolerance floor is raised by the noise amplitude, since injected noise
    keeps the state jittering at that scale.
    """
    dt = params.tau / 100.0 if dt is None else dt
    if dt > params.tau / 50.0:
        raise ConfigurationError("dt too coarse; need dt <= tau/50")
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (params.n,):
        raise DimensionMismatchError(f"s has shape {s.shape}, expected ({params.n},)")
    max_steps = int(round(MAX_SETTLE_TIME_TAU * params.tau / dt))
    settle_steps = max(1, int(round(params.tau / dt)))
    du_tol = 1e-9 * params.tau + 10.0 * params.noise_amp
    u = np.zeros(params.n, dtype=np.float64)
    winner, steps, status = _wta_settle(
        u, s, float(x_inh), params.alpha, params.beta, params.tau, dt,
        params.noise_amp, int(seed) & 0xFFFFFFFF, max_steps, settle_steps, du_tol)
    if status == -1:
        raise NumericalDivergenceError("winner-take-all run diverged")
    if status != 1:
        raise NonConvergenceError(
            f"no settled winner within {MAX_SETTLE_TIME_TAU} tau "
            f"(s={s.tolist()}, noise_amp={params.noise_amp})")
    return WtaResult(winner=int(winner), settle_time=steps * dt)


def classify_output(y: np.ndarray, alphabet: Sequence[Sequence[int]],
                    null_tol: float = 1e-4, rel_tol: float = 1e-3):
    """Map a sampled output vector to the stored code it is proportional to.

    The output layer emits r_win * code(win), so the symbol is recovered by
    a matched filter: the unique alphabet code c with y ~= lam * c, lam > 0.
    Returns None for (near-)zero y, raises if nothing matches.
    """
    y = np.asarray(y, dtype=np.float64)
    if np.max(np.abs(y)) < null_tol:
        return None
    best = None
    for code in alphabet:
        c = np.asarray(code, dtype=np.float64)
        cc = float(c @ c)
        if cc == 0.0:
            continue
        lam = float(y @ c) / cc
        if lam <= 0.0:
            continue
        resid = np.linalg.norm(y - lam * c) / np.linalg.norm(y)
        if resid < rel_tol and (best is None or resid < best[1]):
            best = (tuple(int(v) for v in code), resid)
    if best is None:
        raise NumericalDivergenceError(
            f"sampled output {y.tolist()} matches no stored code; with tied "
            f"inputs this usually means the competition was still unresolved "
            f"at mid-cycle (increase dt_psy)")
    return best[0]


def program_to_ann_params(gx_rows: Sequence[Sequence[int]],
                          gy_rows: Sequence[Sequence[int]],
                          alpha: float = 1.5, beta: float = 1.0,
                          tau: float = 1.0,
                          noise_amp: float = DEFAULT_NOISE_AMP) -> Ann0Params:
    """Load an association table into the synaptic matrices.

    Input rows become rows of gx (one neuron per stored association);
    output rows become the corresponding columns of gy.
    """
    gx = np.asarray(gx_rows, dtype=np.float64)
    gy = np.asarray(gy_rows, dtype=np.float64).T
    return Ann0Params(alpha=alpha, beta=beta, tau=tau, gx=gx, gy=gy,
                      noise_amp=noise_amp)


def drive_as_symbol_machine(params: Ann0Params, schedule: DriveSchedule,
                            inputs: Sequence[Sequence[int]], seed: int,
                            output_alphabet: Optional[Sequence[Sequence[int]]] = None,
                            record: bool = False):
    """Clocked run of the network as a combinatorial symbol machine.

    Per cycle: the input vector drives the network for the first half-cycle
    (x_inh = 0), the output is sampled at mid-cycle, then the inhibition
    pulse xinh0 wipes activity during the second half-cycle.  Residual
    activity at the end of a reset half-cycle raises ResetFailureError.

    Returns the list of decoded output symbols (None for a null output);
    with ``record=True`` also returns the full (t, u, r, q, y) trace.
    """
    tau = params.tau
    if schedule.dt_psy < 10.0 * tau:
        raise ConfigurationError(
            f"dt_psy={schedule.dt_psy} must be at least 10*tau = {10 * tau}")
    if schedule.dt_psy < 20.0 * tau:
        warnings.warn("dt_psy below 20*tau: residual-transient margin is thin",
                      stacklevel=2)
    dt = tau / 100.0 if schedule.dt is None else schedule.dt
    half_steps = max(1, int(round(schedule.dt_psy / 2.0 / dt)))
    dt = schedule.dt_psy / 2.0 / half_steps
    if output_alphabet is None:
        # unique gy columns act as the output code alphabet
        output_alphabet = [tuple(int(round(v)) for v in params.gy[:, i])
                           for i in range(params.n)]
        output_alphabet = list(dict.fromkeys(output_alphabet))
    currents = [synaptic_currents(x, params) for x in inputs]
    xinh0 = schedule.xinh0
    if xinh0 is None:
        peak = max((float(np.max(s)) for s in currents), default=0.0)
        xinh0 = 10.0 * max(peak, 1.0)
    reset_tol = 10.0 * params.noise_amp + 1e-12
    u = np.zeros(params.n, dtype=np.float64)
    rng = np.random.default_rng(seed)
    outputs = []
    trace = [] if record else None
    t = 0.0
    buf = np.empty((half_steps + 1, params.n), dtype=np.float64)
    for nu, s in enumerate(currents):
        phase_seed = int(rng.integers(0, 2**32))
        u = _rk4_record(u, s, 0.0, params.alpha, params.beta, tau, dt,
                        half_steps, params.noise_amp, phase_seed, buf)
        if record:
            _append_trace(trace, t, dt, buf, params, xinh_val=0.0)
        if not np.all(np.isfinite(u)):
            raise NumericalDivergenceError(f"divergence in cycle {nu}")
        r = np.maximum(u, 0.0)
        y = params.gy @ r
        outputs.append(classify_output(y, output_alphabet))
        t += half_steps * dt
        phase_seed = int(rng.integers(0, 2**32))
        zero_s = np.zeros(params.n, dtype=np.float64)
        u = _rk4_record(u, zero_s, xinh0, params.alpha, params.beta, tau, dt,
                        half_steps, params.noise_amp, phase_seed, buf)
        if record:
            _append_trace(trace, t, dt, buf, params, xinh_val=xinh0)
        t += half_steps * dt
        if np.any(u > reset_tol):
            raise ResetFailureError(
                f"activity survived the inhibition half-cycle of cycle {nu}; "
                f"xinh0={xinh0} too small")
    if record:
        return outputs, np.asarray(trace)
    return outputs


def _append_trace(trace, t0, dt, buf, params, xinh_val):
    # rows: t, u_1..u_n, r_1..r_n, q, y_1..y_k (skip the duplicate first row)
    for k in range(1, buf.shape[0]):
        u = buf[k]
        r = np.maximum(u, 0.0)
        q = params.beta * float(r.sum()) + xinh_val
        y = params.gy @ r
        trace.append([t0 + k * dt, *u.tolist(), *r.tolist(), q, *y.tolist()])
