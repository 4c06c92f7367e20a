"""Ensembles of identical protein-molecule machines sharing one input.

An ensemble is described by its occupation numbers N_i (molecules per
state).  Its output is the occupation-weighted sum of the single-molecule
outputs, y = sum_i N_i * omega(x, s_i).  Occupations are binomial around
N*P_i, so relative occupations carry a standard deviation
sqrt(P_i (1 - P_i) / N) and converge to the mean-field trajectory (the
master equation applied to relative occupations) as 1/sqrt(N).

Stochastic stepping is tau-leap style: for each source state the number of
molecules taking each outgoing transition during dt is binomially sampled
with per-molecule probability rate*dt.  A step that would drive an
occupation negative is rejected and retried at half the step, up to 20
halvings.  An exact per-molecule mode is available for small ensembles.

``CoupledSim`` couples several ensembles electrically through a common
membrane potential (capacitor + leak + stimulus current, with ensemble GHK
currents) and optionally chemically, feeding a first-order low-passed copy
of one ensemble's output into another ensemble's input vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigurationError, NumericalDivergenceError, StepSizeError
from .pmm import ChannelParams, PmmSpec, master_step

_MAX_RATE_DT = 0.1
_MAX_HALVINGS = 20


@dataclass
class Ensemble:
    spec: PmmSpec
    occupations: np.ndarray

    def __post_init__(self):
        self.occupations = np.asarray(self.occupations, dtype=np.int64).copy()
        if self.occupations.shape != (self.spec.n_states,):
            raise ConfigurationError(
                f"occupations shape {self.occupations.shape} does not match "
                f"{self.spec.n_states} states")
        if np.any(self.occupations < 0):
            raise ConfigurationError("occupations must be non-negative")

    @property
    def N(self) -> int:
        return int(self.occupations.sum())

    @property
    def relative(self) -> np.ndarray:
        return self.occupations / self.N


def _leap_once(occ: np.ndarray, A: np.ndarray, dt: float,
               rng: np.random.Generator) -> Optional[np.ndarray]:
    """One binomial tau-leap attempt; None if any occupation went negative."""
    n = occ.shape[0]
    delta = np.zeros(n, dtype=np.int64)
    for frm in range(n):
        if occ[frm] == 0:
            continue
        out = 0
        for to in range(n):
            rate = A[to, frm]
            if to == frm or rate <= 0.0:
                continue
            jumps = int(rng.binomial(occ[frm], min(rate * dt, 1.0)))
            delta[to] += jumps
            out += jumps
        if out > occ[frm]:
            return None
        delta[frm] -= out
    return occ + delta


def _leap(occ: np.ndarray, A: np.ndarray, dt: float,
          rng: np.random.Generator, depth: int = 0) -> np.ndarray:
    result = _leap_once(occ, A, dt, rng)
    if result is not None:
        return result
    if depth >= _MAX_HALVINGS:
        raise StepSizeError(f"step still produced negative occupancy after "
                            f"{_MAX_HALVINGS} halvings")
    half = _leap(occ, A, dt / 2.0, rng, depth + 1)
    return _leap(half, A, dt / 2.0, rng, depth + 1)


def ensemble_step(ens: Ensemble, x, dt: float,
                  rng: np.random.Generator) -> Ensemble:
    """Advance the whole ensemble by dt at fixed input (tau-leap binomial)."""
    A = ens.spec.rate_matrix(x)
    if dt * float(A.sum(axis=0).max()) > _MAX_RATE_DT:
        raise StepSizeError(
            f"dt*max_total_rate = {dt * A.sum(axis=0).max():.3g} exceeds {_MAX_RATE_DT}")
    occ = _leap(ens.occupations, A, dt, rng)
    return Ensemble(spec=ens.spec, occupations=occ)


def ensemble_step_exact(ens: Ensemble, x, dt: float,
                        rng: np.random.Generator) -> Ensemble:
    """Per-molecule exact CTMC stepping; intended for N <= 1000."""
    if ens.N > 1000:
        raise ConfigurationError("exact mode is limited to N <= 1000")
    A = ens.spec.rate_matrix(x)
    n = ens.spec.n_states
    new_occ = np.zeros(n, dtype=np.int64)
    for s0 in range(n):
        for _ in range(int(ens.occupations[s0])):
            t, s = 0.0, s0
            while True:
                rates = A[:, s]
                total = float(rates.sum())
                if total <= 0.0:
                    break
                dwell = rng.exponential(1.0 / total)
                if t + dwell >= dt:
                    break
                t += dwell
                s = int(rng.choice(n, p=rates / total))
            new_occ[s] += 1
    return Ensemble(spec=ens.spec, occupations=new_occ)


def meanfield_step(e_bar: Sequence[float], x, spec: PmmSpec, dt: float) -> np.ndarray:
    """The relative-occupation average obeys the master equation."""
    return master_step(e_bar, x, spec, dt)


def ensemble_output(ens: Ensemble, x) -> float:
    return float(sum(int(n_i) * ens.spec.output_fn(x, i)
                     for i, n_i in enumerate(ens.occupations)))


def meanfield_output(e_bar: Sequence[float], x, spec: PmmSpec, N: int) -> float:
    return float(N * sum(e * spec.output_fn(x, i) for i, e in enumerate(e_bar)))


@dataclass(frozen=True)
class OccupancyStats:
    mean: float
    sigma_abs: float
    sigma_rel: float


def occupancy_stats(p: float, N: int) -> OccupancyStats:
    """Binomial mean N*p, sd sqrt(N p (1-p)), relative sd sqrt(p(1-p)/N)."""
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"probability {p} outside [0, 1]")
    if N < 1:
        raise ConfigurationError(f"N must be >= 1, got {N}")
    var = p * (1.0 - p)
    return OccupancyStats(mean=N * p, sigma_abs=math.sqrt(N * var),
                          sigma_rel=math.sqrt(var / N))


# ---------------------------------------------------------------------------
# Coupled two-ensemble membrane dynamics
# ---------------------------------------------------------------------------

def pulse_current(pulses: Sequence[Tuple[float, float, float]]) -> Callable[[float], float]:
    """Stimulus from (t_on, t_off, amplitude) pulse segments."""
    def i_stim(t: float) -> float:
        return sum(amp for on, off, amp in pulses if on <= t < off)
    return i_stim


@dataclass
class MembraneModel:
    """C_m dV/dt = -(sum of ensemble currents) - g_leak (V - e_leak) + I_stim."""

    c_m: float
    g_leak: float
    e_leak: float
    i_stim: Callable[[float], float] = field(default=lambda t: 0.0)

    def __post_init__(self):
        if self.c_m <= 0:
            raise ConfigurationError(f"capacitance must be positive, got {self.c_m}")


@dataclass
class MessengerLink:
    """source ensemble output -> first-order low-pass -> target input component.

    dc/dt = (gain * y_source - c) / tau; the target ensemble's input vector
    is (V, c) instead of (V,).
    """

    source: int
    target: int
    gain: float
    tau: float
    c: float = 0.0


class CoupledSim:
    """Operator-split stepper: ensembles advance at fixed V, then V advances.

    Trace rows are [t, V, occupations of each ensemble..., currents...].

    Ensembles see the input (V,) (or (V, messenger) when chemically driven);
    their GHK-flavored outputs are summed into the membrane current balance.
    """

    def __init__(self, membrane: MembraneModel,
                 ensembles: Sequence[Ensemble], v0: float, seed: int,
                 links: Sequence[MessengerLink] = (), exact: bool = False):
        self.membrane = membrane
        self.ensembles = list(ensembles)
        self.v = float(v0)
        self.t = 0.0
        self.links = list(links)
        self.exact = exact
        self.rng = np.random.default_rng(seed)
        self._link_by_target = {ln.target: ln for ln in self.links}
        if len(self._link_by_target) < len(self.links):
            raise ConfigurationError("at most one messenger link per target ensemble")

    def _input_for(self, idx: int):
        link = self._link_by_target.get(idx)
        if link is None:
            return (self.v,)
        return (self.v, link.c)

    def step(self, dt: float):
        step_fn = ensemble_step_exact if self.exact else ensemble_step
        xs = [self._input_for(i) for i in range(len(self.ensembles))]
        self.ensembles = [step_fn(ens, x, dt, self.rng)
                          for ens, x in zip(self.ensembles, xs)]
        currents = [ensemble_output(ens, x)
                    for ens, x in zip(self.ensembles, xs)]
        for link in self.links:
            y_src = currents[link.source]
            link.c += dt * (link.gain * y_src - link.c) / link.tau
        m = self.membrane
        dv = (-(sum(currents)) - m.g_leak * (self.v - m.e_leak)
              + m.i_stim(self.t)) * (dt / m.c_m)
        self.v += dv
        self.t += dt
        if not math.isfinite(self.v):
            raise NumericalDivergenceError("membrane potential diverged")
        return currents

    def run(self, t_end: float, dt: float, record_every: int = 1):
        """Advance to t_end; returns rows [t, V, occupations..., currents...]."""
        rows = []
        k = 0
        while self.t < t_end - 1e-12:
            currents = self.step(dt)
            k += 1
            if k % record_every == 0:
                row = [self.t, self.v]
                for ens in self.ensembles:
                    row.extend(int(v) for v in ens.occupations)
                row.extend(currents)
                rows.append(row)
        return np.asarray(rows)

# ---------------------------------------------------------------------------
# Shipped spike demo (all numbers are implementation-chosen, not sourced)
# ---------------------------------------------------------------------------

SPIKE_DEMO_V0 = -0.070
SPIKE_DEMO_DT = 2e-5


def spike_demo_sim(stimulus_scale: float = 1.0, seed: int = 0) -> CoupledSim:
    """Na-like + K-like five-state channel ensembles on one membrane.

    A 5 ms current pulse starting at t = 5 ms; at full scale it triggers a
    regenerative depolarization (Na conducting-state surge, then
    accumulation in the Na inactive state) followed by recovery, while a
    tenth of the amplitude stays subthreshold.
    """
    from .pmm import (ChannelParams, SigmoidRate, channel5_permeabilities,
                      channel5_spec, channel_output_fn)
    na_par = ChannelParams(permeabilities=channel5_permeabilities("na", 2e-6),
                           z=1, T=300.0, C_in=0.014, C_out=0.140)
    k_par = ChannelParams(permeabilities=channel5_permeabilities("k", 2e-6),
                          z=1, T=300.0, C_in=0.140, C_out=0.005)
    na_spec = channel5_spec(
        SigmoidRate(1500.0, -0.020, 0.003),
        SigmoidRate(1500.0, -0.050, 0.006),
        SigmoidRate(1500.0, -0.050, 0.006),
        300.0, 25.0, output_fn=channel_output_fn(na_par))
    k_spec = channel5_spec(
        SigmoidRate(250.0, -0.025, 0.006),
        SigmoidRate(250.0, -0.040, 0.008),
        SigmoidRate(250.0, -0.040, 0.008),
        60.0, 150.0, output_fn=channel_output_fn(k_par))
    membrane = MembraneModel(
        c_m=0.2, g_leak=50.0, e_leak=SPIKE_DEMO_V0,
        i_stim=pulse_current([(0.005, 0.010, 4.0 * stimulus_scale)]))
    return CoupledSim(
        membrane,
        [Ensemble(na_spec, np.array([1000, 0, 0, 0, 0])),
         Ensemble(k_spec, np.array([400, 0, 0, 0, 0]))],
        v0=SPIKE_DEMO_V0, seed=seed)
