"""Single protein-molecule machine: a continuous-time Markov chain whose
transition-rate densities depend on an input vector of generalized
potentials, and whose per-state output is a vector of generalized currents.

State probabilities evolve by the master equation

    dP_i/dt = sum_{j != i} rate(x, j -> i) P_j  -  P_i sum_{j != i} rate(x, i -> j)

which conserves sum(P) exactly.  Individual stochastic realizations are
sampled exactly: dwell times are exponential with the total exit rate, the
successor is drawn proportionally to the individual rates, and
piecewise-constant input switches truncate dwells with a memoryless restart.

The bundled example is a five-state voltage-gated channel: a forward ring
0 -> 1 -> 2 -> 3 -> 4 -> 0 whose first three links are sigmoid functions of
membrane potential and last two are constants.  Its output is the
Goldman-Hodgkin-Katz current for the permeability of the current state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigurationError, StepSizeError

FARADAY = 9.6484e4        # [C/mol]
GAS_CONSTANT = 8.3144     # [J/(K*mol)]

_MAX_RATE_DT = 0.1
_NEG_P_TOL = -1e-12
# below this |z*V'| the GHK ratio switches to its series expansion
_GHK_SERIES_CUT = 1e-6


@dataclass(frozen=True)
class PmmSpec:
    """n_states, rate_fn(x, from_state, to_state) -> rate density >= 0,
    output_fn(x, state) -> generalized current."""

    n_states: int
    rate_fn: Callable[[Sequence[float], int, int], float]
    output_fn: Callable[[Sequence[float], int], float]

    def rate_matrix(self, x) -> np.ndarray:
        """A[i, j] = rate density of j -> i; diagonal zero."""
        n = self.n_states
        A = np.zeros((n, n))
        for j in range(n):
            for i in range(n):
                if i == j:
                    continue
                r = float(self.rate_fn(x, j, i))
                if r < 0:
                    raise ConfigurationError(
                        f"negative rate {r} for transition {j}->{i} at x={x}")
                A[i, j] = r
        return A

    def generator(self, x) -> np.ndarray:
        """G with dP/dt = G @ P; columns sum to zero."""
        A = self.rate_matrix(x)
        return A - np.diag(A.sum(axis=0))

    def max_total_exit_rate(self, x) -> float:
        return float(self.rate_matrix(x).sum(axis=0).max())


def master_step(P: Sequence[float], x, spec: PmmSpec, dt: float) -> np.ndarray:
    """One RK4 step of the master equation at fixed input."""
    P = np.asarray(P, dtype=np.float64)
    G = spec.generator(x)
    max_rate = float((-np.diag(G)).max()) if spec.n_states else 0.0
    if dt * max_rate > _MAX_RATE_DT:
        raise StepSizeError(
            f"dt*max_total_rate = {dt * max_rate:.3g} exceeds {_MAX_RATE_DT}")
    k1 = G @ P
    k2 = G @ (P + 0.5 * dt * k1)
    k3 = G @ (P + 0.5 * dt * k2)
    k4 = G @ (P + dt * k3)
    P_next = P + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if P_next.min() < _NEG_P_TOL:
        raise StepSizeError(
            f"probability went negative ({P_next.min():.3g}); reduce dt")
    return P_next


def conservation_residual(P: Sequence[float]) -> float:
    return abs(float(np.sum(P)) - 1.0)


def sample_path(spec: PmmSpec, x_of_t: Sequence[Tuple[float, Sequence[float]]],
                s0: int, t_end: float, seed: int) -> List[Tuple[float, int]]:
    """Exact continuous-time path under a piecewise-constant input signal.

    ``x_of_t`` is a list of (t_start, x) segments, first t_start 0, sorted.
    Returns the transition list [(time, state), ...] starting with (0, s0);
    an all-zero exit rate makes the state absorbing for that segment.
    """
    if not x_of_t or x_of_t[0][0] != 0.0:
        raise ConfigurationError("input signal must start at t=0")
    starts = [t for t, _ in x_of_t]
    if any(b <= a for a, b in zip(starts, starts[1:])):
        raise ConfigurationError("input segments must be strictly increasing")
    rng = np.random.default_rng(seed)
    events: List[Tuple[float, int]] = [(0.0, s0)]
    t, s = 0.0, s0
    for seg_idx, (seg_start, x) in enumerate(x_of_t):
        seg_end = x_of_t[seg_idx + 1][0] if seg_idx + 1 < len(x_of_t) else t_end
        seg_end = min(seg_end, t_end)
        if t >= seg_end:
            continue
        A = spec.rate_matrix(x)
        while t < seg_end:
            rates = A[:, s]
            total = float(rates.sum())
            if total <= 0.0:
                t = seg_end  # absorbing under this input
                break
            dwell = rng.exponential(1.0 / total)
            if t + dwell >= seg_end:
                t = seg_end  # dwell truncated; exponential is memoryless
                break
            t += dwell
            s = int(rng.choice(spec.n_states, p=rates / total))
            events.append((t, s))
        if t >= t_end:
            break
    return events


def state_at(events: Sequence[Tuple[float, int]], t: float) -> int:
    s = events[0][1]
    for et, es in events:
        if et <= t:
            s = es
        else:
            break
    return s


# ---------------------------------------------------------------------------
# Goldman-Hodgkin-Katz output
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelParams:
    """Per-state permeabilities and the ion/bath constants of the GHK current."""

    permeabilities: Tuple[float, ...]
    z: int = 1
    T: float = 300.0
    C_in: float = 0.14
    C_out: float = 0.005

    def __post_init__(self):
        if self.T <= 0:
            raise ConfigurationError(f"temperature must be positive, got {self.T}")
        if self.C_in <= 0 or self.C_out <= 0:
            raise ConfigurationError("ion concentrations must be positive")


def ghk_current(V: float, state: int, params: ChannelParams) -> float:
    """I = p z^2 F V' (C_in - C_out e^{-zV'}) / (1 - e^{-zV'}), V' = VF/RT.

    The removable singularity at V=0 is evaluated by the series
    p z F [(C_in - C_out) + w (C_in + C_out)/2 + w^2 (C_in - C_out)/12]
    with w = zV', used below |w| = 1e-6.
    """
    p = params.permeabilities[state]
    z = params.z
    w = z * V * FARADAY / (GAS_CONSTANT * params.T)
    pre = p * z * FARADAY
    if abs(w) < _GHK_SERIES_CUT:
        ci, co = params.C_in, params.C_out
        return pre * ((ci - co) + w * (ci + co) / 2.0 + w * w * (ci - co) / 12.0)
    return pre * w * (params.C_in - params.C_out * math.exp(-w)) / (-math.expm1(-w))


def nernst_potential(params: ChannelParams) -> float:
    """Reversal potential: the zero of the GHK current."""
    return (GAS_CONSTANT * params.T / (params.z * FARADAY)) * math.log(
        params.C_out / params.C_in)


def channel_output_fn(params: ChannelParams) -> Callable[[Sequence[float], int], float]:
    """omega(x, s) reading the membrane potential from x[0]."""
    def omega(x, s):
        return ghk_current(x[0], s, params)
    return omega


# ---------------------------------------------------------------------------
# Five-state voltage-gated channel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmoidRate:
    """rate(V) = amplitude / (1 + exp(-(V - v_mid)/v_slope))."""

    amplitude: float
    v_mid: float
    v_slope: float

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ConfigurationError(f"sigmoid amplitude must be positive, got {self.amplitude}")
        if self.v_slope <= 0:
            raise ConfigurationError(f"sigmoid slope must be positive, got {self.v_slope}")

    def __call__(self, V: float) -> float:
        t = -(V - self.v_mid) / self.v_slope
        if t > 700.0:  # exp would overflow; the sigmoid is fully closed
            return 0.0
        return self.amplitude / (1.0 + math.exp(t))


def channel5_spec(a10: SigmoidRate, a21: SigmoidRate, a32: SigmoidRate,
                  a43: float, a04: float,
                  output_fn: Optional[Callable] = None,
                  extra_rates: Optional[Dict[Tuple[int, int], Callable[[float], float]]] = None,
                  ) -> PmmSpec:
    """Forward ring 0->1->2->3->4->0 over x = (V,).

    The three voltage-sigmoid links feed the chain, the two constant links
    close it; any other transition is zero unless listed in ``extra_rates``
    as {(from, to): rate(V)}.
    """
    if a43 < 0 or a04 < 0:
        raise ConfigurationError("constant rates must be non-negative")
    ring: Dict[Tuple[int, int], Callable[[float], float]] = {
        (0, 1): a10, (1, 2): a21, (2, 3): a32,
        (3, 4): lambda V: a43, (4, 0): lambda V: a04,
    }
    if extra_rates:
        for key, fn in extra_rates.items():
            if key in ring:
                raise ConfigurationError(f"extra rate duplicates ring link {key}")
            ring[key] = fn
    if output_fn is None:
        def output_fn(x, s):
            return 0.0

    def rate_fn(x, frm, to):
        fn = ring.get((frm, to))
        return fn(x[0]) if fn is not None else 0.0

    return PmmSpec(n_states=5, rate_fn=rate_fn, output_fn=output_fn)


def channel5_permeabilities(variant: str, p_high: float) -> Tuple[float, ...]:
    """'na': state 3 conducts, state 4 is inactive; 'k': states 3 and 4 conduct."""
    if variant == "na":
        return (0.0, 0.0, 0.0, p_high, 0.0)
    if variant == "k":
        return (0.0, 0.0, 0.0, p_high, p_high)
    raise ConfigurationError(f"unknown channel variant {variant!r}")


# ---------------------------------------------------------------------------
# Declarative spec files
# ---------------------------------------------------------------------------

def pmm_spec_from_json(doc: dict) -> PmmSpec:
    """Build a PmmSpec from its JSON description.

    Rate entries: {"from": j, "to": i, "kind": "sigmoid"|"const", "params"}.
    Sigmoids read the first input component; omega is either a GHK binding
    {"kind": "ghk", "channel": {...}}, a per-state table
    {"kind": "table", "values": [...]}, or {"kind": "zero"}.
    """
    n = int(doc["states"])
    table: Dict[Tuple[int, int], Callable] = {}
    for entry in doc.get("rates", []):
        frm, to = int(entry["from"]), int(entry["to"])
        if not (0 <= frm < n and 0 <= to < n) or frm == to:
            raise ConfigurationError(f"bad rate entry {entry}")
        if (frm, to) in table:
            raise ConfigurationError(f"duplicate rate entry for {frm}->{to}")
        kind = entry["kind"]
        params = entry.get("params", {})
        if kind == "sigmoid":
            table[(frm, to)] = SigmoidRate(
                amplitude=float(params["amplitude"]),
                v_mid=float(params["v_mid"]),
                v_slope=float(params["v_slope"]))
        elif kind == "const":
            rate = float(params["rate"])
            if rate < 0:
                raise ConfigurationError(f"negative constant rate in {entry}")
            table[(frm, to)] = lambda V, _r=rate: _r
        else:
            raise ConfigurationError(f"unknown rate kind {kind!r}")

    omega_doc = doc.get("omega", {"kind": "zero"})
    if omega_doc["kind"] == "ghk":
        ch = omega_doc["channel"]
        params = ChannelParams(permeabilities=tuple(ch["permeabilities"]),
                               z=int(ch.get("z", 1)), T=float(ch.get("T", 300.0)),
                               C_in=float(ch["C_in"]), C_out=float(ch["C_out"]))
        if len(params.permeabilities) != n:
            raise ConfigurationError("permeability list length != state count")
        output_fn = channel_output_fn(params)
    elif omega_doc["kind"] == "table":
        values = [float(v) for v in omega_doc["values"]]
        if len(values) != n:
            raise ConfigurationError("omega table length != state count")
        def output_fn(x, s, _vals=tuple(values)):
            return _vals[s]
    elif omega_doc["kind"] == "zero":
        def output_fn(x, s):
            return 0.0
    else:
        raise ConfigurationError(f"unknown omega kind {omega_doc['kind']!r}")

    def rate_fn(x, frm, to):
        fn = table.get((frm, to))
        return fn(x[0]) if fn is not None else 0.0

    return PmmSpec(n_states=n, rate_fn=rate_fn, output_fn=output_fn)
