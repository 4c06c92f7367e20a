"""Reference machine semantics and black-box equivalence testing.

Three machine classes: combinatorial (a memoryless alphabet map), its
probabilistic variant (a conditional output distribution per input, rational
probabilities), and Mealy finite-state machines.  A combinatorial machine
whose alphabets factor into external and feedback components becomes a Mealy
machine by closing the feedback loop with a one-cycle delay
(``wrap_delayed_feedback``).

Equivalence is tested behaviorally: two machines are equivalent when the
probe plan cannot distinguish them from their input/output behavior.
Deterministic probes are exhaustive (per input symbol, or all input
sequences to a depth); the probabilistic probe checks empirical output
frequencies against the reference distribution within k standard deviations.
All machine values are immutable after construction; simulation state lives
in separate steppers.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Hashable, Mapping, Optional, Sequence, Tuple

from .errors import ConfigurationError, RejectionError

Symbol = Hashable

_PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class CombinatorialMachine:
    """M = (X, Y, f) with f total on X; works as y_v = f(x_v)."""

    inputs: Tuple[Symbol, ...]
    outputs: Tuple[Symbol, ...]
    table: Mapping[Symbol, Symbol]

    def __post_init__(self):
        object.__setattr__(self, "table", dict(self.table))
        missing = [x for x in self.inputs if x not in self.table]
        if missing:
            raise ConfigurationError(f"output function undefined on: {missing}")
        bad = [x for x, y in self.table.items() if y not in set(self.outputs)]
        if bad:
            raise ConfigurationError(f"table maps outside output alphabet for: {bad}")

    def __call__(self, x: Symbol) -> Symbol:
        if x not in self.table:
            raise RejectionError(f"input not in alphabet: {x!r}")
        return self.table[x]


@dataclass(frozen=True)
class ProbabilisticCombinatorialMachine:
    """M = (X, Y, delta): P{y_v = b | x_v = a} = delta(a, b).

    ``delta`` maps each input to a dict of output -> Fraction; every row
    must sum to 1.
    """

    inputs: Tuple[Symbol, ...]
    outputs: Tuple[Symbol, ...]
    delta: Mapping[Symbol, Mapping[Symbol, Fraction]]

    def __post_init__(self):
        rows = {}
        for x in self.inputs:
            if x not in self.delta:
                raise ConfigurationError(f"delta row missing for input: {x!r}")
            row = {y: Fraction(p) for y, p in self.delta[x].items()}
            if any(p < 0 for p in row.values()):
                raise ConfigurationError(f"negative probability in row for {x!r}")
            total = sum(row.values())
            if abs(float(total) - 1.0) > _PROB_SUM_TOL:
                raise ConfigurationError(f"delta row for {x!r} sums to {total}, not 1")
            rows[x] = row
        object.__setattr__(self, "delta", rows)

    def prob(self, x: Symbol, y: Symbol) -> Fraction:
        return self.delta[x].get(y, Fraction(0))


@dataclass(frozen=True)
class MealyMachine:
    """M = (X, Y, S, omega, alpha_next, s0).

    s_{v+1} = alpha_next(x_v, s_v) and y_v = omega(x_v, s_v).  The next-state
    map is named ``alpha_next`` because plain alpha is taken by the network
    feedback gain elsewhere in the package.
    """

    inputs: Tuple[Symbol, ...]
    outputs: Tuple[Symbol, ...]
    states: Tuple[Symbol, ...]
    omega: Mapping[Tuple[Symbol, Symbol], Symbol]
    alpha_next: Mapping[Tuple[Symbol, Symbol], Symbol]
    s0: Symbol

    def __post_init__(self):
        object.__setattr__(self, "omega", dict(self.omega))
        object.__setattr__(self, "alpha_next", dict(self.alpha_next))
        if self.s0 not in set(self.states):
            raise ConfigurationError(f"initial state {self.s0!r} not in state set")
        for x in self.inputs:
            for s in self.states:
                if (x, s) not in self.omega or (x, s) not in self.alpha_next:
                    raise ConfigurationError(f"omega/alpha_next not total: missing ({x!r}, {s!r})")

    def run(self, xs: Sequence[Symbol]) -> Tuple[Symbol, ...]:
        s = self.s0
        out = []
        for x in xs:
            if (x, s) not in self.omega:
                raise RejectionError(f"input not in alphabet: {x!r}")
            out.append(self.omega[(x, s)])
            s = self.alpha_next[(x, s)]
        return tuple(out)


def run_combinatorial(machine: CombinatorialMachine,
                      xs: Sequence[Symbol]) -> Tuple[Symbol, ...]:
    """Pointwise application of the output function."""
    return tuple(machine(x) for x in xs)


def sample_probabilistic(machine: ProbabilisticCombinatorialMachine,
                         xs: Sequence[Symbol], seed: int) -> Tuple[Symbol, ...]:
    """Draw one output per cycle from delta(x_v, .); reproducible per seed."""
    rng = random.Random(seed)
    out = []
    for x in xs:
        if x not in machine.delta:
            raise RejectionError(f"input not in alphabet: {x!r}")
        row = machine.delta[x]
        ys = list(row.keys())
        weights = [float(row[y]) for y in ys]
        out.append(rng.choices(ys, weights=weights, k=1)[0])
    return tuple(out)


def wrap_delayed_feedback(machine: CombinatorialMachine, s0: Symbol) -> MealyMachine:
    """Close a one-cycle delayed feedback loop around a combinatorial machine.

    The machine's input symbols must be pairs (x_ext, s_fb) covering a full
    product set, and its outputs pairs (y_ext, s_fb').  The result is the
    Mealy machine with (y_v, s_{v+1}) = f(x_v, s_v), the fed-back component
    delayed exactly one cycle.
    """
    if not all(isinstance(x, tuple) and len(x) == 2 for x in machine.inputs):
        raise ConfigurationError("inputs do not factor into (external, feedback) pairs")
    if not all(isinstance(machine.table[x], tuple) and len(machine.table[x]) == 2
               for x in machine.inputs):
        raise ConfigurationError("outputs do not factor into (external, feedback) pairs")
    x_ext = tuple(dict.fromkeys(x for x, _ in machine.inputs))
    s_fb = tuple(dict.fromkeys(s for _, s in machine.inputs))
    if set(machine.inputs) != {(x, s) for x in x_ext for s in s_fb}:
        raise ConfigurationError("input alphabet is not a full external x feedback product")
    fb_out = {fb for _, fb in (machine.table[x] for x in machine.inputs)}
    if not fb_out <= set(s_fb):
        raise ConfigurationError(f"fed-back outputs leave the feedback alphabet: {fb_out - set(s_fb)}")
    if s0 not in set(s_fb):
        raise ConfigurationError(f"s0 {s0!r} not in feedback alphabet")
    omega = {}
    alpha_next = {}
    for x in x_ext:
        for s in s_fb:
            y, s_next = machine.table[(x, s)]
            omega[(x, s)] = y
            alpha_next[(x, s)] = s_next
    y_ext = tuple(dict.fromkeys(omega[(x, s)] for x in x_ext for s in s_fb))
    return MealyMachine(inputs=x_ext, outputs=y_ext, states=s_fb,
                        omega=omega, alpha_next=alpha_next, s0=s0)


# ---------------------------------------------------------------------------
# Black-box steppers and equivalence probes
# ---------------------------------------------------------------------------

class _CombinatorialStepper:
    def __init__(self, machine: CombinatorialMachine):
        self._m = machine

    def reset(self):
        pass

    def step(self, x):
        return self._m(x)


class _MealyStepper:
    def __init__(self, machine: MealyMachine):
        self._m = machine
        self._s = machine.s0

    def reset(self):
        self._s = self._m.s0

    def step(self, x):
        y = self._m.omega[(x, self._s)]
        self._s = self._m.alpha_next[(x, self._s)]
        return y


class _ProbabilisticStepper:
    def __init__(self, machine: ProbabilisticCombinatorialMachine, seed: int):
        self._m = machine
        self._rng = random.Random(seed)

    def reset(self):
        pass

    def step(self, x):
        row = self._m.delta[x]
        ys = list(row.keys())
        return self._rng.choices(ys, weights=[float(row[y]) for y in ys], k=1)[0]


def as_stepper(machine, seed: int = 0):
    """Adapt a machine value (or pass through an object with reset/step)."""
    if isinstance(machine, CombinatorialMachine):
        return _CombinatorialStepper(machine)
    if isinstance(machine, MealyMachine):
        return _MealyStepper(machine)
    if isinstance(machine, ProbabilisticCombinatorialMachine):
        return _ProbabilisticStepper(machine, seed)
    if hasattr(machine, "step") and hasattr(machine, "reset"):
        return machine
    raise ConfigurationError(f"cannot step object of type {type(machine).__name__}")


@dataclass(frozen=True)
class ExhaustiveProbe:
    """Compare outputs on every symbol of the shared input alphabet."""

    inputs: Optional[Tuple[Symbol, ...]] = None


@dataclass(frozen=True)
class DepthProbe:
    """Compare output sequences on all input sequences up to a depth."""

    depth: int
    inputs: Optional[Tuple[Symbol, ...]] = None


@dataclass(frozen=True)
class MonteCarloProbe:
    """Frequency-band check against a known rational distribution."""

    samples: int
    k_sigma: float = 3.0
    seed: int = 0
    inputs: Optional[Tuple[Symbol, ...]] = None


@dataclass(frozen=True)
class Equivalence:
    ok: bool
    witness: Any = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _probe_inputs(probe, m1, m2):
    if probe.inputs is not None:
        return tuple(probe.inputs)
    for m in (m1, m2):
        if hasattr(m, "inputs"):
            return tuple(m.inputs)
    raise ConfigurationError("probe needs an input alphabet and none was given")


def _check_alphabets(m1, m2):
    if hasattr(m1, "inputs") and hasattr(m2, "inputs"):
        if set(m1.inputs) != set(m2.inputs):
            raise ConfigurationError("input alphabets differ")


def equivalent(m1, m2, probe) -> Equivalence:
    """Black-box equivalence of two machines under a probe plan.

    Deterministic probes PASS iff every probed output matches, FAIL with
    the first distinguishing input (or input sequence).  The Monte Carlo
    probe requires at least one side to be a ProbabilisticCombinatorialMachine,
    which serves as the reference distribution; the other side is sampled
    and every empirical output frequency must lie within ``k_sigma``
    binomial standard deviations of the reference probability.
    """
    _check_alphabets(m1, m2)
    if isinstance(probe, ExhaustiveProbe):
        xs = _probe_inputs(probe, m1, m2)
        s1, s2 = as_stepper(m1), as_stepper(m2)
        for x in xs:
            s1.reset()
            s2.reset()
            y1, y2 = s1.step(x), s2.step(x)
            if y1 != y2:
                return Equivalence(False, witness=x, detail=f"{y1!r} != {y2!r}")
        return Equivalence(True)

    if isinstance(probe, DepthProbe):
        xs = _probe_inputs(probe, m1, m2)
        s1, s2 = as_stepper(m1), as_stepper(m2)
        for length in range(1, probe.depth + 1):
            for seq in itertools.product(xs, repeat=length):
                s1.reset()
                s2.reset()
                for i, x in enumerate(seq):
                    y1, y2 = s1.step(x), s2.step(x)
                    if y1 != y2:
                        return Equivalence(False, witness=seq[:i + 1],
                                           detail=f"cycle {i}: {y1!r} != {y2!r}")
        return Equivalence(True)

    if isinstance(probe, MonteCarloProbe):
        return _equivalent_monte_carlo(m1, m2, probe)

    raise ConfigurationError(f"unknown probe type: {type(probe).__name__}")


def _equivalent_monte_carlo(m1, m2, probe: MonteCarloProbe) -> Equivalence:
    ref, other = None, None
    if isinstance(m1, ProbabilisticCombinatorialMachine):
        ref, other = m1, m2
    elif isinstance(m2, ProbabilisticCombinatorialMachine):
        ref, other = m2, m1
    else:
        raise ConfigurationError("Monte Carlo probe needs a probabilistic reference machine")
    if isinstance(other, ProbabilisticCombinatorialMachine):
        # Both distributions known: compare the tables exactly.
        for x in ref.inputs:
            for y in set(ref.outputs) | set(other.outputs):
                if ref.prob(x, y) != other.prob(x, y):
                    return Equivalence(False, witness=(x, y),
                                       detail=f"{ref.prob(x, y)} != {other.prob(x, y)}")
        return Equivalence(True)

    xs = _probe_inputs(probe, ref, other)
    stepper = as_stepper(other, seed=probe.seed)
    n = probe.samples
    for x in xs:
        counts: Dict[Symbol, int] = {}
        for _ in range(n):
            y = stepper.step(x)
            counts[y] = counts.get(y, 0) + 1
        seen = set(counts) | set(ref.delta[x])
        for y in seen:
            p = float(ref.prob(x, y))
            freq = counts.get(y, 0) / n
            sigma = (p * (1.0 - p) / n) ** 0.5
            if abs(freq - p) > probe.k_sigma * sigma:
                return Equivalence(False, witness=(x, y),
                                   detail=f"freq {freq:.4f} vs p {p:.4f} "
                                          f"(band {probe.k_sigma}*{sigma:.4f})")
    return Equivalence(True)


# ---------------------------------------------------------------------------
# JSON machine schemas
# ---------------------------------------------------------------------------

def _freeze(obj):
    """JSON values -> hashable symbols (lists become tuples, recursively)."""
    if isinstance(obj, list):
        return tuple(_freeze(v) for v in obj)
    return obj


def _thaw(obj):
    if isinstance(obj, tuple):
        return [_thaw(v) for v in obj]
    return obj


def combinatorial_from_json(doc: Mapping) -> CombinatorialMachine:
    return CombinatorialMachine(
        inputs=tuple(_freeze(x) for x in doc["alphabet_x"]),
        outputs=tuple(_freeze(y) for y in doc["alphabet_y"]),
        table={_freeze(x): _freeze(y) for x, y in doc["table"]},
    )


def combinatorial_to_json(m: CombinatorialMachine) -> dict:
    return {
        "alphabet_x": [_thaw(x) for x in m.inputs],
        "alphabet_y": [_thaw(y) for y in m.outputs],
        "table": [[_thaw(x), _thaw(m.table[x])] for x in m.inputs],
    }


def probabilistic_from_json(doc: Mapping) -> ProbabilisticCombinatorialMachine:
    delta: Dict[Symbol, Dict[Symbol, Fraction]] = {}
    for x, y, num, den in doc["table"]:
        delta.setdefault(_freeze(x), {})[_freeze(y)] = Fraction(int(num), int(den))
    return ProbabilisticCombinatorialMachine(
        inputs=tuple(_freeze(x) for x in doc["alphabet_x"]),
        outputs=tuple(_freeze(y) for y in doc["alphabet_y"]),
        delta=delta,
    )


def probabilistic_to_json(m: ProbabilisticCombinatorialMachine) -> dict:
    rows = []
    for x in m.inputs:
        for y, p in m.delta[x].items():
            rows.append([_thaw(x), _thaw(y), p.numerator, p.denominator])
    return {
        "alphabet_x": [_thaw(x) for x in m.inputs],
        "alphabet_y": [_thaw(y) for y in m.outputs],
        "table": rows,
    }


def mealy_from_json(doc: Mapping) -> MealyMachine:
    omega = {}
    alpha_next = {}
    for x, s, y, s_next in doc["table"]:
        omega[(_freeze(x), _freeze(s))] = _freeze(y)
        alpha_next[(_freeze(x), _freeze(s))] = _freeze(s_next)
    return MealyMachine(
        inputs=tuple(_freeze(x) for x in doc["alphabet_x"]),
        outputs=tuple(_freeze(y) for y in doc["alphabet_y"]),
        states=tuple(_freeze(s) for s in doc["states"]),
        omega=omega, alpha_next=alpha_next, s0=_freeze(doc["s0"]),
    )


def mealy_to_json(m: MealyMachine) -> dict:
    return {
        "alphabet_x": [_thaw(x) for x in m.inputs],
        "alphabet_y": [_thaw(y) for y in m.outputs],
        "states": [_thaw(s) for s in m.states],
        "s0": _thaw(m.s0),
        "table": [[_thaw(x), _thaw(s), _thaw(m.omega[(x, s)]), _thaw(m.alpha_next[(x, s)])]
                  for x in m.inputs for s in m.states],
    }
