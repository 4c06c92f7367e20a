"""Primitive associative-field machines.

An associative field stores paired input/output rows (the program, or table
of associations) and runs a fixed per-cycle pipeline:

    DECODE   s[i]  = Similarity(x, gx[i])            over populated rows
    BIAS     se[i] = s[i] + a*e[i] + b*s[i]*e[i]     (only with E-states)
    CHOICE   win   drawn uniformly from the rows within EPS_SCORE of max(se)
    ENCODE   y     = gy[win] if s[win] > xinh else NULL
    E-STATE  e[i]  = s[i] if s[i] > e[i] else e[i]*(tau_e-1)/tau_e
    LEARN    append (x, y) at the write pointer when write-enabled

AF-0 is the variant without E-states (BIAS and the E-state update are
skipped); AF-1 carries a residual-excitation scalar per row, instantly
charged by a stronger match and discharged geometrically otherwise.

The E-state is a reconfiguration handle: a program holding every (x, y)
pair of a finite alphabet product can be switched into any combinatorial
machine over those alphabets by setting e=1 exactly on the rows of that
machine's graph (``reconfigure``).  Learning is tape-recording: raw pairs
are appended without preprocessing, optionally skipping exact duplicates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .codes import EPS_SCORE, Similarity, SymbolVector, max_set
from .errors import (ConfigurationError, CoverageError, DimensionMismatchError,
                     MemoryFullError, NoSelectionError)
from .machines import CombinatorialMachine

DEFAULT_CAPACITY = 65536


def bias_scores(s: Sequence[float], e: Sequence[float], a: float, b: float) -> np.ndarray:
    """se[i] = s[i] + a*e[i] + b*s[i]*e[i]."""
    s = np.asarray(s, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    if s.shape != e.shape:
        raise DimensionMismatchError(f"s has shape {s.shape}, e has shape {e.shape}")
    return s + a * e + b * s * e


def next_estate_values(s: Sequence[float], e: Sequence[float], tau_e: float) -> np.ndarray:
    """Instant charge where s[i] > e[i], geometric discharge elsewhere."""
    s = np.asarray(s, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    if s.shape != e.shape:
        raise DimensionMismatchError(f"s has shape {s.shape}, e has shape {e.shape}")
    return np.where(s > e, s, e * (tau_e - 1.0) / tau_e)


@dataclass
class EState:
    """Per-row residual excitation with its decay constant and bias gains."""

    e: np.ndarray = field(default_factory=lambda: np.zeros(0))
    tau_e: float = 100.0
    bias_add: float = 0.0
    bias_mul: float = 0.0

    def __post_init__(self):
        self.e = np.asarray(self.e, dtype=np.float64).copy()
        if self.tau_e <= 1.0:
            raise ConfigurationError(f"tau_e must exceed 1, got {self.tau_e}")
        if np.any(self.e < 0):
            raise ConfigurationError("E-state values must be non-negative")


@dataclass
class AfConfig:
    similarity: Similarity = Similarity.NONZERO_MATCH_RATIO
    xinh: float = 0.0
    seed: int = 0
    estates_enabled: bool = False
    # Step ENCODE guards on the raw similarity of the winner; set True to
    # guard on the biased score instead (alternative reading, off by default).
    guard_on_biased: bool = False

    def __post_init__(self):
        if self.xinh < 0:
            raise ConfigurationError(f"xinh must be non-negative, got {self.xinh}")


class AssociativeProgram:
    """Paired Input-LTM / Output-LTM rows plus the write pointer."""

    def __init__(self, rows: Optional[Sequence[Tuple[Sequence[int], Sequence[int]]]] = None,
                 capacity: int = DEFAULT_CAPACITY):
        self.capacity = capacity
        self.gx: List[SymbolVector] = []
        self.gy: List[SymbolVector] = []
        self._pairs = set()
        self._gx_mat: Optional[np.ndarray] = None
        if rows:
            for x, y in rows:
                self.append(x, y)

    @property
    def wptr(self) -> int:
        return len(self.gx)

    def __len__(self) -> int:
        return len(self.gx)

    def append(self, x: Sequence[int], y: Sequence[int]):
        if self.wptr >= self.capacity:
            raise MemoryFullError(f"program capacity {self.capacity} exhausted")
        x = tuple(int(v) for v in x)
        y = tuple(int(v) for v in y)
        if self.gx and len(x) != len(self.gx[0]):
            raise DimensionMismatchError("input row dimension changed")
        if self.gy and len(y) != len(self.gy[0]):
            raise DimensionMismatchError("output row dimension changed")
        self.gx.append(x)
        self.gy.append(y)
        self._pairs.add((x, y))
        self._gx_mat = None

    def contains_pair(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return (tuple(int(v) for v in x), tuple(int(v) for v in y)) in self._pairs

    def gx_matrix(self) -> np.ndarray:
        if self._gx_mat is None:
            self._gx_mat = np.asarray(self.gx, dtype=np.int64) if self.gx \
                else np.zeros((0, 0), dtype=np.int64)
        return self._gx_mat

    def to_json(self) -> dict:
        return {"rows": [{"x": list(x), "y": list(y)}
                         for x, y in zip(self.gx, self.gy)],
                "capacity": self.capacity}

    @classmethod
    def from_json(cls, doc: dict) -> "AssociativeProgram":
        prog = cls(capacity=doc.get("capacity", DEFAULT_CAPACITY))
        for row in doc["rows"]:
            prog.append(row["x"], row["y"])
        return prog


def decode(x: Sequence[int], prog: AssociativeProgram,
           fn: Similarity = Similarity.NONZERO_MATCH_RATIO) -> np.ndarray:
    """Similarity of x against every populated Input-LTM row, vectorized.

    Matches codes.similarity exactly (the scalar definition is the oracle
    in the test suite).
    """
    if len(prog) == 0:
        return np.zeros(0)
    gx = prog.gx_matrix()
    x_arr = np.asarray(x, dtype=np.int64)
    if x_arr.shape != (gx.shape[1],):
        raise DimensionMismatchError(
            f"input has dimension {x_arr.shape}, program rows have {gx.shape[1]}")
    if fn is Similarity.SCALAR_PRODUCT:
        return (gx.astype(np.float64) @ x_arr.astype(np.float64))
    nz = x_arr != 0
    k = int(nz.sum())
    if k == 0:
        return np.zeros(len(prog))
    matches = (gx[:, nz] == x_arr[nz]).sum(axis=1)
    return matches / k


@dataclass
class CycleTrace:
    cycle: int
    x: SymbolVector
    win: Optional[int]
    s_win: float
    se_win: float
    y: Optional[SymbolVector]


class AssociativeField:
    """A running AF-0/AF-1 instance: program + E-state + seeded choice stream."""

    def __init__(self, config: AfConfig,
                 prog: Optional[AssociativeProgram] = None,
                 estate: Optional[EState] = None):
        self.config = config
        self.prog = prog if prog is not None else AssociativeProgram()
        if config.estates_enabled:
            self.estate = estate if estate is not None else EState()
            self._sync_estate()
        else:
            if estate is not None:
                raise ConfigurationError("estate supplied but estates_enabled is False")
            self.estate = None
        self.rng = random.Random(config.seed)
        self.cycle_count = 0
        self.last: Optional[CycleTrace] = None

    def _sync_estate(self):
        want = len(self.prog)
        have = len(self.estate.e)
        if have < want:
            self.estate.e = np.concatenate([self.estate.e, np.zeros(want - have)])
        elif have > want:
            raise ConfigurationError(
                f"E-state has {have} entries for a {want}-row program")

    def decode(self, x: Sequence[int]) -> np.ndarray:
        return decode(x, self.prog, self.config.similarity)

    def bias(self, s: np.ndarray) -> np.ndarray:
        if self.estate is None:
            return np.asarray(s, dtype=np.float64)
        return bias_scores(s, self.estate.e, self.estate.bias_add, self.estate.bias_mul)

    def choose(self, se: Sequence[float]) -> int:
        candidates = max_set(se, EPS_SCORE)
        if not candidates:
            raise NoSelectionError("cannot choose a winner from an empty score array")
        return self.rng.choice(candidates)

    def encode(self, win: int, s: np.ndarray,
               se: Optional[np.ndarray] = None) -> Optional[SymbolVector]:
        guard = s[win]
        if self.config.guard_on_biased and se is not None:
            guard = se[win]
        if guard > self.config.xinh:
            return self.prog.gy[win]
        return None

    def next_estate(self, s: np.ndarray):
        if self.estate is None:
            return
        self.estate.e = next_estate_values(s, self.estate.e, self.estate.tau_e)

    def learn(self, x: Sequence[int], y: Sequence[int],
              wen: bool = True, dedup: bool = False):
        if not wen:
            return
        if dedup and self.prog.contains_pair(x, y):
            return
        self.prog.append(x, y)
        if self.estate is not None:
            self._sync_estate()

    def cycle(self, x: Sequence[int], wen: bool = False,
              forced_y: Optional[Sequence[int]] = None,
              dedup: bool = False) -> Optional[SymbolVector]:
        """One full machine cycle; returns the output vector or None (NULL).

        ``forced_y`` overrides the output (teacher clamping the motor
        centers); the forced value is what gets recorded when ``wen``.
        """
        x = tuple(int(v) for v in x)
        s = self.decode(x)
        win = None
        y = None
        s_win = float("nan")
        se_win = float("nan")
        if len(s) > 0:
            se = self.bias(s)
            win = self.choose(se)
            y = self.encode(win, s, se)
            s_win = float(s[win])
            se_win = float(se[win])
        if forced_y is not None:
            y = tuple(int(v) for v in forced_y)
        if self.estate is not None and len(s) > 0:
            self.next_estate(s)
        if wen and y is not None:
            self.learn(x, y, wen=True, dedup=dedup)
        self.last = CycleTrace(self.cycle_count, x, win, s_win, se_win,
                               tuple(y) if y is not None else None)
        self.cycle_count += 1
        return tuple(y) if y is not None else None

    def reset_dynamic_state(self):
        """Clear E-states and the cycle counter; the program persists."""
        if self.estate is not None:
            self.estate.e = np.zeros(len(self.prog))
        self.cycle_count = 0
        self.last = None


def reconfigure(prog: AssociativeProgram, machine: CombinatorialMachine,
                tau_e: float = 1e6, bias_add: float = 0.0,
                bias_mul: float = 1.0) -> EState:
    """E-state that turns a full product-table program into ``machine``.

    Requires the program to contain every pair of machine.inputs x
    machine.outputs at least once; rows on the machine's graph get e=1,
    all others e=0.  With the default gains (a=0, b=1) and ratio
    similarity over a correctly-decoding code set, a biased exact match
    scores 2 while every other row stays strictly below 2, so a single
    exhaustive sweep reproduces the machine's table.
    """
    missing = [(x, y) for x, y in product(machine.inputs, machine.outputs)
               if not prog.contains_pair(x, y)]
    if missing:
        raise CoverageError(missing)
    e = np.array([1.0 if machine.table.get(gx_i) == gy_i else 0.0
                  for gx_i, gy_i in zip(prog.gx, prog.gy)])
    return EState(e=e, tau_e=tau_e, bias_add=bias_add, bias_mul=bias_mul)


class AfFsm:
    """Mealy-machine view of an associative field via one-cycle delayed feedback.

    The field's input vector is join(x_ext, fb) and its output splits into
    (y_ext, fb_next); fb is fed back with a one-cycle delay, starting from
    fb0.  A NULL field output yields a None external output and leaves the
    feedback unchanged.
    """

    def __init__(self, af: AssociativeField, fb0: Sequence[int],
                 fb_width: Optional[int] = None):
        self.af = af
        self.fb0 = tuple(int(v) for v in fb0)
        self.fb_width = len(self.fb0) if fb_width is None else fb_width
        self._fb = self.fb0

    def reset(self):
        self._fb = self.fb0
        self.af.reset_dynamic_state()

    def step(self, x_ext: Sequence[int]):
        x = tuple(int(v) for v in x_ext) + self._fb
        y = self.af.cycle(x)
        if y is None:
            return None
        y_ext, fb = y[:-self.fb_width], y[-self.fb_width:]
        self._fb = fb
        return y_ext


def make_fsm(af: AssociativeField, fb0: Sequence[int],
             fb_width: Optional[int] = None) -> AfFsm:
    return AfFsm(af, fb0, fb_width)


class AfCombinatorialStepper:
    """Black-box stepper adapter for equivalence probes."""

    def __init__(self, af: AssociativeField,
                 inputs: Optional[Sequence[SymbolVector]] = None):
        self.af = af
        if inputs is not None:
            self.inputs = tuple(tuple(x) for x in inputs)

    def reset(self):
        self.af.reset_dynamic_state()

    def step(self, x):
        return self.af.cycle(x)
