"""Tape robot: demonstration learning of a parenthesis-checking algorithm.

The system couples a tape world W (cells plus a shared eye/hand position),
a device block D (one-cycle utterance buffer), and a brain B made of two
associative fields:

    AM  learns (Sensory, previous Motor) -> Motor    (motor control)
    AS  learns (Motor, Sensory) -> next Sensory      (mental imagery)

Controller state is carried entirely by the utter channel: whatever the
robot utters comes back one cycle later as the proprioceptive
``uttered_feedback``, so a memoryless association table plus this delayed
loop is a finite-state machine.

The built-in teacher performs a parenthesis check: scan right to the first
')', star it, scan left to the nearest '(', star it, repeat; when the right
boundary is reached with nothing left to match, sweep left - any surviving
'(' means the verdict is N, reaching the left boundary means Y.  The
verdict symbol is written into the final scanned square and uttered by the
halting command.

Training forces the teacher's command as the motor output while AM and AS
tape-record their association streams (deduplicated).  A real examination
lets AM drive the motor loop against the real tape.  A mental examination
runs the same motor loop against an imagined tape: the robot keeps a
mental copy of the tape image (its imaginary memory aid, initialized from
the given image and updated only by its own commands), and AS must account
for every imagined transition - if the current (command, sensory) pair was
never experienced, or the imagined outcome was never experienced for it,
the examination fails with an imagery gap.  The real tape is never read.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .afield import AfConfig, AssociativeField, AssociativeProgram, EState
from .codes import Similarity, SymbolVector
from .errors import (ConfigurationError, ImageryGapError, NonConvergenceError,
                     StuckError, TeacherFault)

# Tape alphabet; '.' is the blank, '#' the visible boundary marker.
LPAR, RPAR, STAR, BLANK, YES, NO, BOUND = "(", ")", "*", ".", "Y", "N", "#"
TAPE_SYMBOLS = (LPAR, RPAR, STAR, BLANK, YES, NO, BOUND)
WRITE_DOMAIN = (None, LPAR, RPAR, STAR, BLANK, YES, NO)
MOVE_DOMAIN = (None, "L", "R", "S")
UTTER_DOMAIN = (None, "R", "L", "C", "Y", "N")
HALT_DOMAIN = (False, True)

TEACHER_START_UTTER = "R"
MAX_EPISODE_CYCLES = 10000


@dataclass(frozen=True)
class MotorCommand:
    write: Optional[str]
    move: str
    utter: Optional[str]
    halt: bool = False


@dataclass(frozen=True)
class Sensory:
    seen: str
    uttered_feedback: Optional[str]


@dataclass
class Devices:
    last_uttered: Optional[str] = TEACHER_START_UTTER


class TapeWorld:
    """A finite tape with visible boundary markers; moves clamp at the ends."""

    def __init__(self, content: str, position: int = 1):
        for c in content:
            if c not in TAPE_SYMBOLS or c == BOUND:
                raise ConfigurationError(f"bad tape symbol {c!r}")
        self.cells: List[str] = [BOUND, *content, BOUND]
        if not 0 <= position < len(self.cells):
            raise ConfigurationError(f"position {position} outside tape")
        self.position = position

    @property
    def seen(self) -> str:
        return self.cells[self.position]

    def content(self) -> str:
        return "".join(self.cells[1:-1])

    def copy(self) -> "TapeWorld":
        w = TapeWorld.__new__(TapeWorld)
        w.cells = list(self.cells)
        w.position = self.position
        return w


def world_step(world: TapeWorld, devices: Devices, cmd: MotorCommand) -> Sensory:
    """Apply write, then move (clamping), then read; buffer the utterance."""
    if cmd.write is not None:
        world.cells[world.position] = cmd.write
    if cmd.move == "L":
        world.position = max(world.position - 1, 0)
    elif cmd.move == "R":
        world.position = min(world.position + 1, len(world.cells) - 1)
    elif cmd.move != "S":
        raise ConfigurationError(f"bad move {cmd.move!r}")
    devices.last_uttered = cmd.utter
    return Sensory(seen=world.seen, uttered_feedback=devices.last_uttered)


def teacher_policy(obs: Sensory, prev_cmd: Optional[MotorCommand] = None) -> MotorCommand:
    """Deterministic parenthesis-checker controller, state in the utter channel."""
    state = obs.uttered_feedback
    c = obs.seen
    if state == "R":  # scan right for the first ')'
        if c == RPAR:
            return MotorCommand(write=STAR, move="L", utter="L")
        if c == BOUND:
            return MotorCommand(write=None, move="L", utter="C")
        if c in (LPAR, STAR, BLANK):
            return MotorCommand(write=None, move="R", utter="R")
    elif state == "L":  # scan left for the matching '('
        if c == LPAR:
            return MotorCommand(write=STAR, move="R", utter="R")
        if c == BOUND:
            return MotorCommand(write=NO, move="S", utter="N", halt=True)
        if c in (STAR, BLANK):
            return MotorCommand(write=None, move="L", utter="L")
    elif state == "C":  # final sweep left, checking for unmatched '('
        if c == LPAR:
            return MotorCommand(write=NO, move="S", utter="N", halt=True)
        if c == BOUND:
            return MotorCommand(write=YES, move="S", utter="Y", halt=True)
        if c in (STAR, BLANK):
            return MotorCommand(write=None, move="L", utter="C")
    raise TeacherFault(f"teacher cannot handle seen={c!r} in state {state!r}")


# ---------------------------------------------------------------------------
# One-hot field coding
# ---------------------------------------------------------------------------

def _one_hot(value, domain) -> Tuple[int, ...]:
    try:
        idx = domain.index(value)
    except ValueError:
        raise ConfigurationError(f"value {value!r} not in field domain {domain}")
    return tuple(1 if i == idx else 0 for i in range(len(domain)))


def _un_hot(block: Sequence[int], domain):
    hot = [i for i, v in enumerate(block) if v != 0]
    if len(hot) != 1:
        raise ConfigurationError(f"block {block} is not one-hot")
    return domain[hot[0]]


def code_command(cmd: MotorCommand) -> SymbolVector:
    return (_one_hot(cmd.write, WRITE_DOMAIN) + _one_hot(cmd.move, MOVE_DOMAIN)
            + _one_hot(cmd.utter, UTTER_DOMAIN) + _one_hot(cmd.halt, HALT_DOMAIN))


def decode_command(vec: Sequence[int]) -> MotorCommand:
    w, m, u = len(WRITE_DOMAIN), len(MOVE_DOMAIN), len(UTTER_DOMAIN)
    return MotorCommand(
        write=_un_hot(vec[:w], WRITE_DOMAIN),
        move=_un_hot(vec[w:w + m], MOVE_DOMAIN),
        utter=_un_hot(vec[w + m:w + m + u], UTTER_DOMAIN),
        halt=_un_hot(vec[w + m + u:], HALT_DOMAIN),
    )


def code_sensory(obs: Sensory) -> SymbolVector:
    return _one_hot(obs.seen, list(TAPE_SYMBOLS)) + _one_hot(obs.uttered_feedback, UTTER_DOMAIN)


def decode_sensory(vec: Sequence[int]) -> Sensory:
    t = len(TAPE_SYMBOLS)
    return Sensory(seen=_un_hot(vec[:t], list(TAPE_SYMBOLS)),
                   uttered_feedback=_un_hot(vec[t:], UTTER_DOMAIN))


def code_am_input(obs: Sensory, prev_cmd: Optional[MotorCommand]) -> SymbolVector:
    pw = prev_cmd.write if prev_cmd else None
    pm = prev_cmd.move if prev_cmd else None
    pu = prev_cmd.utter if prev_cmd else None
    return (code_sensory(obs) + _one_hot(pw, WRITE_DOMAIN)
            + _one_hot(pm, MOVE_DOMAIN) + _one_hot(pu, UTTER_DOMAIN))


def code_as_input(cmd: MotorCommand, obs: Sensory) -> SymbolVector:
    return code_command(cmd) + code_sensory(obs)


# ---------------------------------------------------------------------------
# Brain
# ---------------------------------------------------------------------------

# Exact-match gate: any partial field match scores at most 4/5 under the
# ratio similarity, so 0.9 admits only full-situation matches.
AM_XINH = 0.9


@dataclass
class Brain:
    am: AssociativeField
    asim: AssociativeField  # "AS" collides with the keyword; imagery field

    @classmethod
    def fresh(cls, seed: int = 0, estate_bias_add: float = 0.0,
              estate_bias_mul: float = 0.0, tau_e: float = 100.0) -> "Brain":
        def make(sub_seed):
            cfg = AfConfig(similarity=Similarity.NONZERO_MATCH_RATIO,
                           xinh=AM_XINH, seed=sub_seed, estates_enabled=True)
            est = EState(tau_e=tau_e, bias_add=estate_bias_add,
                         bias_mul=estate_bias_mul)
            return AssociativeField(cfg, AssociativeProgram(), est)
        return cls(am=make(seed * 2 + 1), asim=make(seed * 2 + 2))

    def to_json(self) -> dict:
        def dump(af):
            return {
                "seed": af.config.seed,
                "program": af.prog.to_json(),
                "estate": {"e": af.estate.e.tolist(), "tau_e": af.estate.tau_e,
                           "bias_add": af.estate.bias_add,
                           "bias_mul": af.estate.bias_mul},
            }
        return {"am": dump(self.am), "as": dump(self.asim)}

    @classmethod
    def from_json(cls, doc: dict) -> "Brain":
        def load(sub):
            cfg = AfConfig(similarity=Similarity.NONZERO_MATCH_RATIO,
                           xinh=AM_XINH, seed=sub["seed"], estates_enabled=True)
            est = EState(e=sub["estate"]["e"], tau_e=sub["estate"]["tau_e"],
                         bias_add=sub["estate"]["bias_add"],
                         bias_mul=sub["estate"]["bias_mul"])
            return AssociativeField(cfg, AssociativeProgram.from_json(sub["program"]), est)
        return cls(am=load(doc["am"]), asim=load(doc["as"]))


@dataclass
class TraceRow:
    cycle: int
    seen: str
    uttered_fb: Optional[str]
    cmd: MotorCommand
    source: str          # "teacher" | "AM"
    sensory_source: str  # "world" | "AS"


@dataclass
class ExamResult:
    verdict: Optional[str]
    trace: List[TraceRow]
    halted: bool

    @property
    def commands(self) -> List[MotorCommand]:
        return [row.cmd for row in self.trace]


def train(brain: Brain, tapes: Sequence[str],
          teacher=teacher_policy, passes: int = 1) -> Brain:
    """Teacher-forced demonstration over a tape ensemble.

    The teacher's command is clamped onto the motor output every cycle; AM
    and AS tape-record their (input, output) streams with deduplication.
    E-states evolve but do not gate learning.
    """
    for _ in range(passes):
        for tape in tapes:
            world = TapeWorld(tape)
            devices = Devices()
            obs = Sensory(seen=world.seen, uttered_feedback=devices.last_uttered)
            prev_cmd: Optional[MotorCommand] = None
            for cycle in range(MAX_EPISODE_CYCLES):
                cmd = teacher(obs, prev_cmd)
                brain.am.cycle(code_am_input(obs, prev_cmd), wen=True,
                               forced_y=code_command(cmd), dedup=True)
                nxt = world_step(world, devices, cmd)
                brain.asim.cycle(code_as_input(cmd, obs), wen=True,
                                 forced_y=code_sensory(nxt), dedup=True)
                obs, prev_cmd = nxt, cmd
                if cmd.halt:
                    break
            else:
                raise NonConvergenceError(f"teacher did not halt on tape {tape!r}")
    return brain


def _am_command(brain: Brain, obs: Sensory, prev_cmd, cycle: int) -> MotorCommand:
    y = brain.am.cycle(code_am_input(obs, prev_cmd))
    if y is None:
        raise StuckError(cycle, code_am_input(obs, prev_cmd))
    return decode_command(y)


def exam_real(brain: Brain, world: TapeWorld,
              max_cycles: int = MAX_EPISODE_CYCLES) -> ExamResult:
    """AM drives the motor loop against the real tape; learning off."""
    devices = Devices()
    obs = Sensory(seen=world.seen, uttered_feedback=devices.last_uttered)
    prev_cmd: Optional[MotorCommand] = None
    trace: List[TraceRow] = []
    for cycle in range(max_cycles):
        cmd = _am_command(brain, obs, prev_cmd, cycle)
        trace.append(TraceRow(cycle, obs.seen, obs.uttered_feedback, cmd,
                              source="AM", sensory_source="world"))
        obs = world_step(world, devices, cmd)
        prev_cmd = cmd
        if cmd.halt:
            return ExamResult(verdict=cmd.write, trace=trace, halted=True)
    raise NonConvergenceError(f"no halt within {max_cycles} cycles")


def exam_mental(brain: Brain, tape_image: str,
                max_cycles: int = MAX_EPISODE_CYCLES) -> ExamResult:
    """AM drives against an imagined tape; AS must account for every cycle.

    The imagined tape starts from ``tape_image`` and changes only through
    the robot's own write/move commands.  Each cycle the (command, sensory)
    pair is looked up in AS: no matching association, or an imagined
    outcome that was never experienced for that pair, raises
    ImageryGapError.  The real tape plays no part.
    """
    imagined = TapeWorld(tape_image)
    devices = Devices()
    obs = Sensory(seen=imagined.seen, uttered_feedback=devices.last_uttered)
    prev_cmd: Optional[MotorCommand] = None
    trace: List[TraceRow] = []
    for cycle in range(max_cycles):
        cmd = _am_command(brain, obs, prev_cmd, cycle)
        trace.append(TraceRow(cycle, obs.seen, obs.uttered_feedback, cmd,
                              source="AM", sensory_source="AS"))
        x_as = code_as_input(cmd, obs)
        outcomes = {gy for gx, gy in zip(brain.asim.prog.gx, brain.asim.prog.gy)
                    if gx == x_as}
        # keep the imagery field's dynamics live even though its row choice
        # is audited against the imagined tape below
        brain.asim.cycle(x_as)
        if not outcomes:
            raise ImageryGapError(cycle, x_as, "situation never experienced")
        nxt = world_step(imagined, devices, cmd)
        if code_sensory(nxt) not in outcomes:
            raise ImageryGapError(cycle, x_as,
                                  f"outcome {nxt} never experienced")
        obs = nxt
        prev_cmd = cmd
        if cmd.halt:
            return ExamResult(verdict=cmd.write, trace=trace, halted=True)
    raise NonConvergenceError(f"no halt within {max_cycles} cycles")


def run_teacher_episode(tape: str, max_cycles: int = MAX_EPISODE_CYCLES) -> ExamResult:
    """Reference episode: the teacher drives the real tape directly."""
    world = TapeWorld(tape)
    devices = Devices()
    obs = Sensory(seen=world.seen, uttered_feedback=devices.last_uttered)
    prev_cmd: Optional[MotorCommand] = None
    trace: List[TraceRow] = []
    for cycle in range(max_cycles):
        cmd = teacher_policy(obs, prev_cmd)
        trace.append(TraceRow(cycle, obs.seen, obs.uttered_feedback, cmd,
                              source="teacher", sensory_source="world"))
        obs = world_step(world, devices, cmd)
        prev_cmd = cmd
        if cmd.halt:
            return ExamResult(verdict=cmd.write, trace=trace, halted=True)
    raise NonConvergenceError(f"teacher did not halt within {max_cycles} cycles")


def balanced(tape: str) -> bool:
    """Ground truth for the parenthesis check."""
    depth = 0
    for c in tape:
        if c == LPAR:
            depth += 1
        elif c == RPAR:
            depth -= 1
            if depth < 0:
                return False
    return depth == 0
