"""Named acceptance suites: every release criterion as a runnable check.

Each suite returns a SuiteReport with one CheckResult per assertion; the
CLI ``verify`` subcommand and the acceptance test module both run these.
Statistical checks draw from fixed seeds so a pass/fail verdict is
reproducible byte-for-byte.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np

from . import ann0, epmm, pmm, robot
from .afield import (AfConfig, AssociativeField, AfCombinatorialStepper,
                     AssociativeProgram, next_estate_values, reconfigure)
from .codes import Similarity, correct_decoding_check
from .errors import ConfigurationError
from .machines import (CombinatorialMachine, DepthProbe, ExhaustiveProbe,
                       MealyMachine, MonteCarloProbe,
                       ProbabilisticCombinatorialMachine, equivalent)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append(CheckResult(name, bool(passed), detail))

    def to_json(self) -> dict:
        return {"suite": self.suite, "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                           for c in self.checks]}


_SUITES: Dict[str, Callable[[int], SuiteReport]] = {}


def _suite(name):
    def register(fn):
        _SUITES[name] = fn
        return fn
    return register


def suite_names() -> List[str]:
    return list(_SUITES)


def run_suite(name: str, seed: int = 0) -> SuiteReport:
    if name not in _SUITES:
        raise ConfigurationError(
            f"unknown suite {name!r}; available: {', '.join(_SUITES)}")
    return _SUITES[name](seed)


def run_all(seed: int = 0) -> List[SuiteReport]:
    return [fn(seed) for fn in _SUITES.values()]


# ---------------------------------------------------------------------------
# shared generators
# ---------------------------------------------------------------------------

def random_code_set(rng: random.Random, count: int, dim: int,
                    fn: Similarity, value_range=(0, 3)) -> List[tuple]:
    """Greedily grow a code set keeping the correct decoding condition."""
    lo, hi = value_range
    if fn is Similarity.NONZERO_MATCH_RATIO:
        lo = max(lo, 1)  # all-nonzero vectors always satisfy the ratio form
    chosen: List[tuple] = []
    attempts = 0
    while len(chosen) < count and attempts < 20000:
        attempts += 1
        cand = tuple(rng.randint(lo, hi) for _ in range(dim))
        if cand in chosen or all(v == 0 for v in cand):
            continue
        if correct_decoding_check(chosen + [cand], fn).ok:
            chosen.append(cand)
    if len(chosen) < count:
        raise ConfigurationError(
            f"could not build a {count}-code set of dimension {dim}")
    return chosen


def one_hot_codes(count: int, scale: Sequence[int] = None) -> List[tuple]:
    """Pairwise non-proportional output codes (distinct hot positions)."""
    scale = scale or [1] * count
    return [tuple(scale[i] if j == i else 0 for j in range(count))
            for i in range(count)]


def random_combinatorial(rng: random.Random, x_codes, y_codes) -> CombinatorialMachine:
    table = {x: rng.choice(y_codes) for x in x_codes}
    return CombinatorialMachine(inputs=tuple(x_codes), outputs=tuple(y_codes),
                                table=table)


def af0_for_machine(machine: CombinatorialMachine, fn: Similarity,
                    seed: int) -> AssociativeField:
    prog = AssociativeProgram(rows=[(x, machine.table[x]) for x in machine.inputs])
    return AssociativeField(AfConfig(similarity=fn, xinh=0.0, seed=seed), prog)


def bits_code(bits: Sequence[int]) -> tuple:
    """Booleans as nonzero symbols so the ratio similarity decodes exactly."""
    return tuple(int(b) + 1 for b in bits)


# ---------------------------------------------------------------------------
# 1. ANN-0 integrator vs closed-form transient
# ---------------------------------------------------------------------------

@_suite("ann0-oracle")
def _ann0_oracle(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("ann0-oracle")
    # compile the integrator kernels before timing the workload
    warm = ann0.Ann0Params(alpha=0.5, beta=0.2, tau=1.0, gx=np.eye(2), gy=np.eye(2))
    ann0.integrate(ann0.Ann0State(np.zeros(2)), np.ones(2), 0.0, warm, 0.01, 2)
    t_start = time.perf_counter()

    def compare(params, s, t_span):
        dt = params.tau / 100.0
        steps = int(round(t_span / dt))
        _, U = ann0.integrate(ann0.Ann0State(np.zeros(params.n)), s, 0.0,
                              params, dt, steps)
        if not (U[1:] > 0).all():
            return None, "active set not constant over the window"
        worst = 0.0
        for k in range(1, steps + 1):
            cf = ann0.closed_form_u(params, s, np.zeros(params.n), 0.0,
                                    range(params.n), k * dt)
            rel = np.max(np.abs(U[k] - cf) / np.maximum(np.abs(cf), 1e-12))
            worst = max(worst, float(rel))
        return worst, ""

    sub = ann0.Ann0Params(alpha=0.5, beta=0.2, tau=1.0, gx=np.eye(3), gy=np.eye(3))
    worst, msg = compare(sub, np.array([1.0, 0.9, 0.8]), 5.0)
    rep.add("subcritical 5*tau window, rel err < 1e-3",
            worst is not None and worst < 1e-3, msg or f"max rel err {worst:.3e}")

    wta = ann0.Ann0Params(alpha=1.5, beta=1.0, tau=1.0, gx=np.eye(2), gy=np.eye(2))
    worst, msg = compare(wta, np.array([1.0, 0.5]), 1.0)
    rep.add("WTA-regime 1*tau window, rel err < 1e-3",
            worst is not None and worst < 1e-3, msg or f"max rel err {worst:.3e}")

    elapsed = time.perf_counter() - t_start
    rep.add("runtime < 1 s", elapsed < 1.0, f"{elapsed:.3f} s")
    return rep


# ---------------------------------------------------------------------------
# 2. winner-take-all selection law
# ---------------------------------------------------------------------------

@_suite("wta-selection")
def _wta_selection(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("wta-selection")
    noise = 1e-6
    params = ann0.Ann0Params(alpha=1.5, beta=1.0, tau=1.0, gx=np.eye(4),
                             gy=np.eye(4), noise_amp=noise)
    rng = np.random.default_rng(seed + 1)
    hits = 0
    trials = 0
    while trials < 100:
        s = rng.uniform(0.1, 1.0, 4)
        top2 = np.sort(s)[-2:]
        if top2[1] - top2[0] <= 10 * noise:
            continue
        trials += 1
        res = ann0.run_wta(params, s, seed=int(rng.integers(0, 2**32)))
        hits += res.winner == int(np.argmax(s))
    rep.add("argmax wins >= 99/100 gapped trials", hits >= 99, f"{hits}/100")

    pair = ann0.Ann0Params(alpha=1.5, beta=1.0, tau=1.0, gx=np.eye(2),
                           gy=np.eye(2), noise_amp=noise)
    wins0 = sum(ann0.run_wta(pair, [0.7, 0.7], seed=seed * 100000 + k).winner == 0
                for k in range(1000))
    sigma = math.sqrt(0.25 / 1000)
    rep.add("two-way tie within 3 sigma of 1/2",
            abs(wins0 / 1000 - 0.5) <= 3 * sigma,
            f"frac0 = {wins0 / 1000:.3f}, band +-{3 * sigma:.3f}")
    return rep


# ---------------------------------------------------------------------------
# 3. ANN-0 drive equals AF-0 cycle
# ---------------------------------------------------------------------------

@_suite("ann0-af0")
def _ann0_af0(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("ann0-af0")
    rng = random.Random(seed + 2)
    failures = []
    for trial in range(20):
        nx = rng.randint(2, 8)
        # the scalar-product decoding condition needs roughly one dimension
        # per stored code (codes must be near-orthogonal)
        dim = nx + rng.randint(0, 2)
        x_codes = random_code_set(rng, nx, dim, Similarity.SCALAR_PRODUCT)
        ny = rng.randint(1, min(4, nx))
        y_codes = one_hot_codes(ny, scale=[rng.randint(1, 3) for _ in range(ny)])
        machine = random_combinatorial(rng, x_codes, y_codes)
        af = af0_for_machine(machine, Similarity.SCALAR_PRODUCT, seed=trial)
        gx_rows = [x for x in machine.inputs]
        gy_rows = [machine.table[x] for x in machine.inputs]
        params = ann0.program_to_ann_params(gx_rows, gy_rows)
        drive_out = ann0.drive_as_symbol_machine(
            params, ann0.DriveSchedule(dt_psy=20.0), list(x_codes),
            seed=seed * 977 + trial, output_alphabet=y_codes)
        af_out = [af.cycle(x) for x in x_codes]
        if drive_out != af_out:
            failures.append((trial, x_codes, drive_out, af_out))
    rep.add("20 random programs, exhaustive drive == AF-0",
            not failures, f"{len(failures)} mismatching programs" if failures else "")
    return rep


# ---------------------------------------------------------------------------
# 4. AF-0 combinatorial universality
# ---------------------------------------------------------------------------

@_suite("af0-universality")
def _af0_universality(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("af0-universality")
    rng = random.Random(seed + 3)
    bad = 0
    for trial in range(100):
        dim = rng.randint(2, 4)
        nx = rng.randint(2, 16)
        x_codes = random_code_set(rng, nx, dim, Similarity.NONZERO_MATCH_RATIO,
                                  value_range=(1, 4))
        ny = rng.randint(1, 4)
        y_codes = one_hot_codes(ny)
        machine = random_combinatorial(rng, x_codes, y_codes)
        af = af0_for_machine(machine, Similarity.NONZERO_MATCH_RATIO, seed=trial)
        res = equivalent(machine,
                         AfCombinatorialStepper(af, inputs=machine.inputs),
                         ExhaustiveProbe())
        bad += not res.ok
    rep.add("100 random machines (|X| <= 16) exhaustively equivalent",
            bad == 0, f"{bad} failures")

    # rational-delta machines realized by duplicated rows
    bad = 0
    for trial in range(5):
        dim = 3
        x_codes = random_code_set(rng, 3, dim, Similarity.NONZERO_MATCH_RATIO,
                                  value_range=(1, 4))
        y_codes = one_hot_codes(3)
        from fractions import Fraction
        delta = {}
        rows = []
        for x in x_codes:
            den = rng.choice([2, 3, 4])
            cuts = sorted(rng.sample(range(1, den), k=min(2, den - 1)))
            weights = [a - b for a, b in zip(cuts + [den], [0] + cuts)]
            ys = rng.sample(y_codes, k=len(weights))
            delta[x] = {y: Fraction(w, den) for y, w in zip(ys, weights)}
            for y, w in zip(ys, weights):
                rows.extend([(x, y)] * w)
        pm = ProbabilisticCombinatorialMachine(tuple(x_codes), tuple(y_codes), delta)
        af = AssociativeField(AfConfig(similarity=Similarity.NONZERO_MATCH_RATIO,
                                       xinh=0.0, seed=trial * 7 + 1),
                              AssociativeProgram(rows=rows))
        res = equivalent(pm, AfCombinatorialStepper(af, inputs=pm.inputs),
                         MonteCarloProbe(samples=10000, k_sigma=3.0, seed=trial))
        bad += not res.ok
    rep.add("rational-delta machines within 3 sigma over 10^4 cycles",
            bad == 0, f"{bad} failures")
    return rep


# ---------------------------------------------------------------------------
# 5. AF-1 reconfiguration: 256 logic functions from one 16-row program
# ---------------------------------------------------------------------------

@_suite("af-universality")
def _af_universality(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("af-universality")
    t0 = time.perf_counter()
    m = 3
    x_codes = [bits_code(bits) for bits in itertools.product((0, 1), repeat=m)]
    y_codes = [bits_code([0]), bits_code([1])]
    prog = AssociativeProgram(rows=[(x, y) for x in x_codes for y in y_codes])
    failures = 0
    for func_id in range(2 ** (2 ** m)):
        table = {x: y_codes[(func_id >> k) & 1] for k, x in enumerate(x_codes)}
        machine = CombinatorialMachine(tuple(x_codes), tuple(y_codes), table)
        estate = reconfigure(prog, machine)
        af = AssociativeField(AfConfig(similarity=Similarity.NONZERO_MATCH_RATIO,
                                       xinh=0.0, seed=func_id,
                                       estates_enabled=True),
                              prog, estate)
        got = [af.cycle(x) for x in x_codes]
        want = [table[x] for x in x_codes]
        failures += got != want
    elapsed = time.perf_counter() - t0
    rep.add("all 256 logic functions exact on all 8 inputs",
            failures == 0, f"{failures} failing functions")
    rep.add("runtime < 10 s", elapsed < 10.0, f"{elapsed:.2f} s")
    return rep


# ---------------------------------------------------------------------------
# 6. E-state charge/discharge law
# ---------------------------------------------------------------------------

@_suite("estate-dynamics")
def _estate_dynamics(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("estate-dynamics")
    rng = random.Random(seed + 5)
    ok = True
    for _ in range(500):
        s = rng.uniform(0, 1)
        e = rng.uniform(0, 1)
        tau = rng.uniform(1.01, 50.0)
        out = float(next_estate_values([s], [e], tau)[0])
        want = s if s > e else e * (tau - 1.0) / tau
        ok &= out == want
    rep.add("charge/discharge branches exact on 500 random points", ok)

    tau = 4.0
    e0 = 0.8
    e = np.array([e0])
    worst = 0.0
    for nu in range(1, 101):
        e = next_estate_values([0.0], e, tau)
        worst = max(worst, abs(float(e[0]) - e0 * ((tau - 1.0) / tau) ** nu))
    rep.add("decay sequence matches e0*((tau-1)/tau)^nu to 1e-12",
            worst < 1e-12, f"max |diff| = {worst:.2e}")
    return rep


# ---------------------------------------------------------------------------
# 7. FSM learning by demonstration through the delayed loop
# ---------------------------------------------------------------------------

def _teaching_machine() -> MealyMachine:
    """3-state machine with every (x, s) pair reachable from s0."""
    X = [(1,), (2,)]
    S = [(1,), (2,), (3,)]
    Y = [(1,), (2,)]
    omega = {}
    alpha = {}
    for x in X:
        for s in S:
            omega[(x, s)] = Y[(x[0] + s[0]) % 2]
            alpha[(x, s)] = S[s[0] % 3] if x == (1,) else S[(s[0] + 1) % 3]
    return MealyMachine(tuple(X), tuple(Y), tuple(S), omega, alpha, s0=(1,))


@_suite("fsm-learning")
def _fsm_learning(seed: int = 0) -> SuiteReport:
    from .afield import make_fsm
    rep = SuiteReport("fsm-learning")
    machine = _teaching_machine()

    # every (x, s) must be reachable or the demonstration cannot cover it
    reachable = {machine.s0}
    frontier = [machine.s0]
    while frontier:
        s = frontier.pop()
        for x in machine.inputs:
            nxt = machine.alpha_next[(x, s)]
            if nxt not in reachable:
                reachable.add(nxt)
                frontier.append(nxt)
    rep.add("demo machine: all states reachable", reachable == set(machine.states))

    af = AssociativeField(AfConfig(similarity=Similarity.NONZERO_MATCH_RATIO,
                                   xinh=0.0, seed=seed + 6))
    rng = random.Random(seed + 6)
    need = {(x, s) for x in machine.inputs for s in machine.states}
    s = machine.s0
    cycles = 0
    while need and cycles < 10000:
        x = rng.choice(machine.inputs)
        y = machine.omega[(x, s)]
        s_next = machine.alpha_next[(x, s)]
        af.learn(x + s, y + s_next, wen=True, dedup=True)
        need.discard((x, s))
        s = s_next
        cycles += 1
    rep.add("(x, s) coverage reached by random demonstration", not need,
            f"{cycles} cycles")

    fsm = make_fsm(af, fb0=machine.s0)
    res = equivalent(machine, fsm, DepthProbe(depth=6, inputs=machine.inputs))
    rep.add("equivalent to the demonstrated machine on all sequences to depth 6",
            res.ok, res.detail)
    return rep


# ---------------------------------------------------------------------------
# 8. robot mental computation
# ---------------------------------------------------------------------------

@_suite("robot-mental")
def _robot_mental(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("robot-mental")
    training = ["".join(p) for n in range(0, 6)
                for p in itertools.product("()", repeat=n)]
    brain = robot.Brain.fresh(seed=seed)
    robot.train(brain, training)
    rng = random.Random(seed + 7)
    heldout = rng.sample(["".join(p) for p in itertools.product("()", repeat=6)], 20)

    verdict_ok = 0
    mental_ok = 0
    problems = []
    for tape in heldout:
        want = "Y" if robot.balanced(tape) else "N"
        real = robot.exam_real(brain, robot.TapeWorld(tape))
        if real.verdict == want:
            verdict_ok += 1
        else:
            problems.append((tape, "real", real.verdict, want))
        try:
            mental = robot.exam_mental(brain, tape)
        except Exception as exc:  # imagery gap counts as failure
            problems.append((tape, "mental", type(exc).__name__))
            continue
        if mental.verdict == real.verdict and mental.commands == real.commands:
            mental_ok += 1
        else:
            problems.append((tape, "mismatch"))
    rep.add("20 held-out real verdicts correct", verdict_ok == 20,
            f"{verdict_ok}/20 {problems[:3]}")
    rep.add("mental exam equals real exam cycle-for-cycle", mental_ok == 20,
            f"{mental_ok}/20")
    return rep


# ---------------------------------------------------------------------------
# 9. PMM conservation and analytic solutions
# ---------------------------------------------------------------------------

@_suite("conservation")
def _conservation(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("conservation")
    spec = pmm.PmmSpec(
        2,
        lambda x, f, t: 2.0 if (f, t) == (0, 1) else (3.0 if (f, t) == (1, 0) else 0.0),
        lambda x, s: 0.0)
    P = np.array([1.0, 0.0])
    dt = 0.02
    worst = 0.0
    for _ in range(100000):
        P = pmm.master_step(P, (), spec, dt)
        worst = max(worst, pmm.conservation_residual(P))
    rep.add("sum(P) drift < 1e-9 over 1e5 steps", worst < 1e-9, f"{worst:.2e}")
    rep.add("two-state equilibrium P1 = 2/5 to 1e-6",
            abs(P[1] - 0.4) < 1e-6, f"P1 = {P[1]:.9f}")

    sym = pmm.PmmSpec(2, lambda x, f, t: 1.0 if f != t else 0.0, lambda x, s: 0.0)
    P = np.array([1.0, 0.0])
    worst = 0.0
    t = 0.0
    for k in range(200):
        P = pmm.master_step(P, (), sym, 0.01)
        t += 0.01
        worst = max(worst, abs(P[0] - 0.5 * (1.0 + math.exp(-2.0 * t))))
    rep.add("symmetric transient matches 1/2(1+e^{-2t}) to 1e-6",
            worst < 1e-6, f"max |diff| = {worst:.2e}")
    return rep


# ---------------------------------------------------------------------------
# 10. ensemble statistics vs mean field
# ---------------------------------------------------------------------------

def _two_state_sym():
    return pmm.PmmSpec(2, lambda x, f, t: 1.0 if f != t else 0.0, lambda x, s: 0.0)


def _occupancy_runs(spec, N, t_probe, dt, runs, seed):
    """Relative occupancy of state 0 at t_probe over independent runs."""
    steps = int(round(t_probe / dt))
    vals = np.empty(runs)
    for r in range(runs):
        rng = np.random.default_rng(seed + 1000 * r)
        ens = epmm.Ensemble(spec, np.array([N, 0]))
        for _ in range(steps):
            ens = epmm.ensemble_step(ens, (), dt, rng)
        vals[r] = ens.occupations[0] / N
    return vals


@_suite("ensemble-stats")
def _ensemble_stats(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("ensemble-stats")
    spec = _two_state_sym()
    dt = 0.02
    N = 1000
    probes = [0.2, 0.5, 1.0, 1.5, 2.0]
    runs = 200
    steps_per = [int(round(t / dt)) for t in probes]

    # mean-field trajectory at the probe times
    e_bar = np.array([1.0, 0.0])
    mf = {}
    t = 0.0
    for k in range(max(steps_per)):
        e_bar = epmm.meanfield_step(e_bar, (), spec, dt)
        t += dt
        for tp, sp in zip(probes, steps_per):
            if k + 1 == sp:
                mf[tp] = e_bar.copy()

    occ = {tp: np.empty(runs) for tp in probes}
    for r in range(runs):
        rng = np.random.default_rng(seed + 1234 + r)
        ens = epmm.Ensemble(spec, np.array([N, 0]))
        k = 0
        for tp, sp in zip(probes, steps_per):
            while k < sp:
                ens = epmm.ensemble_step(ens, (), dt, rng)
                k += 1
            occ[tp][r] = ens.occupations[0] / N

    ok = True
    details = []
    for tp in probes:
        p = mf[tp][0]
        sigma_k = epmm.occupancy_stats(p, N).sigma_rel
        diff = abs(occ[tp].mean() - p)
        ok &= diff <= 3 * sigma_k
        details.append(f"t={tp}: |mean-mf|={diff:.4f} band={3 * sigma_k:.4f}")
    rep.add("mean occupancy within 3 sigma_k of mean field at 5 probe times",
            ok, "; ".join(details))

    vals = _occupancy_runs(spec, N, 1.0, dt, 1000, seed + 999)
    p = mf[1.0][0]
    want = epmm.occupancy_stats(p, N).sigma_rel
    got = float(vals.std(ddof=1))
    rep.add("empirical sigma within 5% of sqrt(P(1-P)/N)",
            abs(got - want) / want < 0.05,
            f"empirical {got:.5f} vs {want:.5f}")

    sds = []
    for N_i in (100, 1000, 10000):
        vals = _occupancy_runs(spec, N_i, 1.0, dt, 200, seed + 31 * N_i)
        sds.append(float(vals.std(ddof=1)))
    slope = np.polyfit(np.log10([100, 1000, 10000]), np.log10(sds), 1)[0]
    rep.add("1/sqrt(N) scaling slope -0.5 +- 0.1",
            abs(slope + 0.5) <= 0.1, f"slope = {slope:.3f}")
    return rep


# ---------------------------------------------------------------------------
# 11. GHK pins
# ---------------------------------------------------------------------------

@_suite("ghk")
def _ghk(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("ghk")
    par = pmm.ChannelParams(permeabilities=(1e-6,), z=1, T=300.0,
                            C_in=0.14, C_out=0.005)
    v_rev = pmm.nernst_potential(par)
    i_rev = pmm.ghk_current(v_rev, 0, par)
    rep.add("zero current at the Nernst potential", abs(i_rev) < 1e-15,
            f"I({v_rev:.6f}) = {i_rev:.2e}")

    want = 1e-6 * 1 * pmm.FARADAY * (0.14 - 0.005)
    got = pmm.ghk_current(0.0, 0, par)
    rep.add("V->0 limit equals p*z*F*(C_in-C_out) within 1e-9 relative",
            abs(got - want) / abs(want) < 1e-9, f"{got!r} vs {want!r}")

    # frozen value from an independent 50-digit evaluation of the current law
    pin = 0.0303821107448072926
    got = pmm.ghk_current(0.05, 0, par)
    rep.add("regression pin at V = 0.05", abs(got - pin) / pin < 1e-12,
            f"{got!r}")

    i0 = pmm.ghk_current(0.0, 0, par)
    cont = max(abs(pmm.ghk_current(1e-9, 0, par) - i0),
               abs(pmm.ghk_current(-1e-9, 0, par) - i0))
    rep.add("continuity across V=0", cont < 1e-6 * abs(i0 + 1.0), f"{cont:.2e}")
    return rep


# ---------------------------------------------------------------------------
# 12. coupled-ensemble spike threshold demo
# ---------------------------------------------------------------------------

@_suite("spike")
def _spike(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("spike")
    rest = epmm.SPIKE_DEMO_V0
    sup = epmm.spike_demo_sim(stimulus_scale=1.0, seed=seed)
    rows_sup = sup.run(0.08, epmm.SPIKE_DEMO_DT)
    sub = epmm.spike_demo_sim(stimulus_scale=0.1, seed=seed)
    rows_sub = sub.run(0.08, epmm.SPIKE_DEMO_DT)

    exc_sup = float(rows_sup[:, 1].max() - rest)
    exc_sub = float(rows_sub[:, 1].max() - rest)
    rep.add("suprathreshold excursion >= 2x subthreshold peak",
            exc_sup >= 2.0 * exc_sub,
            f"{exc_sup * 1000:.1f} mV vs {exc_sub * 1000:.1f} mV")

    na4 = rows_sup[:, 2 + 4]
    rep.add("transient occupancy of the Na inactive state",
            na4.max() > 300 and na4[-1] < 0.5 * na4.max(),
            f"peak {na4.max():.0f}, final {na4[-1]:.0f}")
    rep.add("overshoot then recovery",
            rows_sup[:, 1].max() > 0.0 and abs(rows_sup[-1, 1] - rest) < 0.02,
            f"peak {rows_sup[:, 1].max():.3f} V, final {rows_sup[-1, 1]:.3f} V")
    return rep
