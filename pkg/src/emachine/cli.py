"""Unified command-line front end.

Subcommands: ann0, af, fsm, robot, pmm, epmm, verify.  Every experiment
config carries an explicit seed; identical config + seed reproduces output
files byte-for-byte.  Time series go to CSV, structures to JSON; outputs
are written only after a run completes, so failed runs leave no partial
files.

Exit codes: 0 success, 1 validation error, 2 runtime error, 3 acceptance
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import ann0, epmm, pmm, robot, verify
from .afield import AfConfig, AssociativeField, AssociativeProgram, EState
from .codes import Similarity
from .errors import EmachineError
from .machines import (DepthProbe, ExhaustiveProbe, MonteCarloProbe,
                       combinatorial_from_json, equivalent, mealy_from_json,
                       probabilistic_from_json)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_ACCEPTANCE = 3

_SEEDED = {"type": "object", "required": ["seed"],
           "properties": {"seed": {"type": "integer"}}}


def _schema(required, properties):
    props = {"seed": {"type": "integer"}, "nonpaper": {"type": "boolean"}}
    props.update(properties)
    return {"type": "object", "required": ["seed"] + required,
            "properties": props}


_PROGRAM_SCHEMA = {
    "type": "object", "required": ["rows"],
    "properties": {"rows": {"type": "array", "items": {
        "type": "object", "required": ["x", "y"],
        "properties": {"x": {"type": "array", "items": {"type": "integer"}},
                       "y": {"type": "array", "items": {"type": "integer"}}}}}},
}

SCHEMAS = {
    "ann0": _schema(["program", "schedule", "inputs"], {
        "alpha": {"type": "number"}, "beta": {"type": "number"},
        "tau": {"type": "number", "exclusiveMinimum": 0},
        "noise_amp": {"type": "number", "minimum": 0},
        "program": _PROGRAM_SCHEMA,
        "schedule": {"type": "object", "required": ["dt_psy"],
                     "properties": {"dt_psy": {"type": "number"},
                                    "xinh0": {"type": ["number", "null"]},
                                    "dt": {"type": ["number", "null"]}}},
        "inputs": {"type": "array",
                   "items": {"type": "array", "items": {"type": "integer"}}},
    }),
    "af": _schema(["mode", "program", "inputs"], {
        "mode": {"enum": ["af0", "af1"]},
        "similarity": {"enum": ["nonzero-match-ratio", "scalar-product"]},
        "xinh": {"type": "number", "minimum": 0},
        "estate": {"type": "object"},
        "program": _PROGRAM_SCHEMA,
        "inputs": {"type": "array",
                   "items": {"type": "array", "items": {"type": "integer"}}},
        "wen": {"type": "boolean"}, "dedup": {"type": "boolean"},
    }),
    "fsm": _schema([], {
        "machine": {"type": "object", "required": ["type"]},
        "inputs": {"type": "array"},
        "equivalence": {"type": "object", "required": ["m1", "m2", "probe"]},
    }),
    "pmm-master": _schema(["spec", "p0", "dt", "t_end"], {
        "spec": {"type": "object"}, "p0": {"type": "array"},
        "input": {"type": "array"}, "dt": {"type": "number"},
        "t_end": {"type": "number"},
    }),
    "pmm-path": _schema(["spec", "s0", "t_end"], {
        "spec": {"type": "object"}, "s0": {"type": "integer"},
        "input": {"type": "array"}, "t_end": {"type": "number"},
    }),
    "pmm-ghk": _schema(["channel", "v_min", "v_max", "v_steps"], {
        "channel": {"type": "object"},
        "v_min": {"type": "number"}, "v_max": {"type": "number"},
        "v_steps": {"type": "integer", "minimum": 2},
    }),
    "epmm-run": _schema(["ensembles", "membrane", "v0", "dt", "t_end"], {
        "ensembles": {"type": "array", "items": {
            "type": "object", "required": ["spec", "N"],
            "properties": {"N": {"type": "integer", "minimum": 1},
                           "initial_state": {"type": "integer"}}}},
        "membrane": {"type": "object",
                     "required": ["c_m", "g_leak", "e_leak"]},
        "stimulus": {"type": "array"},
        "links": {"type": "array"},
        "v0": {"type": "number"}, "dt": {"type": "number"},
        "t_end": {"type": "number"}, "record_every": {"type": "integer"},
    }),
    "epmm-spike": _schema([], {
        "scale": {"type": "number"}, "t_end": {"type": "number"},
    }),
    "robot-tapes": {"type": "object", "required": ["tapes"],
                    "properties": {"tapes": {"type": "array",
                                             "items": {"type": "string"}}}},
}


def validate_config(doc: dict, kind: str):
    try:
        jsonschema.validate(doc, SCHEMAS[kind])
    except jsonschema.ValidationError as err:
        path = "$" + "".join(f"[{p!r}]" for p in err.absolute_path)
        raise SystemExit(_fail(EXIT_VALIDATION,
                               f"config invalid for {kind} at {path}: {err.message}"))


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_json(path: Path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise SystemExit(_fail(EXIT_VALIDATION, f"cannot read config {path}: {err}"))


def _af_from_config(cfg: dict) -> AssociativeField:
    prog = AssociativeProgram.from_json(cfg["program"])
    estates = cfg["mode"] == "af1"
    est_doc = cfg.get("estate", {})
    estate = EState(e=est_doc.get("e", np.zeros(len(prog))),
                    tau_e=est_doc.get("tau_e", 100.0),
                    bias_add=est_doc.get("bias_add", 0.0),
                    bias_mul=est_doc.get("bias_mul", 0.0)) if estates else None
    config = AfConfig(
        similarity=Similarity(cfg.get("similarity", "nonzero-match-ratio")),
        xinh=cfg.get("xinh", 0.0), seed=cfg["seed"], estates_enabled=estates)
    return AssociativeField(config, prog, estate)


# ---------------------------------------------------------------------------
# subcommand runners
# ---------------------------------------------------------------------------

def run_ann0(cfg: dict, out_dir: Path, verbose: bool) -> int:
    prog = AssociativeProgram.from_json(cfg["program"])
    params = ann0.program_to_ann_params(
        prog.gx, prog.gy, alpha=cfg.get("alpha", 1.5), beta=cfg.get("beta", 1.0),
        tau=cfg.get("tau", 1.0), noise_amp=cfg.get("noise_amp", 1e-6))
    sched = ann0.DriveSchedule(dt_psy=cfg["schedule"]["dt_psy"],
                               xinh0=cfg["schedule"].get("xinh0"),
                               dt=cfg["schedule"].get("dt"))
    outputs, trace = ann0.drive_as_symbol_machine(
        params, sched, cfg["inputs"], seed=cfg["seed"], record=True)
    n, k = params.n, params.out_dim
    header = (["t"] + [f"u_{i+1}" for i in range(n)]
              + [f"r_{i+1}" for i in range(n)] + ["q"]
              + [f"y_{i+1}" for i in range(k)])
    write_csv(out_dir / "ann0_trace.csv", header, trace)
    write_json(out_dir / "ann0_summary.json", {
        "kind": "ann0", "seed": cfg["seed"],
        "outputs": [list(y) if y is not None else None for y in outputs]})
    return EXIT_OK


def run_af(cfg: dict, out_dir: Path, verbose: bool,
           trace_path: str | None = None) -> int:
    af = _af_from_config(cfg)
    wen = cfg.get("wen", False)
    dedup = cfg.get("dedup", False)
    rows = []
    outputs = []
    for x in cfg["inputs"]:
        y = af.cycle(x, wen=wen, dedup=dedup)
        outputs.append(list(y) if y is not None else None)
        t = af.last
        row = [t.cycle, json.dumps(list(t.x)), t.win,
               None if t.win is None else t.s_win,
               None if t.win is None else t.se_win,
               json.dumps(list(t.y)) if t.y is not None else ""]
        if verbose:
            row.append(json.dumps(af.estate.e.tolist()) if af.estate is not None else "")
        rows.append(row)
    header = ["cycle", "x", "win", "s_win", "se_win", "y"] + (["e"] if verbose else [])
    write_csv(Path(trace_path) if trace_path else out_dir / "af_trace.csv",
              header, rows)
    summary = {"kind": "af", "seed": cfg["seed"], "mode": cfg["mode"],
               "outputs": outputs, "wptr": af.prog.wptr}
    if af.estate is not None:
        summary["estate"] = af.estate.e.tolist()
    write_json(out_dir / "af_summary.json", summary)
    return EXIT_OK


_MACHINE_LOADERS = {"combinatorial": combinatorial_from_json,
                    "mealy": mealy_from_json,
                    "probabilistic": probabilistic_from_json}


def _load_machine(doc: dict):
    try:
        loader = _MACHINE_LOADERS[doc["type"]]
    except KeyError:
        raise SystemExit(_fail(EXIT_VALIDATION,
                               f"unknown machine type {doc.get('type')!r}"))
    return loader(doc)


def _load_probe(doc: dict, seed: int):
    kind = doc.get("type")
    if kind == "exhaustive":
        return ExhaustiveProbe()
    if kind == "depth":
        return DepthProbe(depth=int(doc["depth"]))
    if kind == "monte-carlo":
        return MonteCarloProbe(samples=int(doc["samples"]),
                               k_sigma=float(doc.get("k_sigma", 3.0)), seed=seed)
    raise SystemExit(_fail(EXIT_VALIDATION, f"unknown probe type {kind!r}"))


def run_fsm(cfg: dict, out_dir: Path, verbose: bool) -> int:
    from .machines import (ProbabilisticCombinatorialMachine, _freeze,
                           _thaw, as_stepper, sample_probabilistic)
    if "equivalence" in cfg:
        eq = cfg["equivalence"]
        m1, m2 = _load_machine(eq["m1"]), _load_machine(eq["m2"])
        res = equivalent(m1, m2, _load_probe(eq["probe"], cfg["seed"]))
        write_json(out_dir / "fsm_summary.json", {
            "kind": "fsm", "seed": cfg["seed"], "equivalent": res.ok,
            "witness": _thaw(res.witness) if res.witness is not None else None,
            "detail": res.detail})
        return EXIT_OK
    machine = _load_machine(cfg["machine"])
    xs = [_freeze(x) for x in cfg["inputs"]]
    if isinstance(machine, ProbabilisticCombinatorialMachine):
        ys = sample_probabilistic(machine, xs, seed=cfg["seed"])
    else:
        stepper = as_stepper(machine)
        ys = [stepper.step(x) for x in xs]
    rows = [[i, json.dumps(_thaw(x)), json.dumps(_thaw(y))]
            for i, (x, y) in enumerate(zip(xs, ys))]
    write_csv(out_dir / "fsm_trace.csv", ["cycle", "x", "y"], rows)
    write_json(out_dir / "fsm_summary.json", {
        "kind": "fsm", "seed": cfg["seed"],
        "outputs": [_thaw(y) for y in ys]})
    return EXIT_OK


def run_robot_train(tapes_path: str, out_path: str, seed: int) -> int:
    doc = load_config(tapes_path)
    try:
        jsonschema.validate(doc, SCHEMAS["robot-tapes"])
    except jsonschema.ValidationError as err:
        return _fail(EXIT_VALIDATION, f"tapes file invalid: {err.message}")
    brain = robot.Brain.fresh(seed=seed)
    robot.train(brain, doc["tapes"])
    out = Path(out_path)
    write_json(out, {"seed": seed, **brain.to_json()})
    print(f"trained on {len(doc['tapes'])} tapes: "
          f"AM rows={len(brain.am.prog)}, AS rows={len(brain.asim.prog)} -> {out}")
    return EXIT_OK


def run_robot_exam(brain_path: str, tape: str, mental: bool,
                   out_dir: Path, trace_path: str | None) -> int:
    brain = robot.Brain.from_json(load_config(brain_path))
    if mental:
        result = robot.exam_mental(brain, tape)
    else:
        result = robot.exam_real(brain, robot.TapeWorld(tape))
    rows = [[r.cycle, r.seen, r.uttered_fb, r.cmd.write, r.cmd.move,
             r.cmd.utter, r.source, r.sensory_source] for r in result.trace]
    trace_file = Path(trace_path) if trace_path else out_dir / "robot_exam_trace.csv"
    write_csv(trace_file, ["cycle", "seen", "uttered_fb", "cmd_write",
                           "cmd_move", "cmd_utter", "source", "sensory_source"], rows)
    summary = {"kind": "robot-exam", "tape": tape, "mental": mental,
               "verdict": result.verdict, "cycles": len(result.trace)}
    write_json(out_dir / "robot_exam_summary.json", summary)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _input_signal(doc) -> list:
    if not doc:
        return [(0.0, (0.0,))]
    return [(float(seg["t"]), tuple(seg["x"])) for seg in doc]


def run_pmm_master(cfg: dict, out_dir: Path) -> int:
    spec = pmm.pmm_spec_from_json(cfg["spec"])
    signal = _input_signal(cfg.get("input"))
    P = np.asarray(cfg["p0"], dtype=np.float64)
    dt, t_end = cfg["dt"], cfg["t_end"]
    rows = [[0.0, *P.tolist()]]
    t = 0.0
    seg = 0
    while t < t_end - 1e-12:
        while seg + 1 < len(signal) and signal[seg + 1][0] <= t + 1e-12:
            seg += 1
        P = pmm.master_step(P, signal[seg][1], spec, dt)
        t += dt
        rows.append([t, *P.tolist()])
    header = ["t"] + [f"P_{i}" for i in range(spec.n_states)]
    write_csv(out_dir / "pmm_master_trace.csv", header, rows)
    write_json(out_dir / "pmm_master_summary.json", {
        "kind": "pmm-master", "seed": cfg["seed"], "final_P": P.tolist(),
        "conservation_residual": pmm.conservation_residual(P)})
    return EXIT_OK


def run_pmm_path(cfg: dict, out_dir: Path) -> int:
    spec = pmm.pmm_spec_from_json(cfg["spec"])
    events = pmm.sample_path(spec, _input_signal(cfg.get("input")),
                             cfg["s0"], cfg["t_end"], seed=cfg["seed"])
    write_csv(out_dir / "pmm_path_trace.csv", ["time", "state"],
              [[t, s] for t, s in events])
    write_json(out_dir / "pmm_path_summary.json", {
        "kind": "pmm-path", "seed": cfg["seed"],
        "transitions": len(events) - 1, "final_state": events[-1][1]})
    return EXIT_OK


def run_pmm_ghk(cfg: dict, out_dir: Path) -> int:
    ch = cfg["channel"]
    params = pmm.ChannelParams(permeabilities=tuple(ch["permeabilities"]),
                               z=int(ch.get("z", 1)), T=float(ch.get("T", 300.0)),
                               C_in=float(ch["C_in"]), C_out=float(ch["C_out"]))
    grid = np.linspace(cfg["v_min"], cfg["v_max"], cfg["v_steps"])
    n = len(params.permeabilities)
    rows = [[float(v)] + [pmm.ghk_current(float(v), j, params) for j in range(n)]
            for v in grid]
    write_csv(out_dir / "pmm_ghk_trace.csv",
              ["v"] + [f"I_{j}" for j in range(n)], rows)
    write_json(out_dir / "pmm_ghk_summary.json", {
        "kind": "pmm-ghk", "seed": cfg["seed"],
        "nernst_potential": pmm.nernst_potential(params)})
    return EXIT_OK


def _epmm_headers(sim: epmm.CoupledSim):
    header = ["t", "V"]
    for e_i, ens in enumerate(sim.ensembles):
        header += [f"n{e_i}_s{j}" for j in range(ens.spec.n_states)]
    header += [f"I_{e_i}" for e_i in range(len(sim.ensembles))]
    return header


def run_epmm(cfg: dict, out_dir: Path) -> int:
    ensembles = []
    for doc in cfg["ensembles"]:
        spec = pmm.pmm_spec_from_json(doc["spec"])
        occ = np.zeros(spec.n_states, dtype=np.int64)
        occ[doc.get("initial_state", 0)] = doc["N"]
        ensembles.append(epmm.Ensemble(spec, occ))
    mem_doc = cfg["membrane"]
    membrane = epmm.MembraneModel(
        c_m=mem_doc["c_m"], g_leak=mem_doc["g_leak"], e_leak=mem_doc["e_leak"],
        i_stim=epmm.pulse_current([tuple(p) for p in cfg.get("stimulus", [])]))
    links = [epmm.MessengerLink(source=ln["source"], target=ln["target"],
                                gain=ln["gain"], tau=ln["tau"])
             for ln in cfg.get("links", [])]
    sim = epmm.CoupledSim(membrane, ensembles, v0=cfg["v0"], seed=cfg["seed"],
                          links=links)
    n_initial = [ens.N for ens in sim.ensembles]
    rows = sim.run(cfg["t_end"], cfg["dt"], record_every=cfg.get("record_every", 1))
    write_csv(out_dir / "epmm_trace.csv", _epmm_headers(sim), rows)
    write_json(out_dir / "epmm_summary.json", {
        "kind": "epmm-run", "seed": cfg["seed"], "final_V": sim.v,
        "molecule_counts": [ens.N for ens in sim.ensembles],
        "molecules_conserved": [ens.N for ens in sim.ensembles] == n_initial})
    return EXIT_OK


def run_spike(cfg: dict, out_dir: Path) -> int:
    scale = cfg.get("scale", 1.0)
    t_end = cfg.get("t_end", 0.08)
    sup = epmm.spike_demo_sim(stimulus_scale=scale, seed=cfg["seed"])
    rows_sup = sup.run(t_end, epmm.SPIKE_DEMO_DT)
    sub = epmm.spike_demo_sim(stimulus_scale=0.1 * scale, seed=cfg["seed"])
    rows_sub = sub.run(t_end, epmm.SPIKE_DEMO_DT)
    write_csv(out_dir / "spike_trace.csv", _epmm_headers(sup), rows_sup)
    rest = epmm.SPIKE_DEMO_V0
    summary = {
        "kind": "epmm-spike", "seed": cfg["seed"], "nonpaper": True,
        "suprathreshold_peak_V": float(rows_sup[:, 1].max()),
        "subthreshold_peak_V": float(rows_sub[:, 1].max()),
        "excursion_ratio": float((rows_sup[:, 1].max() - rest)
                                 / (rows_sub[:, 1].max() - rest)),
        "na_inactive_peak": int(rows_sup[:, 6].max()),
        "final_V": float(rows_sup[-1, 1]),
    }
    write_json(out_dir / "spike_summary.json", summary)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def run_verify(names, seed: int, out_path: str | None) -> int:
    if names == ["all"]:
        names = verify.suite_names()
    unknown = [n for n in names if n not in verify.suite_names()]
    if unknown:
        return _fail(EXIT_VALIDATION,
                     f"unknown suite(s) {unknown}; available: "
                     f"{', '.join(verify.suite_names())}")
    reports = [verify.run_suite(n, seed=seed) for n in names]
    for rep in reports:
        for check in rep.checks:
            mark = "PASS" if check.passed else "FAIL"
            detail = f"  [{check.detail}]" if check.detail else ""
            print(f"{mark}  {rep.suite}: {check.name}{detail}")
    if out_path:
        write_json(Path(out_path), {"seed": seed,
                                    "reports": [r.to_json() for r in reports]})
    return EXIT_OK if all(r.passed for r in reports) else EXIT_ACCEPTANCE


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emachine",
        description="associative-network / E-machine / nanomachine-ensemble simulators")
    parser.add_argument("--out-dir", default=".", help="directory for output artifacts")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def config_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int, help="override the config seed")
        return p

    config_cmd("ann0", "clocked associative-network run")
    p_af = config_cmd("af", "associative-field run")
    p_af.add_argument("--mode", choices=["af0", "af1"],
                      help="override the config mode")
    p_af.add_argument("--trace", help="trace CSV path (default af_trace.csv)")
    config_cmd("fsm", "machine simulation or equivalence check")

    p_robot = sub.add_parser("robot", help="tape robot training and examination")
    robot_sub = p_robot.add_subparsers(dest="robot_command", required=True)
    p_train = robot_sub.add_parser("train")
    p_train.add_argument("--tapes", required=True)
    p_train.add_argument("--out", required=True)
    p_train.add_argument("--seed", type=int, default=0)
    p_exam = robot_sub.add_parser("exam")
    p_exam.add_argument("--brain", required=True)
    p_exam.add_argument("--tape", required=True)
    p_exam.add_argument("--mental", action="store_true")
    p_exam.add_argument("--trace")

    p_pmm = sub.add_parser("pmm", help="single-molecule runs")
    pmm_sub = p_pmm.add_subparsers(dest="pmm_command", required=True)
    for name in ("master", "path", "ghk"):
        p = pmm_sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int)

    p_epmm = sub.add_parser("epmm", help="ensemble runs")
    epmm_sub = p_epmm.add_subparsers(dest="epmm_command", required=True)
    for name in ("run", "spike"):
        p = epmm_sub.add_parser(name)
        p.add_argument("--config", required=(name == "run"))
        p.add_argument("--seed", type=int)
        if name == "spike":
            p.add_argument("--scale", type=float)

    p_verify = sub.add_parser("verify", help="run named acceptance suites")
    p_verify.add_argument("suites", nargs="+",
                          help="suite names or 'all'")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", help="write the JSON report here")
    return parser


def _prepare(args, kind: str) -> dict:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    validate_config(cfg, kind)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out_dir)
    try:
        if args.command == "ann0":
            return run_ann0(_prepare(args, "ann0"), out_dir, args.verbose)
        if args.command == "af":
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg["seed"] = args.seed
            if args.mode is not None:
                cfg["mode"] = args.mode
            validate_config(cfg, "af")
            return run_af(cfg, out_dir, args.verbose, trace_path=args.trace)
        if args.command == "fsm":
            return run_fsm(_prepare(args, "fsm"), out_dir, args.verbose)
        if args.command == "robot":
            if args.robot_command == "train":
                return run_robot_train(args.tapes, args.out, args.seed)
            return run_robot_exam(args.brain, args.tape, args.mental,
                                  out_dir, args.trace)
        if args.command == "pmm":
            cfg = _prepare(args, f"pmm-{args.pmm_command}")
            if args.pmm_command == "master":
                return run_pmm_master(cfg, out_dir)
            if args.pmm_command == "path":
                return run_pmm_path(cfg, out_dir)
            return run_pmm_ghk(cfg, out_dir)
        if args.command == "epmm":
            if args.epmm_command == "run":
                return run_epmm(_prepare(args, "epmm-run"), out_dir)
            cfg = load_config(args.config) if args.config else {"seed": 0}
            if args.seed is not None:
                cfg["seed"] = args.seed
            if args.scale is not None:
                cfg["scale"] = args.scale
            validate_config(cfg, "epmm-spike")
            return run_spike(cfg, out_dir)
        if args.command == "verify":
            return run_verify(args.suites, args.seed, args.out)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else EXIT_VALIDATION
    except EmachineError as err:
        return _fail(EXIT_RUNTIME, f"{type(err).__name__}: {err}")
    return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
