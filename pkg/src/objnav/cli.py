"""Command-line harness.

Subcommands: datagen, train, ioe-train, eval, bench, ablate, blur-bench, run.
Every subcommand writes a machine-readable artifact (CSV/JSON) carrying the
seed in its header plus a short human summary on stdout.

Exit codes: 0 success, 1 usage error, 2 post-condition failure, 3 bridge
failure. Bridge endpoints may come from flags or the OBJNAV_LLM_BRIDGE /
OBJNAV_DETECTOR_BRIDGE environment variables. A JSON config file can supply
any defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .errors import BridgeError, ObjnavError
from .lexicon import default_lexicon

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_POSTCONDITION = 2
EXIT_BRIDGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


class UsageError(ObjnavError):
    pass


def _write_lines(path: Path, seed: int, header: str, rows: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join([f"# seed={seed}", header, *rows]) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# --------------------------------------------------------------------- datagen

def cmd_datagen(args) -> int:
    from .datagen import generate_dataset, generate_thresholds
    from .datagen.writer import write_stats

    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    thresholds = None
    if args.threshold_seeds:
        seeds = {k: float(v) for k, v in
                 (item.split("=") for item in args.threshold_seeds.split(","))}
        thresholds = generate_thresholds(seeds)
    t0 = time.perf_counter()
    stats = generate_dataset(args.n, args.seed, args.out, workers=args.workers,
                             thresholds=thresholds)
    elapsed = time.perf_counter() - t0
    stats_path = Path(args.stats_out or (str(args.out) + ".stats.json"))
    write_stats(stats, stats_path)
    if args.thresholds_out:
        _write_json(Path(args.thresholds_out),
                    {"seed": args.seed, "thresholds": stats.thresholds})
    print(f"datagen: {args.n} samples -> {args.out} in {elapsed:.1f}s "
          f"({stats.samples_per_s:.0f}/s), {stats.duplicates_dropped} dups dropped")
    return EXIT_OK


# ----------------------------------------------------------------------- train

def _load_arrays(corpus: str, limit: int | None, config, vocab):
    from .model.data import load_training_arrays

    return load_training_arrays(corpus, vocab, config, limit=limit)


def cmd_train(args) -> int:
    from .model import build_vocab, save_checkpoint
    from .model.config import preset
    from .model.train import TrainSettings, train

    if args.beta is not None and args.beta <= 0:
        raise UsageError(f"--beta must be positive, got {args.beta}")
    config = preset(args.preset, use_sep=not args.no_sep)
    vocab = build_vocab()
    data = _load_arrays(args.corpus, args.n, config, vocab)
    settings = TrainSettings(
        epochs=args.epochs, batch_size=args.batch_size, lr=args.lr,
        beta=args.beta if args.beta is not None else 10.0,
        seed=args.seed, log_path=args.log,
    )
    result = train(data, config, vocab, settings)
    ckpt = result.checkpoint
    ckpt.metadata["preset"] = args.preset
    ckpt.metadata["corpus"] = str(args.corpus)
    save_checkpoint(args.out, ckpt)
    best = result.best
    print(f"train: preset={args.preset} n={len(data['tokens'])} "
          f"epochs={args.epochs} -> {args.out}")
    print(f"  best epoch {best.epoch}: val_loss={best.val_loss:.6f} "
          f"val_state_acc={best.val_state_acc:.4f}")
    return EXIT_OK


def cmd_ioe_train(args) -> int:
    from .datagen.templates import InstructionTemplate, SPEED_GRID, vary_instruction
    from .model import build_vocab, save_checkpoint
    from .model.config import ioe_config
    from .model.train import TrainSettings, train
    from .model.vocab import tokenize_instruction

    lexicon = default_lexicon()
    vocab = build_vocab(lexicon)
    config = ioe_config(len(lexicon.classes))
    template = InstructionTemplate(lexicon=lexicon)
    rng = np.random.default_rng(args.seed)
    tokens = np.zeros((args.n, config.max_seq_len), dtype=np.int32)
    labels = np.zeros(args.n, dtype=np.int64)
    for i in range(args.n):
        cls_idx = i % len(lexicon.classes)
        speed = SPEED_GRID[rng.integers(len(SPEED_GRID))]
        text = vary_instruction(template, lexicon.classes[cls_idx], speed, rng)
        tokens[i] = tokenize_instruction(text, vocab, config.max_seq_len)
        labels[i] = cls_idx
    data = {"tokens": tokens, "object": labels}
    settings = TrainSettings(epochs=args.epochs, batch_size=args.batch_size,
                             lr=args.lr, beta=1.0, seed=args.seed,
                             log_path=args.log)
    result = train(data, config, vocab, settings)
    ckpt = result.checkpoint
    ckpt.metadata["classes"] = list(lexicon.classes)
    ckpt.metadata["kind"] = "instruction-object-extractor"
    save_checkpoint(args.out, ckpt)
    print(f"ioe-train: n={args.n} epochs={args.epochs} -> {args.out} "
          f"(val acc {result.best.val_state_acc:.4f})")
    return EXIT_OK


# ------------------------------------------------------------------------ eval

def cmd_eval(args) -> int:
    from .model import load_checkpoint
    from .model.infer import model_of
    from .model.metrics import eval_speed_metrics, grad_check
    from .model.train import evaluate, split_indices

    report: dict = {"seed": args.seed}
    failures = []

    if args.grad_check:
        from .model import build_vocab
        from .model.config import ModelConfig
        from .model.vocab import EncoderInput, tokenize

        vocab = build_vocab()
        config = ModelConfig(feature_dim=16, layers=1, heads=2,
                             feedforward_dim=32, dropout=0.0, dtype="float64")
        rng = np.random.default_rng(args.seed)
        inp = EncoderInput(
            prev_instruction="go to the chair at 0.40 m/s",
            instruction="go to the chair at 0.40 m/s",
            obj="chair", confidence=0.8, center=(0.4, 0.5), size=(0.2, 0.3),
        )
        tokens = np.stack([tokenize(inp, vocab, config.max_seq_len)] * 2)
        targets = {
            "motion": rng.normal(0.2, 0.1, size=(2, 3)),
            "mission": np.array([1, 1]),
            "search": np.array([1, 0]),
        }
        err = grad_check(config, len(vocab), tokens, targets)
        report["grad_check_max_rel_error"] = err
        if err > 1e-4:
            failures.append(f"grad check error {err:.3e} > 1e-4")

    if args.ckpt:
        ckpt = load_checkpoint(args.ckpt)
        model = model_of(ckpt)
        if not args.corpus:
            raise UsageError("eval with --ckpt needs --corpus")
        data = _load_arrays(args.corpus, args.n, ckpt.config, ckpt.vocab)
        if len(data["tokens"]) == 0:
            raise UsageError("evaluation corpus is empty")
        split_seed = args.split_seed if args.split_seed is not None \
            else int(ckpt.metadata.get("seed", 0))
        _, val_idx = split_indices(len(data["tokens"]), split_seed)
        val_loss, state_acc, _ = evaluate(model, data, val_idx,
                                          beta=float(ckpt.metadata.get("beta", 10.0)))
        running = val_idx[(data["mission"][val_idx] == 1)
                          & (data["motion"][val_idx, 0] == np.float32(args.v_star))]
        sigma_v, eps_v = eval_speed_metrics(model, data["tokens"][running],
                                            args.v_star)
        report.update(
            checkpoint=str(args.ckpt), val_loss=val_loss, state_acc=state_acc,
            sigma_v=sigma_v, eps_v=eps_v, v_star=args.v_star,
            eval_samples=int(len(val_idx)), speed_samples=int(len(running)),
        )
        if args.expect_state_acc is not None and state_acc < args.expect_state_acc:
            failures.append(f"state acc {state_acc:.4f} < {args.expect_state_acc}")
        if args.expect_eps is not None and eps_v > args.expect_eps:
            failures.append(f"eps_v {eps_v:.4f} > {args.expect_eps}")

    if not args.grad_check and not args.ckpt:
        raise UsageError("eval needs --ckpt and/or --grad-check")
    if args.out:
        _write_json(Path(args.out), report)
    print("eval: " + json.dumps(report, sort_keys=True))
    for f in failures:
        print(f"eval FAILED: {f}", file=sys.stderr)
    return EXIT_POSTCONDITION if failures else EXIT_OK


# ----------------------------------------------------------------------- bench

def _policy_factory(args, states_mode: str = "four", gate: bool = True):
    from .executor import Policy

    checkpoint = None
    if args.policy == "learned":
        if not args.ckpt:
            raise UsageError("--policy learned requires --ckpt")
        from .model import load_checkpoint

        checkpoint = load_checkpoint(args.ckpt)
    elif args.policy not in ("oracle", "rule"):
        raise UsageError(f"unknown policy {args.policy!r}")

    def factory():
        return Policy(mode="learned" if checkpoint else "rule",
                      checkpoint=checkpoint, states_mode=states_mode,
                      gate_enabled=gate)
    return factory


def cmd_bench(args) -> int:
    from .sim import SUITES, run_benchmark
    from .sim.episodes import BENCH_CSV_HEADER

    suites = list(SUITES) if args.suite == "all" else [args.suite]
    for s in suites:
        if s not in SUITES:
            raise UsageError(f"unknown suite {s!r}; choose from {SUITES}")
    factory = _policy_factory(args)
    rows = []
    summary = []
    for suite in suites:
        mean_el, sr, episodes = run_benchmark(
            factory, suite, trials=args.trials, base_seed=args.seed)
        rows += [e.csv_row() for e in episodes]
        summary.append((suite, mean_el, sr))
        print(f"bench[{suite}]: mean EL {mean_el:.2f}, SR {sr:.2f} "
              f"({args.trials} trials)")
    if args.out:
        _write_lines(Path(args.out), args.seed, BENCH_CSV_HEADER, rows)
    if args.assert_sr is not None:
        bad = [s for s, _, sr in summary if sr < args.assert_sr]
        if bad:
            print(f"bench FAILED: SR below {args.assert_sr} on {bad}",
                  file=sys.stderr)
            return EXIT_POSTCONDITION
    if args.assert_el is not None:
        bad = [s for s, el, _ in summary if el < args.assert_el]
        if bad:
            print(f"bench FAILED: mean EL below {args.assert_el} on {bad}",
                  file=sys.stderr)
            return EXIT_POSTCONDITION
    return EXIT_OK


def cmd_ablate(args) -> int:
    from .sim import run_search_ablation
    from .sim.ablation import (ABLATION_CSV_HEADER, DEFAULT_CLASSES,
                               EXTENDED_CLASSES)

    if args.grid == "full":
        classes = DEFAULT_CLASSES
    elif args.grid == "extended":
        classes = EXTENDED_CLASSES
    else:
        raise UsageError(f"unknown grid {args.grid!r} (full|extended)")
    cells = run_search_ablation(classes=classes, trials=args.trials,
                                base_seed=args.seed)
    if args.out:
        _write_lines(Path(args.out), args.seed, ABLATION_CSV_HEADER,
                     [c.csv_row() for c in cells])
    for c in cells:
        print(f"ablate[{c.states},gate={int(c.gate)},{c.difficulty},"
              f"{c.distance:g}m]: N_s {c.mean_ns:.2f}, T_s {c.mean_ts:.2f}s, "
              f"success {c.success_rate:.2f}")
    if args.assert_trends:
        problems = _check_ablation_trends(cells)
        if problems:
            for p in problems:
                print(f"ablate FAILED: {p}", file=sys.stderr)
            return EXIT_POSTCONDITION
    return EXIT_OK


def _check_ablation_trends(cells) -> list[str]:
    by = {(c.states, c.gate, c.difficulty, c.distance): c for c in cells}
    problems = []
    for c in cells:
        if c.difficulty == "person" and abs(c.mean_ns - 1.0) > 1e-9:
            problems.append(f"person N_s {c.mean_ns} != 1.0 in {c.states}/"
                            f"gate={c.gate}/{c.distance}m")
        if c.states == "four" and c.gate and abs(c.mean_ns - 1.0) > 1e-9:
            problems.append(f"gated N_s {c.mean_ns} != 1.0 for "
                            f"{c.difficulty}/{c.distance}m")
    for dist in {c.distance for c in cells}:
        try:
            t3 = by[("three", False, "backpack", dist)].mean_ts
            t4 = by[("four", False, "backpack", dist)].mean_ts
            t4g = by[("four", True, "backpack", dist)].mean_ts
        except KeyError:
            continue
        if not (t3 > t4 > t4g):
            problems.append(
                f"backpack T_s ordering violated at {dist}m: "
                f"three/no-gate {t3:.1f}, four/no-gate {t4:.1f}, "
                f"four/gated {t4g:.1f}")
    return problems


# ------------------------------------------------------------------ blur bench

def cmd_blur_bench(args) -> int:
    from .perception.corpus import (BLUR_CSV_HEADER, evaluate_blur_corpus,
                                    generate_blur_corpus)

    corpus = args.corpus
    if args.generate:
        corpus = args.corpus or "blur_corpus"
        generate_blur_corpus(corpus, n=args.generate,
                             blur_fraction=args.blur_fraction, seed=args.seed)
        print(f"blur-bench: generated {args.generate} frames "
              f"({args.blur_fraction:.0%} blurred) in {corpus}")
    if not corpus:
        raise UsageError("blur-bench needs --corpus or --generate")
    thresholds = [float(t) for t in args.thresholds.split(",")]
    rows = evaluate_blur_corpus(corpus, thresholds)
    if args.out:
        _write_lines(Path(args.out), args.seed, BLUR_CSV_HEADER,
                     [r.csv_row() for r in rows])
    for r in rows:
        print(f"T={r.threshold:g}: flagged {r.flagged_fraction:.3f} "
              f"P {r.precision:.3f} R {r.recall:.3f} "
              f"qualified {r.qualified_raw:.3f} -> {r.qualified_gated:.3f}")
    if args.assert_t150:
        row = next((r for r in rows if abs(r.threshold - 150.0) < 1e-9), None)
        if row is None:
            raise UsageError("--assert-t150 requires 150 in --thresholds")
        ok = row.precision >= 0.99 and row.recall >= 0.99
        if not ok:
            print(f"blur-bench FAILED: P/R at 150 = {row.precision:.3f}/"
                  f"{row.recall:.3f}", file=sys.stderr)
            return EXIT_POSTCONDITION
    return EXIT_OK


# ------------------------------------------------------------------------- run

def cmd_run(args) -> int:
    from .bridge import LineBridge
    from .planner import LongHorizonTask, plan

    llm_endpoint = args.llm_bridge or os.environ.get("OBJNAV_LLM_BRIDGE")
    bridge = None
    backend = "template"
    if args.planner == "bridge":
        if not llm_endpoint:
            raise UsageError("--planner bridge needs --llm-bridge or "
                             "OBJNAV_LLM_BRIDGE")
        bridge = LineBridge(llm_endpoint, timeout=args.bridge_timeout)
        backend = "bridge"
    task = LongHorizonTask(text=args.task)
    try:
        instructions = plan(task, backend=backend, bridge=bridge)
    finally:
        if bridge is not None:
            bridge.close()
    print(f"run: {len(instructions)} subtasks planned")
    if args.mode == "sim":
        return _run_sim(args, instructions)
    if args.mode == "live":
        return _run_live(args, instructions)
    raise UsageError(f"unknown mode {args.mode!r} (sim|live)")


def _run_sim(args, instructions) -> int:
    from .executor import TickTrace
    from .planner import Mission
    from .sim import run_episode
    from .sim.scripts import make_script

    factory = _policy_factory(args)
    mission = Mission(instructions=instructions)
    trace_rows: list[str] = []
    subtasks = []
    tick_base = 0
    while not mission.done:
        idx = mission.index
        instr = mission.current
        rng = np.random.default_rng(np.random.SeedSequence((args.seed, idx)))
        bearing = float(rng.uniform(-120.0, 120.0))
        distance = float(rng.uniform(3.0, 5.0))
        script = make_script("wander", rng)
        policy = factory()

        base = tick_base

        def on_tick(t, world, det, cmd, state, _base=base):
            trace_rows.append(TickTrace(_base + t, _active_name(state), cmd,
                                        det).csv_row())

        result = run_episode(policy, instr, script, "navigation",
                             seed=args.seed + idx,
                             start_bearing_deg=bearing,
                             start_distance=distance,
                             max_ticks=args.subtask_timeout_ticks,
                             on_tick=on_tick)
        tick_base += result.ticks
        subtasks.append({
            "text": instr.text, "class": instr.target_class,
            "speed": instr.speed, "success": result.success,
            "ticks": result.ticks, "t_s": result.t_s, "n_s": result.n_s,
        })
        print(f"  subtask {idx}: {'success' if result.success else 'FAILED'} "
              f"in {result.t_s:.1f}s (N_s={result.n_s})")
        if result.success:
            mission.report("success")  # advances or completes the plan
        else:
            if args.stop_on_fail:
                break
            mission.report("success")  # move on per config, marked failed
    ok = all(s["success"] for s in subtasks) and len(subtasks) == len(instructions)
    _write_run_artifacts(args, subtasks, trace_rows, ok)
    return EXIT_OK if ok else EXIT_POSTCONDITION


def _active_name(state) -> str:
    return state.search_state if state.searching else state.mission_state


def _run_live(args, instructions) -> int:
    from .bridge import DetectorBridge, LineBridge
    from .executor import TRACE_HEADER, TickTrace, step as exec_step, ExecState
    from .perception import DetectionSmoother, FrameGate, read_ppm

    endpoint = args.detector_bridge or os.environ.get("OBJNAV_DETECTOR_BRIDGE")
    if not endpoint:
        raise UsageError("--mode live needs --detector-bridge or "
                         "OBJNAV_DETECTOR_BRIDGE")
    if not args.frames:
        raise UsageError("--mode live needs --frames (directory of PPM files)")
    frames = sorted(Path(args.frames).glob("*.ppm"))
    if not frames:
        raise UsageError(f"no .ppm frames under {args.frames}")

    detector = DetectorBridge(LineBridge(endpoint, timeout=args.bridge_timeout))
    gate = FrameGate(blur_threshold=args.blur_threshold)
    smoother = DetectionSmoother()
    trace_rows: list[str] = []
    subtasks = []
    state = ExecState(prev_instruction=instructions[0].text)
    idx = 0
    gate_paths: dict[int, Path] = {}
    last_clear_path: Path | None = None

    for t, path in enumerate(frames, start=1):
        if idx >= len(instructions):
            break
        instr = instructions[idx]
        frame = read_ppm(path)
        _, was_blur = gate.gate(frame)
        use_path = path if not was_blur else (last_clear_path or path)
        if not was_blur:
            last_clear_path = path
        dets = detector.detect(instr.target_class, t, ppm_path=str(use_path))
        det = max((d for d in dets if d.label == instr.target_class),
                  key=lambda d: d.confidence, default=None)
        det = smoother.smooth(det)
        cmd, state, fb = exec_step(state, instr, det)
        trace_rows.append(TickTrace(t, _active_name(state), cmd, det).csv_row())
        if fb.mission_state == "success":
            subtasks.append({"text": instr.text, "class": instr.target_class,
                             "speed": instr.speed, "success": True, "ticks": t})
            idx += 1
            smoother.reset()
    for instr in instructions[len(subtasks):]:
        subtasks.append({"text": instr.text, "class": instr.target_class,
                         "speed": instr.speed, "success": False,
                         "ticks": len(frames)})
    ok = all(s["success"] for s in subtasks)
    _write_run_artifacts(args, subtasks, trace_rows, ok)
    return EXIT_OK if ok else EXIT_POSTCONDITION


def _write_run_artifacts(args, subtasks, trace_rows, ok) -> None:
    from .executor import TRACE_HEADER

    if args.trace:
        _write_lines(Path(args.trace), args.seed, TRACE_HEADER, trace_rows)
    summary = {
        "seed": args.seed,
        "task": args.task,
        "mode": args.mode,
        "subtasks": subtasks,
        "succeeded": sum(s["success"] for s in subtasks),
        "total": len(subtasks),
        "all_success": ok,
    }
    if args.summary:
        _write_json(Path(args.summary), summary)
    print(f"run: {summary['succeeded']}/{summary['total']} subtasks succeeded")


# ------------------------------------------------------------------- arguments

def build_parser() -> _Parser:
    p = _Parser(prog="objnav", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", help="JSON file of default option values")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("datagen", help="generate a labeled training corpus")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--seed", type=int, required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--workers", type=int, default=1)
    d.add_argument("--stats-out")
    d.add_argument("--thresholds-out")
    d.add_argument("--threshold-seeds",
                   help="comma list like person=0.6,chair=0.5")
    d.set_defaults(func=cmd_datagen)

    t = sub.add_parser("train", help="train the motion model")
    t.add_argument("--corpus", required=True)
    t.add_argument("--n", type=int, help="use only the first N samples")
    t.add_argument("--seed", type=int, required=True)
    t.add_argument("--preset", default="small",
                   choices=["tiny", "small", "base", "large"])
    t.add_argument("--epochs", type=int, default=25)
    t.add_argument("--batch-size", type=int, default=512)
    t.add_argument("--lr", type=float, default=1e-4)
    t.add_argument("--beta", type=float, default=None)
    t.add_argument("--no-sep", action="store_true",
                   help="ablation: drop [SEP] tokens from encodings")
    t.add_argument("--out", required=True)
    t.add_argument("--log", help="training-curve CSV path")
    t.set_defaults(func=cmd_train)

    i = sub.add_parser("ioe-train", help="train the instruction-object extractor")
    i.add_argument("--n", type=int, default=40000)
    i.add_argument("--seed", type=int, required=True)
    i.add_argument("--epochs", type=int, default=6)
    i.add_argument("--batch-size", type=int, default=512)
    i.add_argument("--lr", type=float, default=1e-4)
    i.add_argument("--out", required=True)
    i.add_argument("--log")
    i.set_defaults(func=cmd_ioe_train)

    e = sub.add_parser("eval", help="evaluate a checkpoint / run the grad check")
    e.add_argument("--ckpt")
    e.add_argument("--corpus")
    e.add_argument("--n", type=int)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--split-seed", type=int)
    e.add_argument("--v-star", type=float, default=0.40)
    e.add_argument("--grad-check", action="store_true")
    e.add_argument("--expect-state-acc", type=float)
    e.add_argument("--expect-eps", type=float)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="tracking benchmark over the suites")
    b.add_argument("--policy", default="oracle")
    b.add_argument("--ckpt")
    b.add_argument("--suite", default="all")
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("--out")
    b.add_argument("--assert-sr", type=float)
    b.add_argument("--assert-el", type=float)
    b.set_defaults(func=cmd_bench)

    a = sub.add_parser("ablate", help="search-efficiency ablation grid")
    a.add_argument("--grid", default="full")
    a.add_argument("--trials", type=int, default=25)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out")
    a.add_argument("--assert-trends", action="store_true")
    a.set_defaults(func=cmd_ablate)

    bb = sub.add_parser("blur-bench", help="blur-gate threshold sweep")
    bb.add_argument("--corpus")
    bb.add_argument("--generate", type=int)
    bb.add_argument("--blur-fraction", type=float, default=0.3)
    bb.add_argument("--seed", type=int, default=0)
    bb.add_argument("--thresholds", default="0,50,100,150,250,400")
    bb.add_argument("--out")
    bb.add_argument("--assert-t150", action="store_true")
    bb.set_defaults(func=cmd_blur_bench)

    r = sub.add_parser("run", help="full pipeline: plan then execute subtasks")
    r.add_argument("--task", required=True)
    r.add_argument("--mode", default="sim")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--policy", default="oracle")
    r.add_argument("--ckpt")
    r.add_argument("--planner", default="template", choices=["template", "bridge"])
    r.add_argument("--llm-bridge")
    r.add_argument("--detector-bridge")
    r.add_argument("--bridge-timeout", type=float, default=10.0)
    r.add_argument("--frames", help="PPM directory (live mode camera)")
    r.add_argument("--blur-threshold", type=float, default=150.0)
    r.add_argument("--subtask-timeout-ticks", type=int, default=2700)
    r.add_argument("--stop-on-fail", action="store_true")
    r.add_argument("--trace")
    r.add_argument("--summary")
    r.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args, remaining = parser.parse_known_args(argv)
        if remaining:
            raise UsageError(f"unrecognized arguments: {remaining}")
        if args.config:
            defaults = json.loads(Path(args.config).read_text())
            parser.set_defaults(**defaults)
            args = parser.parse_args(argv)  # flags win over config defaults
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BridgeError as exc:
        print(f"bridge error: {exc}", file=sys.stderr)
        return EXIT_BRIDGE
    except ObjnavError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POSTCONDITION


if __name__ == "__main__":
    sys.exit(main())
