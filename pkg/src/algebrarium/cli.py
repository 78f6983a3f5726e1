"""Command-line pipeline: generate -> decompose -> simulate -> grade -> analyze -> report.

Every flag can also be set through an environment variable named
``ALGEBRARIUM_<FLAG>`` (upper case, dashes as underscores), e.g.
``ALGEBRARIUM_SEED=7``. Explicit flags win over the environment.

Exit codes: 0 ok, 2 configuration error, 3 I/O error, 4 malformed data,
5 insufficient data.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .analytics import DEFAULT_KS, analyze
from .errors import (
    AlgebrariumError, ConfigError, DataFormatError, DomainError, IdMismatch, InsufficientData,
    ParseError, ProfileMismatch,
)
from .report import emit_report, report_from_json, write_report_json
from .response_eval import (
    ClassificationConfig, grade_file, load_estimates, truth_table, write_estimates, write_responses,
)
from .simulator import AgentProfile, simulate_log
from .taskgen import (
    DEFAULT_COUNTS, GenerationConfig, decompose, generate_dataset, load_chains, load_tasks,
    write_chains, write_tasks,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ENV_PREFIX = "ALGEBRARIUM_"

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DATA, EXIT_INSUFFICIENT = 0, 2, 3, 4, 5


def _env(flag: str, default=None):
    return os.environ.get(ENV_PREFIX + flag.lstrip("-").upper().replace("-", "_"), default)


def _add(p: argparse.ArgumentParser, flag: str, help: str, default=None, **kw) -> None:
    p.add_argument(flag, default=_env(flag, default), help=f"{help} (env {ENV_PREFIX}"
                   f"{flag.lstrip('-').upper().replace('-', '_')})", **kw)


def _flag_bool(p: argparse.ArgumentParser, flag: str, help: str) -> None:
    env = _env(flag)
    default = env is not None and env.lower() not in ("", "0", "false", "no")
    p.add_argument(flag, action="store_true", default=default,
                   help=f"{help} (env {ENV_PREFIX}{flag.lstrip('-').upper().replace('-', '_')})")


# -------------------------------------------------------------- helpers ---

def _resolve(path, default_name: str) -> Path:
    p = Path(path)
    return p / default_name if p.is_dir() else p


def _read_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def parse_counts(spec: str, base: dict | None = None) -> dict:
    """``train=N`` sets depth 1, ``test=N`` sets depths 2-5, ``D=N`` sets depth D."""
    counts = dict(DEFAULT_COUNTS if base is None else base)
    for item in filter(None, (s.strip() for s in spec.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"bad --counts item {item!r}; expected key=value")
        try:
            n = int(value)
        except ValueError:
            raise ConfigError(f"bad count {value!r}") from None
        key = key.strip().lower()
        if key == "train":
            counts[1] = n
        elif key == "test":
            for d in (2, 3, 4, 5):
                counts[d] = n
        elif key.isdigit():
            counts[int(key)] = n
        else:
            raise ConfigError(f"bad --counts key {key!r}")
    return counts


def _parse_ks(spec) -> tuple:
    if spec is None:
        return DEFAULT_KS
    try:
        ks = tuple(int(k) for k in str(spec).split(",") if k.strip())
    except ValueError:
        raise ConfigError(f"bad --k-list {spec!r}") from None
    if not ks or min(ks) < 1:
        raise ConfigError("--k-list needs positive integers")
    return ks


def _class_cfg(args) -> ClassificationConfig:
    if not getattr(args, "config", None):
        return ClassificationConfig()
    raw = _read_toml(args.config)
    cfg = ClassificationConfig(int(raw.get("k_large", 128)), int(raw.get("k_min", 8)))
    if cfg.epsilon >= cfg.delta:
        raise ConfigError("k_large/k_min give epsilon >= delta")
    return cfg


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _write_manifest(outdir: Path, command: str, entry: dict) -> None:
    path = outdir / "manifest.json"
    manifest = {"tool_version": __version__, "commands": {}}
    if path.exists():
        try:
            manifest = json.loads(path.read_text(encoding="utf-8"))
            manifest.setdefault("commands", {})
        except json.JSONDecodeError:
            pass
    manifest["tool_version"] = __version__
    manifest["commands"][command] = entry
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _load_dataset(path):
    """Tasks plus chains (chains.jsonl beside tasks.jsonl when present, else recomputed)."""
    tasks_path = _resolve(path, "tasks.jsonl")
    tasks = load_tasks(tasks_path)
    by_id = {t.task_id: t for t in tasks}
    chains_path = tasks_path.parent / "chains.jsonl"
    if chains_path.exists():
        chains = {c.task_id: c for c in load_chains(chains_path, by_id)}
    else:
        chains = {t.task_id: decompose(t) for t in tasks if t.mode == "forward_eval"}
    return tasks, chains


# ------------------------------------------------------------- commands ---

def cmd_generate(args) -> int:
    started = _now()
    raw = _read_toml(args.config) if args.config else {}
    cfg_dict = dict(raw)
    if args.seed is not None:
        cfg_dict["seed"] = int(args.seed)
    if args.domains:
        cfg_dict["domains"] = [d for d in args.domains.split(",") if d.strip()]
    if args.counts:
        cfg_dict["counts"] = parse_counts(args.counts, cfg_dict.get("counts"))
    if args.no_reject_degenerate:
        cfg_dict["reject_degenerate"] = False
    if args.solve is not None:
        cfg_dict["solve_equation_count"] = int(args.solve)
    cfg = GenerationConfig.from_dict(cfg_dict)

    tasks = generate_dataset(cfg, workers=int(args.workers))
    chains = [decompose(t) for t in tasks if t.mode == "forward_eval"]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_tasks(out / "tasks.jsonl", tasks)
    write_chains(out / "chains.jsonl", chains)
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=1) + "\n", encoding="utf-8")
    _write_manifest(out, "generate", {
        "config_hash": cfg.config_hash(), "seed": cfg.seed,
        "inputs": [str(args.config)] if args.config else [],
        "outputs": ["tasks.jsonl", "chains.jsonl", "config.json"],
        "started": started, "finished": _now(),
    })
    n_train = sum(t.split == "train" for t in tasks)
    print(f"wrote {len(tasks)} tasks ({n_train} train / {len(tasks) - n_train} test) to {out}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    started = _now()
    src = _resolve(args.input or ".", "tasks.jsonl")
    tasks = load_tasks(src)
    chains = [decompose(t) for t in tasks if t.mode == "forward_eval"]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_chains(out / "chains.jsonl", chains)
    _write_manifest(out, "decompose", {
        "inputs": [str(src)], "outputs": ["chains.jsonl"], "started": started, "finished": _now(),
    })
    print(f"wrote {len(chains)} chains to {out / 'chains.jsonl'}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = _now()
    if not args.profile:
        raise ConfigError("simulate needs --profile")
    prof = AgentProfile.load(args.profile)
    if args.seed is not None:
        prof = AgentProfile(prof.label, prof.step_success, int(args.seed), prof.error_model,
                            prof.step_overrides)
    tasks, chains = _load_dataset(args.input or ".")
    if args.split != "all":
        tasks = [t for t in tasks if t.split == args.split]
    n = int(args.n)
    records = simulate_log(tasks, chains, prof, n=n, atomic=not args.no_atomic)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_responses(out / "responses.jsonl", records)
    _write_manifest(out, "simulate", {
        "seed": prof.seed, "profile": prof.label, "n": n,
        "inputs": [str(args.input or "."), str(args.profile)], "outputs": ["responses.jsonl"],
        "started": started, "finished": _now(),
    })
    print(f"wrote {len(records)} response records ({n} samples each) to {out / 'responses.jsonl'}")
    return EXIT_OK


def cmd_grade(args) -> int:
    started = _now()
    src = _resolve(args.input or ".", "responses.jsonl")
    tasks, chains = _load_dataset(args.tasks or src.parent)
    cfg = _class_cfg(args)
    estimates = grade_file(src, truth_table(tasks, chains.values()), cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_estimates(out / "estimates.jsonl", estimates)
    _write_manifest(out, "grade", {
        "inputs": [str(src), str(args.tasks or src.parent)], "outputs": ["estimates.jsonl"],
        "k_large": cfg.k_large, "k_min": cfg.k_min, "started": started, "finished": _now(),
    })
    print(f"graded {len(estimates)} records -> {out / 'estimates.jsonl'}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    started = _now()
    cfg = _class_cfg(args)
    ks = _parse_ks(args.k_list)
    compare = None
    inputs = []
    if args.compare:
        base_path, post_path = (_resolve(p, "estimates.jsonl") for p in args.compare)
        compare = (load_estimates(base_path, cfg), load_estimates(post_path, cfg))
        inputs += [str(base_path), str(post_path)]
    if args.input:
        src = _resolve(args.input, "estimates.jsonl")
        estimates = load_estimates(src, cfg)
        inputs.append(str(src))
    elif compare is not None:
        estimates = compare[1]
    else:
        raise ConfigError("analyze needs --in or --compare")
    if args.tasks:
        tasks, chains = _load_dataset(args.tasks)
        inputs.append(str(args.tasks))
    else:
        tasks, chains = [], {}
    report = analyze(estimates, tasks, chains, ks=ks, cfg=cfg, compare=compare)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"config_hash": _hash_inputs(inputs, ks, cfg), "seed": args.seed if args.seed is not None else "na"}
    write_report_json(out / "analysis.json", report)
    (out / "analysis.meta.json").write_text(json.dumps(meta) + "\n", encoding="utf-8")
    written = emit_report(report, out, meta, plots=False)
    _write_manifest(out, "analyze", {
        **meta, "inputs": inputs, "outputs": ["analysis.json"] + [p.name for p in written],
        "started": started, "finished": _now(),
    })
    if report.curve_mse is not None:
        print(f"pass@k curve MSE: {report.curve_mse:.3e}")
    if report.correlation is not None:
        print(f"process/outcome pearson: {report.correlation:.4f}")
    if report.emergence is not None:
        em = report.emergence
        print(f"emergence: {em.recovered_count}/{em.null_count_base} Null tasks recovered "
              f"({em.recovery_rate:.3f})")
    print(f"wrote analysis to {out}")
    return EXIT_OK


def _hash_inputs(inputs, ks, cfg) -> str:
    h = hashlib.sha256()
    for p in inputs:
        h.update(Path(p).read_bytes() if Path(p).is_file() else str(p).encode())
    h.update(repr((tuple(ks), cfg.k_large, cfg.k_min)).encode())
    return h.hexdigest()[:16]


def cmd_report(args) -> int:
    started = _now()
    src = _resolve(args.input or ".", "analysis.json")
    try:
        data = json.loads(src.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON ({exc.msg})", src, exc.lineno) from None
    meta_path = src.parent / "analysis.meta.json"
    meta = json.loads(meta_path.read_text(encoding="utf-8")) if meta_path.exists() else {}
    out = Path(args.out)
    written = emit_report(report_from_json(data), out, meta, plots=True)
    _write_manifest(out, "report", {
        **meta, "inputs": [str(src)], "outputs": [p.name for p in written],
        "started": started, "finished": _now(),
    })
    print(f"wrote {len(written)} report files to {out}")
    return EXIT_OK


# --------------------------------------------------------------- parser ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="algebrarium",
        description="Synthetic group-algebra reasoning tasks, grading, simulation and Pass@k analytics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build tasks.jsonl and chains.jsonl")
    _add(p, "--seed", "global seed", type=int)
    _add(p, "--out", "output directory", default=".")
    _add(p, "--config", "TOML file with generation settings")
    _add(p, "--domains", "comma-separated domains (default: all four)")
    _add(p, "--counts", "per-depth counts: train=N, test=N or D=N, comma-separated")
    _add(p, "--workers", "worker processes", default=1, type=int)
    _add(p, "--solve", "depth-1 equation tasks per domain", type=int)
    _flag_bool(p, "--no-reject-degenerate", "keep tasks whose answer is the identity or an operand")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("decompose", help="recompute chains.jsonl from tasks.jsonl")
    _add(p, "--in", "tasks.jsonl or its directory", dest="input")
    _add(p, "--out", "output directory", default=".")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("simulate", help="sample responses from a fixed-step-probability agent")
    _add(p, "--in", "dataset directory (tasks.jsonl, chains.jsonl)", dest="input")
    _add(p, "--profile", "agent profile TOML (label, seed, per-domain probabilities)")
    _add(p, "--seed", "override the profile seed", type=int)
    _add(p, "--n", "samples per task", default=128, type=int)
    _add(p, "--split", "which split to simulate", default="all", choices=("all", "train", "test"))
    _flag_bool(p, "--no-atomic", "skip per-step atomic records")
    _add(p, "--out", "output directory", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("grade", help="grade responses.jsonl into estimates.jsonl")
    _add(p, "--in", "responses.jsonl or its directory", dest="input")
    _add(p, "--tasks", "dataset directory or tasks.jsonl (default: beside --in)")
    _add(p, "--config", "TOML with k_large / k_min")
    _add(p, "--out", "output directory", default=".")
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("analyze", help="compute curves, census, barrier fit, correlation, emergence")
    _add(p, "--in", "estimates.jsonl or its directory", dest="input")
    _add(p, "--tasks", "dataset directory or tasks.jsonl")
    _add(p, "--compare", "base and post estimates for emergence/shift analysis", nargs=2,
         metavar=("BASE", "POST"))
    _add(p, "--k-list", "comma-separated k values", dest="k_list")
    _add(p, "--config", "TOML with k_large / k_min")
    _add(p, "--seed", "seed recorded in report metadata", type=int)
    _add(p, "--out", "output directory", default=".")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("report", help="render CSV tables and SVG plots from analysis.json")
    _add(p, "--in", "analysis.json or its directory", dest="input")
    _add(p, "--out", "output directory", default=".")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if isinstance(getattr(args, "compare", None), str):
        args.compare = args.compare.split()
    try:
        return args.func(args)
    except (DataFormatError, IdMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InsufficientData as exc:
        print(f"error: insufficient data: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except (ConfigError, ParseError, DomainError, ProfileMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except AlgebrariumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
