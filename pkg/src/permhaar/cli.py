"""Command-line interface.

Exit codes: 0 on success, 2 when an argument or config field is invalid,
3 when a resource guard refuses the computation.  Global flags may also be
set through ``PERMHAAR_SEED``, ``PERMHAAR_THREADS``, ``PERMHAAR_BUDGET`` and
``PERMHAAR_JSON``; explicit flags win.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import DomainError, ResourceGuardError, SingularSystemError
from .exact_moments import DEFAULT_BUDGET, Word, exact_mixed_moment, term_values
from .limits import FreeFamily, RDiagonalSpec, mixed_moment_limit, mixed_moment_terms, parse_spec
from .montecarlo import estimate_moments, randperm_experiment, singular_value_histogram
from .permutations import condition_report, family_at_size, parse_family
from .weingarten import wg_table

__all__ = ["main", "run", "ConfigError", "validate_config", "RunManifest", "SCHEMAS"]

SIMULATE_COLUMNS = ["N", "word", "mean_re", "mean_im", "stderr", "trials", "seed"]
CHECK_COLUMNS = ["family", "N", "X", "Y1", "Y2", "Y", "Z", "X_over_N2", "Y_over_N3", "Z_over_N4"]
SWEEP_COLUMNS = ["N", "word", "exact", "mc_mean_re", "mc_mean_im", "mc_stderr", "predicted",
                 "gap", "exact_gap", "trials", "seed"]
HIST_COLUMNS = ["N", "tag", "lo", "hi", "count"]


class ConfigError(DomainError):
    """Invalid configuration value; ``field`` names the offending entry."""

    def __init__(self, field: str, reason: str):
        super().__init__(f"invalid {field}: {reason}")
        self.field = field


# -- config schemas -------------------------------------------------------

_OUTPUT_KEYS = {"csv": str, "histograms": str, "histogram_bins": int, "histogram_trials": int}

SCHEMAS = {
    "simulate": {
        "word": ((str, list), True),
        "bindings": (dict, False),
        "sizes": (list, True),
        "trials": (int, True),
        "seed": (int, True),
        "outputs": (dict, False),
    },
    "sweep": {
        "word": ((str, list), True),
        "bindings": (dict, False),
        "sizes": (list, True),
        "trials": (int, True),
        "seed": (int, True),
        "specs": (dict, False),
        "exact": (bool, False),
        "outputs": (dict, False),
    },
}


def _is(value, types) -> bool:
    types = types if isinstance(types, tuple) else (types,)
    if isinstance(value, bool) and bool not in types:
        return False
    return isinstance(value, types)


def validate_config(config: dict, command: str) -> dict:
    """Check a config against the command's schema; unknown keys are rejected."""
    if not isinstance(config, dict):
        raise ConfigError("config", "must be a JSON object")
    schema = SCHEMAS[command]
    for key in config:
        if key not in schema:
            raise ConfigError(key, f"unknown key for {command}")
    for key, (types, required) in schema.items():
        if key not in config:
            if required:
                raise ConfigError(key, "missing required key")
            continue
        if not _is(config[key], types):
            raise ConfigError(key, f"wrong type {type(config[key]).__name__}")
    words = config["word"] if isinstance(config["word"], list) else [config["word"]]
    if not words or not all(isinstance(w, str) and w.strip() for w in words):
        raise ConfigError("word", "expected a non-empty word string or list of them")
    sizes = config["sizes"]
    if not sizes or not all(_is(n, int) and n >= 1 for n in sizes):
        raise ConfigError("sizes", "expected a non-empty list of positive integers")
    if config["trials"] < 1:
        raise ConfigError("trials", "must be positive")
    for tag, desc in config.get("bindings", {}).items():
        if tag == "id":
            raise ConfigError(f"bindings.{tag}", "'id' is reserved")
        if not isinstance(desc, str):
            raise ConfigError(f"bindings.{tag}", "expected a family descriptor string")
        try:
            parse_family(desc)
        except DomainError as exc:
            raise ConfigError(f"bindings.{tag}", str(exc)) from None
    for tag, desc in config.get("specs", {}).items():
        if not isinstance(desc, str):
            raise ConfigError(f"specs.{tag}", "expected a spec string")
        try:
            parse_spec(desc)
        except DomainError as exc:
            raise ConfigError(f"specs.{tag}", str(exc)) from None
    for key, value in config.get("outputs", {}).items():
        if key not in _OUTPUT_KEYS:
            raise ConfigError(f"outputs.{key}", "unknown key")
        if not _is(value, _OUTPUT_KEYS[key]):
            raise ConfigError(f"outputs.{key}", f"wrong type {type(value).__name__}")
    for text in words:
        try:
            w = Word.parse(text)
        except DomainError as exc:
            raise ConfigError("word", str(exc)) from None
        for tag, _ in w.letters:
            if tag != "id" and tag not in config.get("bindings", {}):
                raise ConfigError("bindings", f"tag {tag!r} used in the word is not bound")
    return config


# -- manifests ------------------------------------------------------------


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


class RunManifest:
    """Config hash, tool version, timestamps and output checksums of one run."""

    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.config_hash = hashlib.sha256(_canonical(config).encode()).hexdigest()
        self.started = _now()
        self.finished = None
        self.outputs: dict[str, str] = {}

    def record(self, path) -> None:
        self.outputs[str(path)] = _sha256_file(path)

    def to_json(self) -> dict:
        return {
            "tool": "permhaar",
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "config_hash": self.config_hash,
            "started": self.started,
            "finished": self.finished,
            "outputs": self.outputs,
        }

    def write(self, path) -> Path:
        self.finished = _now()
        path = Path(path)
        path.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")
        return path


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _manifest_path(output) -> Path:
    return Path(str(output) + ".manifest.json")


# -- formatting -----------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return repr(x)
    if x is None:
        return ""
    return str(x)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _emit_table(columns, rows, out_path, manifest: RunManifest | None, stdout, as_json, extra=None):
    text = _csv_text(columns, rows)
    if out_path:
        Path(out_path).write_text(text)
        manifest.record(out_path)
    if as_json:
        payload = {"rows": [{c: _jsonable(r[c]) for c in columns} for r in rows]}
        payload.update(extra or {})
        stdout.write(json.dumps(payload, indent=2) + "\n")
    elif not out_path:
        stdout.write(text)


def _jsonable(x):
    if isinstance(x, Fraction):
        return _fmt(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


# -- shared helpers -------------------------------------------------------


def _parse_bindings(items: Sequence[str] | None, field: str) -> dict[str, str]:
    out = {}
    for item in items or []:
        tag, sep, desc = item.partition("=")
        if not sep or not tag or not desc:
            raise ConfigError(field, f"expected tag=value, got {item!r}")
        if tag in out:
            raise ConfigError(field, f"tag {tag!r} bound twice")
        out[tag] = desc
    return out


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError("--sizes", f"expected comma-separated integers, got {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise ConfigError("--sizes", "expected positive sizes")
    return sizes


def _perm_at_size(desc: str, N: int):
    family, params = parse_family(desc)
    return family_at_size(family, N, **params)


def _word_at_size(text: str, bindings: dict[str, str], N: int) -> Word:
    perms = {}
    for tag, desc in bindings.items():
        family, params = parse_family(desc)
        try:
            perms[tag] = family_at_size(family, N, **params)
        except DomainError as exc:
            raise ConfigError(f"bindings.{tag}", f"at N={N}: {exc}") from None
    word = Word.parse(text, perms)
    word.resolve(N)
    return word


def _default_spec(desc: str) -> RDiagonalSpec:
    family, params = parse_family(desc)
    if family in ("identity", "transpose"):
        return RDiagonalSpec("haar_unitary")
    if family == "partial-transpose" and "b" in params and "d" not in params:
        return RDiagonalSpec("scaled_haar_sum", params["b"])
    if family in ("mixing", "random", "partial-transpose"):
        return RDiagonalSpec("circular")
    raise ConfigError("specs", f"no default limit for family {desc!r}; give one explicitly")


def _limit_family(bindings: dict[str, str], specs: dict[str, str], tags) -> FreeFamily:
    members = {}
    for tag in tags:
        if tag in specs:
            members[tag] = parse_spec(specs[tag])
        elif tag == "id":
            members[tag] = RDiagonalSpec("haar_unitary")
        else:
            members[tag] = _default_spec(bindings[tag])
    return FreeFamily(members)


def _load_config(path: str, command: str) -> dict:
    try:
        config = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"not valid JSON: {exc}") from None
    # a manifest re-runs its embedded config
    if isinstance(config, dict) and "config_hash" in config and "config" in config:
        if config.get("command") != command:
            raise ConfigError("--config", f"manifest was written by {config.get('command')!r}")
        config = config["config"]
    return validate_config(config, command)


# -- subcommands ----------------------------------------------------------


def cmd_wg(args, out) -> int:
    table = wg_table(args.n, args.N)
    values = table.to_json()
    if args.json:
        out.write(json.dumps({"n": args.n, "N": args.N, "values": values}, indent=2) + "\n")
    else:
        for key, value in values.items():
            out.write(f"{key} {value.removesuffix('/1')}\n")
    return 0


def cmd_check_perm(args, out) -> int:
    sizes = _parse_sizes(args.sizes)
    family, params = parse_family(args.family)
    for key in ("b", "d"):
        value = getattr(args, key)
        if value is not None:
            if family != "partial-transpose":
                raise ConfigError(f"--{key}", "only applies to the partial-transpose family")
            params[key] = value
    pair = parse_family(args.pair) if args.pair else None
    report = condition_report(family, sizes, params, pair, args.convention)
    rows = report.csv_rows()
    config = {"family": args.family, "params": params, "sizes": sizes, "pair": args.pair, "convention": args.convention}
    manifest = RunManifest("check-perm", config) if args.out else None
    extra = {"verdicts": report.verdicts(), "slopes": report.slopes(), "ratios": report.ratio_table()}
    _emit_table(CHECK_COLUMNS, rows, args.out, manifest, out, args.json, extra)
    if manifest:
        manifest.write(_manifest_path(args.out))
    return 0


def cmd_exact_moment(args, out) -> int:
    bindings = _parse_bindings(args.perm, "--perm")
    word = _word_at_size(args.word, bindings, args.N)
    value = exact_mixed_moment(word, args.N, args.budget, args.threads)
    terms = term_values(word, args.N, args.budget, args.threads) if args.terms else []
    if args.json:
        payload = {"word": str(word), "N": args.N, "value": _fmt(value)}
        if args.terms:
            payload["terms"] = [t.to_json() for t in terms]
        out.write(json.dumps(payload, indent=2) + "\n")
        return 0
    out.write(_fmt(value) + "\n")
    if args.terms:
        out.write(json.dumps([t.to_json() for t in terms], indent=2) + "\n")
    return 0


def cmd_predict(args, out) -> int:
    specs = _parse_bindings(args.spec, "--spec")
    word = Word.parse(args.word)
    members = {}
    for tag, _ in word.letters:
        if tag in specs:
            try:
                members[tag] = parse_spec(specs[tag])
            except DomainError as exc:
                raise ConfigError(f"--spec {tag}", str(exc)) from None
        elif tag == "id":
            members[tag] = RDiagonalSpec("haar_unitary")
        else:
            raise ConfigError("--spec", f"tag {tag!r} has no spec")
    family = FreeFamily(members)
    letters = list(word.letters)
    value = mixed_moment_limit(letters, family)
    terms = mixed_moment_terms(letters, family)
    if args.json:
        payload = {"word": str(word), "value": _fmt(value), "terms": [t.to_json() for t in terms]}
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(_fmt(value) + "\n")
        if args.terms:
            out.write(json.dumps([t.to_json() for t in terms], indent=2) + "\n")
    return 0


def _words(config) -> list[str]:
    return config["word"] if isinstance(config["word"], list) else [config["word"]]


def cmd_simulate(args, out) -> int:
    config = _load_config(args.config, "simulate")
    if args.seed is not None:
        config = {**config, "seed": args.seed}
    bindings = config.get("bindings", {})
    outputs = config.get("outputs", {})
    manifest = RunManifest("simulate", config)
    rows, hist_rows = [], []
    for N in config["sizes"]:
        words = [_word_at_size(text, bindings, N) for text in _words(config)]
        estimates = estimate_moments(words, N, config["trials"], config["seed"], args.threads)
        for word, est in zip(words, estimates):
            rows.append({"N": N, "word": str(word), "mean_re": est.mean.real, "mean_im": est.mean.imag,
                         "stderr": est.stderr, "trials": est.trials, "seed": config["seed"]})
        if outputs.get("histograms"):
            perms = {tag: _perm_at_size(desc, N) for tag, desc in bindings.items()}
            for tag, perm in sorted(perms.items()):
                hist = singular_value_histogram(perm, N, config["seed"], outputs.get("histogram_trials", 1),
                                                outputs.get("histogram_bins", 50))
                hist_rows += [{"N": N, "tag": tag, "lo": lo, "hi": hi, "count": c} for lo, hi, c in hist]
    if outputs.get("histograms"):
        Path(outputs["histograms"]).write_text(_csv_text(HIST_COLUMNS, hist_rows))
        manifest.record(outputs["histograms"])
    target = outputs.get("csv")
    _emit_table(SIMULATE_COLUMNS, rows, target, manifest, out, args.json)
    written = target or outputs.get("histograms")
    if written:
        manifest.write(_manifest_path(written))
    return 0


def cmd_randperm(args, out) -> int:
    stats = randperm_experiment(args.N, args.samples, args.seed if args.seed is not None else 0)
    rows = [{"statistic": k, "mean": stats.mean[k], "stderr": stats.stderr[k], "predicted": stats.predicted}
            for k in ("rr", "rc", "cr", "cc")]
    if args.json:
        payload = {"N": stats.N, "samples": stats.samples, "predicted": stats.predicted,
                   "per_pair_probability": 1 / (stats.N + 1), "mean": stats.mean, "stderr": stats.stderr}
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(_csv_text(["statistic", "mean", "stderr", "predicted"], rows))
    return 0


def cmd_sweep(args, out) -> int:
    config = _load_config(args.config, "sweep")
    if args.seed is not None:
        config = {**config, "seed": args.seed}
    bindings = config.get("bindings", {})
    specs = config.get("specs", {})
    for tag in specs:
        if tag != "id" and tag not in bindings:
            raise ConfigError(f"specs.{tag}", "tag is not bound")
    texts = _words(config)
    predicted = {}
    for text in texts:
        letters = Word.parse(text).letters
        family = _limit_family(bindings, specs, {t for t, _ in letters})
        predicted[text] = mixed_moment_limit(list(letters), family)
    manifest = RunManifest("sweep", config)
    rows = []
    for N in config["sizes"]:
        words = [_word_at_size(text, bindings, N) for text in texts]
        estimates = estimate_moments(words, N, config["trials"], config["seed"], args.threads)
        for text, word, est in zip(texts, words, estimates):
            exact = None
            if config.get("exact", True):
                try:
                    exact = exact_mixed_moment(word, N, args.budget, args.threads)
                except (ResourceGuardError, SingularSystemError):
                    exact = None
            pred = predicted[text]
            rows.append({
                "N": N, "word": str(word), "exact": exact,
                "mc_mean_re": est.mean.real, "mc_mean_im": est.mean.imag, "mc_stderr": est.stderr,
                "predicted": pred, "gap": abs(est.mean - float(pred)),
                "exact_gap": None if exact is None else abs(exact - pred),
                "trials": est.trials, "seed": config["seed"],
            })
    target = config.get("outputs", {}).get("csv")
    _emit_table(SWEEP_COLUMNS, rows, target, manifest, out, args.json)
    if target:
        manifest.write(_manifest_path(target))
    return 0


# -- argument parsing -----------------------------------------------------


def _env_int(name: str):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(name, f"expected an integer, got {raw!r}") from None


def _global_parser() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=None, help="master seed")
    g.add_argument("--threads", type=int, default=None, help="worker threads inside library calls")
    g.add_argument("--budget", type=int, default=None, help="max enumerated index tuples per exact term")
    g.add_argument("--json", action="store_true", default=None, help="machine-readable output")
    return g


def build_parser() -> argparse.ArgumentParser:
    g = _global_parser()
    parser = argparse.ArgumentParser(prog="permhaar", description="Permuted Haar unitary moments and limits.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wg", parents=[g], help="exact Weingarten table")
    p.add_argument("--n", type=int, required=True, help="order of the symmetric group")
    p.add_argument("--N", type=int, required=True, help="matrix size")
    p.set_defaults(func=cmd_wg)

    p = sub.add_parser("check-perm", parents=[g], help="permutation statistics over a size sweep")
    p.add_argument("--family", required=True, help="family descriptor, e.g. mixing or partial-transpose:2")
    p.add_argument("--sizes", required=True, help="comma-separated sizes")
    p.add_argument("--b", type=int, help="partial transpose block count (scaled with the size)")
    p.add_argument("--d", type=int, help="partial transpose block side (scaled with the size)")
    p.add_argument("--pair", help="second family for the pairwise ratios")
    p.add_argument("--convention", choices=("multiset", "set"), default="multiset")
    p.add_argument("--out", help="CSV output path (a manifest is written next to it)")
    p.set_defaults(func=cmd_check_perm)

    p = sub.add_parser("exact-moment", parents=[g], help="exact finite-N moment of a word")
    p.add_argument("--word", required=True)
    p.add_argument("--perm", action="append", help="binding tag=family[:params]; repeatable")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--terms", action="store_true", help="include the per-term breakdown")
    p.set_defaults(func=cmd_exact_moment)

    p = sub.add_parser("predict", parents=[g], help="large-N limit of a word in a free family")
    p.add_argument("--word", required=True)
    p.add_argument("--spec", action="append", help="tag=circular | haar-unitary | scaled-haar-sum:B")
    p.add_argument("--terms", action="store_true", help="print the partition breakdown as JSON")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", parents=[g], help="Monte Carlo estimates from a JSON config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("randperm-stats", parents=[g], help="pair-transfer counts of random permutations")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--samples", type=int, default=20000)
    p.set_defaults(func=cmd_randperm)

    p = sub.add_parser("sweep", parents=[g], help="exact, simulated and predicted values over sizes")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def _apply_env(args) -> None:
    for name in ("seed", "threads", "budget"):
        if getattr(args, name) is None:
            setattr(args, name, _env_int(f"PERMHAAR_{name.upper()}"))
    if args.json is None:
        args.json = os.environ.get("PERMHAAR_JSON", "").strip().lower() in ("1", "true", "yes")
    args.threads = args.threads or 1
    if args.threads < 1:
        raise ConfigError("--threads", "must be positive")
    if args.budget is None:
        args.budget = DEFAULT_BUDGET
    if args.budget < 1:
        raise ConfigError("--budget", "must be positive")


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_env(args)
        return args.func(args, stdout)
    except ResourceGuardError as exc:
        stderr.write(f"permhaar: resource guard: {exc}\n")
        return 3
    except (DomainError, SingularSystemError) as exc:
        stderr.write(f"permhaar: {exc}\n")
        return 2


run = main

if __name__ == "__main__":
    sys.exit(main())
