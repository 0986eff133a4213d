"""Command-line front end: ``prodmatrix {sample,kernel,limits,validate}``.

Every command writes a CSV (header line, 17 significant digits) and a JSON
manifest next to it holding the configuration, seed, version, UTC timestamp,
command line and SHA-256 digests of the outputs.  Both are written to a
temporary file first and renamed into place.

Configuration files are flat ``key = value`` text with ``#`` comments; the
keys are ``n``, ``m``, ``nus`` (comma separated), ``b``, ``seed`` and
``rtol``.  Relative output paths resolve against ``$PRODMATRIX_OUT_DIR``
when it is set.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import os
import re
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ProdMatrixError
from .kernel_finite import kernel_contour_grid, kernel_sum_grid
from .kernel_limit import (
    Interpolating,
    LimitRegime,
    Strong,
    Weak,
    kernel_ginibre_infinite_grid,
    kernel_interpolating_grid,
    verify_scaling_limit,
)
from .model import ModelConfig, RngStream, sample_configurations
from .validation import SUITES, run_suite

OUT_DIR_ENV = "PRODMATRIX_OUT_DIR"
CONFIG_KEYS = {"n", "m", "nus", "b", "seed", "rtol"}

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


# ------------------------------------------------------------ config and files

def read_config(path: str | os.PathLike) -> dict:
    """Parse a flat ``key = value`` file into typed values."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",))
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    raw = dict(parser["run"])
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    out = {}
    try:
        if "n" in raw:
            out["n"] = int(raw["n"])
        if "m" in raw:
            out["m"] = int(raw["m"])
        if "nus" in raw:
            out["nus"] = tuple(int(v) for v in raw["nus"].split(",") if v.strip())
        if "b" in raw:
            out["b"] = float(raw["b"])
        if "seed" in raw:
            out["seed"] = int(raw["seed"])
        if "rtol" in raw:
            out["rtol"] = float(raw["rtol"])
    except ValueError as exc:
        raise ConfigError(f"bad value in {path}: {exc}") from exc
    return out


def model_config(conf: dict) -> ModelConfig:
    for key in ("n", "m"):
        if key not in conf:
            raise ConfigError(f"config needs {key!r}")
    nus = conf.get("nus", (0,) * (conf["m"] - 1))
    return ModelConfig(conf["n"], conf["m"], nus, conf.get("b", 0.0))


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:count`` into an evenly spaced grid with ``start > 0``."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid spec must be start:stop:count, got {spec!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {spec!r}") from exc
    if not (start > 0 and stop >= start and count >= 1):
        raise ConfigError("grid needs 0 < start <= stop and count >= 1")
    return np.linspace(start, stop, count)


def resolve_out(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header: list, rows) -> str:
    """Write an RFC 4180 CSV atomically and return its SHA-256 digest."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    data = buf.getvalue().encode()
    _atomic_write(path, data)
    return hashlib.sha256(data).hexdigest()


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def write_manifest(out: Path, config: dict, digests: dict, seed=None) -> Path:
    doc = {
        "tool": "prodmatrix",
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "command_line": list(sys.argv),
        "config": config,
        "seed": seed,
        "outputs": digests,
    }
    path = manifest_path(out)
    _atomic_write(path, (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode())
    return path


def _config_snapshot(cfg: ModelConfig, extra: dict | None = None) -> dict:
    snap = {"n": cfg.n, "m": cfg.m, "nus": list(cfg.nus), "b": cfg.b}
    if extra:
        snap.update(extra)
    return snap


# ------------------------------------------------------------ commands

def cmd_sample(args) -> int:
    conf = read_config(args.config)
    cfg = model_config(conf)
    seed = args.seed if args.seed is not None else conf.get("seed", 0)
    if args.samples < 0:
        raise ConfigError("samples must be >= 0")
    data = sample_configurations(cfg, args.samples, RngStream(seed))
    header = ["sample"] + [f"y{l}_{j}" for l in range(1, cfg.m + 1) for j in range(1, cfg.n + 1)]
    rows = ([i] + list(data[i].ravel()) for i in range(data.shape[0]))
    out = resolve_out(args.out)
    digest = write_csv(out, header, rows)
    write_manifest(out, _config_snapshot(cfg, {"samples": args.samples}), {out.name: digest}, seed)
    print(f"wrote {data.shape[0]} samples to {out}")
    return EXIT_OK


_REP = re.compile(r"^(sum|contour|limit:ginibre|limit:interpolating\(([^)]+)\))$")


def _kernel_values(rep, r, s, xs, ys, cfg, rtol):
    if rep == "sum":
        return kernel_sum_grid(r, s, xs, ys, cfg)
    if rep == "contour":
        v, e, _ = kernel_contour_grid(r, s, xs, ys, cfg, rtol=rtol)
        return v, e
    if rep == "limit:ginibre":
        v, im = kernel_ginibre_infinite_grid(r, s, xs, ys, cfg.nus + (0,), rtol=rtol)
        return v, im
    alpha = float(_REP.match(rep).group(2))
    v, im = kernel_interpolating_grid(r, s, xs, ys, alpha, cfg.nus, rtol=rtol)
    return v, im


def cmd_kernel(args) -> int:
    conf = read_config(args.config)
    cfg = model_config(conf)
    rep = args.representation.replace(" ", "")
    if not _REP.match(rep):
        raise ConfigError(f"unknown representation {args.representation!r}")
    xs = parse_grid(args.grid)
    ys = parse_grid(args.ygrid) if args.ygrid else xs
    rtol = conf.get("rtol", 1e-10)
    v, e = _kernel_values(rep, args.r, args.s, xs, ys, cfg, rtol)
    pairs = [(i, i) for i in range(min(xs.size, ys.size))] if args.diagonal else \
        [(i, j) for i in range(xs.size) for j in range(ys.size)]
    header = ["x", "y", "K", "err_estimate"]
    extra = None
    if args.compare:
        other = args.compare.replace(" ", "")
        if not _REP.match(other):
            raise ConfigError(f"unknown representation {args.compare!r}")
        extra, _ = _kernel_values(other, args.r, args.s, xs, ys, cfg, rtol)
        header += ["K_compare", "rel_diff"]
    rows = []
    for i, j in pairs:
        row = [xs[i], ys[j], v[i, j], e[i, j]]
        if extra is not None:
            rel = abs(v[i, j] - extra[i, j]) / max(abs(extra[i, j]), 1e-300)
            row += [extra[i, j], rel]
        rows.append(row)
    out = resolve_out(args.out)
    digest = write_csv(out, header, rows)
    snap = _config_snapshot(cfg, {"r": args.r, "s": args.s, "representation": rep,
                                  "grid": args.grid, "ygrid": args.ygrid or args.grid,
                                  "compare": args.compare, "rtol": rtol})
    write_manifest(out, snap, {out.name: digest})
    print(f"wrote {len(rows)} kernel values to {out}")
    loose = int(np.sum(e > 1e-6 * np.maximum(np.abs(v), 1e-300)))
    if loose:
        print(f"warning: {loose} values have err_estimate above 1e-6 |K|; "
              "try --representation contour", file=sys.stderr)
    if extra is not None:
        worst = max(r[-1] for r in rows)
        print(f"max relative difference {worst:.3e}")
    return EXIT_OK


def parse_regime(text: str) -> LimitRegime:
    t = text.strip().lower()
    if t == "weak":
        return Weak()
    if t == "strong":
        return Strong()
    m = re.fullmatch(r"interpolating[:=(]\s*([^)]+)\)?", t)
    if m:
        return Interpolating(float(m.group(1)))
    raise ConfigError(f"unknown regime {text!r}; use weak, strong or interpolating:ALPHA")


def cmd_limits(args) -> int:
    conf = read_config(args.config)
    cfg = model_config(conf)
    regime = parse_regime(args.regime)
    ns = [int(v) for v in args.ns.split(",")]
    xs = parse_grid(args.grid)
    ys = parse_grid(args.ygrid) if args.ygrid else xs
    rep = verify_scaling_limit(regime, args.r, args.s, xs, ys, ns, cfg.m, cfg.nus)
    out = resolve_out(args.out)
    digest = write_csv(out, ["n", "b", "sup_distance"],
                       [[n, regime.coupling(n), d] for n, d in zip(rep.ns, rep.distances)])
    snap = _config_snapshot(cfg, {"regime": args.regime, "r": args.r, "s": args.s,
                                  "ns": ns, "grid": args.grid, "ygrid": args.ygrid or args.grid})
    write_manifest(out, snap, {out.name: digest})
    ok = rep.passed(args.threshold)
    for n, d in zip(rep.ns, rep.distances):
        print(f"n={n:<6d} sup distance {d:.3e}")
    print(f"trend {'PASS' if ok else 'FAIL'} (monotone={rep.monotone}, threshold={args.threshold})")
    return EXIT_OK if ok else EXIT_FAILED_CHECK


def cmd_validate(args) -> int:
    checks = run_suite(args.suite)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.value:.3e}  (tol {c.tolerance:.1e})")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    if args.out:
        out = resolve_out(args.out)
        digest = write_csv(out, ["check", "value", "tolerance", "passed"],
                           [[c.name, c.value, c.tolerance, str(c.passed).lower()] for c in checks])
        write_manifest(out, {"suite": args.suite}, {out.name: digest})
    return EXIT_OK if failed == 0 else EXIT_FAILED_CHECK


# ------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prodmatrix", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw exact samples of all levels")
    s.add_argument("--config", required=True)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    k = sub.add_parser("kernel", help="evaluate a kernel block on a grid")
    k.add_argument("--config", required=True)
    k.add_argument("--r", type=int, required=True)
    k.add_argument("--s", type=int, required=True)
    k.add_argument("--grid", required=True, help="start:stop:count for x")
    k.add_argument("--ygrid", help="start:stop:count for y (default: same as x)")
    k.add_argument("--representation", default="sum",
                   help="sum, contour, limit:ginibre or limit:interpolating(ALPHA)")
    k.add_argument("--compare", help="second representation; adds K_compare and rel_diff columns")
    k.add_argument("--diagonal", action="store_true", help="only the pairs (x_i, y_i)")
    k.add_argument("--out", required=True)
    k.set_defaults(func=cmd_kernel)

    lm = sub.add_parser("limits", help="check a hard-edge scaling limit along n")
    lm.add_argument("--config", required=True)
    lm.add_argument("--regime", required=True, help="weak, strong or interpolating:ALPHA")
    lm.add_argument("--ns", default="20,40,80")
    lm.add_argument("--r", type=int, required=True)
    lm.add_argument("--s", type=int, required=True)
    lm.add_argument("--grid", default="0.5:2:3")
    lm.add_argument("--ygrid")
    lm.add_argument("--threshold", type=float, default=5e-2)
    lm.add_argument("--out", required=True)
    lm.set_defaults(func=cmd_limits)

    v = sub.add_parser("validate", help="run the built-in checks")
    v.add_argument("--suite", default="all", choices=sorted(SUITES) + ["all"])
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ProdMatrixError, ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
