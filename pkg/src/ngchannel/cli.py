"""Command-line front end.

Subcommands ``quasiprob``, ``stats``, ``threshold``, ``sweep`` and
``validate`` write CSV or JSON to ``--output`` (stdout by default) and report
``key=value`` diagnostics on stderr.

Exit codes: 0 success, 1 I/O or configuration file error, 2 domain or
convergence-guard violation, 3 validation failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import datetime
import io
import json
import math
import shlex
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analysis import AXES, QUANTITIES, sweep, wigner_center_threshold
from .errors import NGChannelError
from .photstat import pnd_converged, pnd_full, stat_summary, summary_record
from .quasiprob import PhaseGrid, quasiprob_grid
from .states import Stage, StateSpec
from .validation import run_validation

__all__ = ["RunConfig", "main", "build_parser", "parse_grid"]

EXIT_OK, EXIT_IO, EXIT_DOMAIN, EXIT_VALIDATION = 0, 1, 2, 3
COMMANDS = ("quasiprob", "stats", "threshold", "sweep", "validate")


class ConfigError(Exception):
    """Unreadable or malformed configuration file."""


@dataclass
class RunConfig:
    """Everything one CLI invocation needs."""

    command: str
    state: StateSpec | None = None
    stage: Stage = field(default_factory=Stage.input)
    kappa: int | None = None
    grid: PhaseGrid | None = None
    output: str | None = None
    format: str = "csv"
    oracle: str = "spot"
    cutoff: int | None = None
    quad_order: int = 24
    reproducible: bool = False
    options: dict = field(default_factory=dict)


def parse_grid(text: str) -> tuple[float, float, int]:
    """Parse ``lo:hi:n`` into ``(lo, hi, n)``."""
    try:
        lo, hi, n = str(text).split(":")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:n, got {text!r}") from None


def _add_state_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("state")
    g.add_argument("--state", help="pats, psts, pakfts, pasts, pssts or thermal")
    g.add_argument("--nth", type=float, help="mean thermal photon number")
    g.add_argument("--m", type=int, help="added or subtracted photons")
    g.add_argument("--k", type=int, help="removed Fock component (pakfts)")
    g.add_argument("--lambda", dest="lam", type=float, help="squeezing (pasts, pssts)")
    g.add_argument("--stage", choices=("input", "output"))
    g.add_argument("--s", type=float, help="channel noise variance for --stage output")


def _add_io_flags(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--output", "-o", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help=f"output format (default: {default_format})")
    p.add_argument("--reproducible", action="store_true", default=None,
                   help="omit the wall-clock record from the diagnostics")
    p.set_defaults(default_format=default_format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ngchannel",
        description="Quasi-probabilities and photon statistics of non-Gaussian "
                    "thermal-family states before and after a Gaussian noise channel.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quasiprob", help="Q, W or P on a phase-space grid")
    _add_state_flags(p)
    p.add_argument("--kappa", type=int, choices=(-1, 0, 1), help="-1 Q, 0 W, 1 P")
    p.add_argument("--grid", type=parse_grid, help="square grid lo:hi:n")
    p.add_argument("--grid-im", type=parse_grid, help="imaginary axis lo:hi:n if different")
    _add_io_flags(p, "csv")

    p = sub.add_parser("stats", help="photon-number distribution and moments")
    _add_state_flags(p)
    p.add_argument("--nmax", type=int, help="largest photon number (default: adaptive)")
    _add_io_flags(p, "json")

    p = sub.add_parser("threshold", help="noise level where W(0) turns positive")
    _add_state_flags(p)
    p.add_argument("--s-max", type=float, help="upper end of the search (default 2)")
    p.add_argument("--tol", type=float, help="bisection tolerance in s (default 1e-10)")
    _add_io_flags(p, "json")

    p = sub.add_parser("sweep", help="tabulate a quantity along one parameter")
    _add_state_flags(p)
    p.add_argument("--axis", choices=AXES)
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--steps", type=int, help="number of equally spaced points")
    p.add_argument("--values", help="comma-separated axis values instead of from/to/steps")
    p.add_argument("--quantity", choices=QUANTITIES)
    _add_io_flags(p, "csv")

    p = sub.add_parser("validate", help="closed forms against the Fock oracle")
    p.add_argument("--level", choices=("off", "spot", "full"),
                   help="oracle lattice; off runs normalization checks only (default spot)")
    p.add_argument("--no-arbitration", action="store_true", default=None)
    p.add_argument("--cutoff", type=int, help="fixed Fock cutoff (default: adaptive)")
    p.add_argument("--quad-order", type=int, help="starting quadrature order per axis")
    _add_io_flags(p, "json")
    return parser


# ---------------------------------------------------------------------------
# Configuration

_STATE_KEYS = {"state": "variant", "nth": "n_th", "m": "m", "k": "k", "lam": "lambda"}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _state_from(args, conf: dict) -> StateSpec | None:
    d = dict(conf.get("state") or {})
    for flag, key in _STATE_KEYS.items():
        val = getattr(args, flag, None)
        if val is not None:
            d[key] = val
    if "variant" not in d:
        return None
    if str(d["variant"]).lower() == "thermal":
        if d.get("m", 0):
            raise NGChannelError("a thermal state carries no added photons")
        d["variant"] = "PATS"
    return StateSpec.from_dict(d)


def _stage_from(args, conf: dict) -> Stage:
    d = dict(conf.get("stage") or {})
    if getattr(args, "stage", None) is not None:
        d["kind"] = args.stage
    if getattr(args, "s", None) is not None:
        d["s"] = args.s
        d.setdefault("kind", "output")
    kind = d.get("kind", "input")
    if kind == "output" and "s" not in d:
        raise NGChannelError("--stage output needs --s")
    return Stage(kind, d.get("s", 0.0))


def _grid_from(args, conf: dict) -> PhaseGrid | None:
    g = conf.get("grid")
    re_spec = getattr(args, "grid", None)
    im_spec = getattr(args, "grid_im", None)
    if re_spec is None and g is not None:
        if isinstance(g, str):
            try:
                re_spec = parse_grid(g)
            except argparse.ArgumentTypeError as exc:
                raise ConfigError(str(exc)) from None
        elif isinstance(g, dict):
            return PhaseGrid(**g)
        else:
            raise ConfigError("grid must be 'lo:hi:n' or an object of PhaseGrid fields")
    if re_spec is None:
        return None
    im_spec = im_spec or re_spec
    return PhaseGrid(re_spec[0], re_spec[1], im_spec[0], im_spec[1], re_spec[2], im_spec[2])


def _pick(args, conf: dict, name: str, default=None):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return conf.get(name, default)


def make_config(args) -> RunConfig:
    """Merge the configuration file and the command-line flags."""
    conf = _load_config(getattr(args, "config", None))
    cmd = args.command
    if "command" in conf and conf["command"] != cmd:
        raise ConfigError(f"config is for {conf['command']!r}, not {cmd!r}")
    opts = {}
    for name in ("nmax", "s_max", "tol", "axis", "start", "stop", "steps", "values",
                 "quantity", "no_arbitration"):
        val = _pick(args, conf.get("options", {}), name)
        if val is not None:
            opts[name] = val
    state = _state_from(args, conf) if cmd != "validate" else None
    return RunConfig(
        command=cmd,
        state=state,
        stage=_stage_from(args, conf) if cmd != "validate" else Stage.input(),
        kappa=_pick(args, conf, "kappa"),
        grid=_grid_from(args, conf) if cmd == "quasiprob" else None,
        output=_pick(args, conf, "output"),
        format=_pick(args, conf, "format", args.default_format),
        oracle=_pick(args, conf, "level", conf.get("oracle", "spot")),
        cutoff=_pick(args, conf, "cutoff"),
        quad_order=_pick(args, conf, "quad_order", 24),
        reproducible=bool(_pick(args, conf, "reproducible", False)),
        options=opts,
    )


# ---------------------------------------------------------------------------
# Output helpers

def _fmt(x) -> str:
    return "%.17g" % x


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _record(**pairs) -> None:
    parts = []
    for k, v in pairs.items():
        if isinstance(v, float):
            v = "%.17g" % v
        parts.append(f"{k}={shlex.quote(str(v))}")
    print(" ".join(parts), file=sys.stderr)


def _require(cfg: RunConfig, **fields) -> None:
    missing = [flag for flag, val in fields.items() if val is None]
    if missing:
        raise NGChannelError(f"{cfg.command} needs {', '.join(missing)}")


# ---------------------------------------------------------------------------
# Commands

def cmd_quasiprob(cfg: RunConfig) -> int:
    _require(cfg, **{"--state": cfg.state, "--kappa": cfg.kappa, "--grid": cfg.grid})
    pf = quasiprob_grid(cfg.state, cfg.stage, cfg.kappa, cfg.grid)
    if cfg.format == "csv":
        rows = ([_fmt(re), _fmt(im), _fmt(pf.values[i, j])]
                for i, re in enumerate(pf.grid.re) for j, im in enumerate(pf.grid.im))
        _emit(cfg, _csv_text(["re", "im", "value"], rows))
    else:
        _emit(cfg, _json_text({
            "state": cfg.state.to_dict(), "stage": {"kind": cfg.stage.kind, "s": cfg.stage.s},
            "kappa": cfg.kappa, "re": pf.grid.re.tolist(), "im": pf.grid.im.tolist(),
            "values": pf.values.tolist()}))
    _record(status="ok", command="quasiprob", rows=pf.values.size,
            origin=pf.at_origin(), integral=pf.integral())
    return EXIT_OK


def cmd_stats(cfg: RunConfig) -> int:
    _require(cfg, **{"--state": cfg.state})
    nmax = cfg.options.get("nmax")
    res = (pnd_full(cfg.state, cfg.stage, nmax) if nmax is not None
           else pnd_converged(cfg.state, cfg.stage))
    if cfg.format == "csv":
        rows = ([n, _fmt(p)] for n, p in enumerate(res.probabilities))
        _emit(cfg, _csv_text(["n", "probability"], rows))
        _record(status="ok", command="stats", n_max=res.n_max, tail_bound=res.tail_bound)
        return EXIT_OK
    summ = stat_summary(cfg.state, cfg.stage)
    rec = summary_record(summ)
    rec.update({"state": cfg.state.to_dict(),
                "stage": {"kind": cfg.stage.kind, "s": cfg.stage.s},
                "pnd": res.probabilities.tolist(), "pnd_tail_bound": _json_safe(res.tail_bound)})
    _emit(cfg, _json_text(rec))
    _record(status="ok", command="stats", mean_n=summ.mean_n, mandel_q=summ.mandel_q,
            g2=summ.g2)
    return EXIT_OK


def cmd_threshold(cfg: RunConfig) -> int:
    _require(cfg, **{"--state": cfg.state})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = wigner_center_threshold(cfg.state, s_max=cfg.options.get("s_max", 2.0),
                                      tol=cfg.options.get("tol", 1e-10))
    for w in caught:
        _record(warning=str(w.message))
    d = res.to_dict()
    d["state"] = cfg.state.to_dict()
    if cfg.format == "csv":
        keys = ["s_star", "bracket_lo", "bracket_hi", "iterations", "w0_at_star",
                "monotone", "sign_changes"]
        row = ["" if res.s_star is None else _fmt(res.s_star), _fmt(res.bracket[0]),
               _fmt(res.bracket[1]), res.iterations, _fmt(res.w0_at_star),
               res.monotone, res.sign_changes]
        _emit(cfg, _csv_text(keys, [row]))
    else:
        _emit(cfg, _json_text(d))
    _record(status="ok", command="threshold",
            s_star="none" if res.s_star is None else res.s_star)
    return EXIT_OK


def _sweep_values(opts: dict) -> list:
    if "values" in opts:
        vals = opts["values"]
        if isinstance(vals, str):
            try:
                return [float(v) for v in vals.split(",") if v.strip()]
            except ValueError:
                raise NGChannelError(f"--values must be comma-separated numbers, got {vals!r}")
        return [float(v) for v in vals]
    missing = [k for k in ("start", "stop", "steps") if k not in opts]
    if missing:
        raise NGChannelError("sweep needs --values or --from, --to and --steps")
    if opts["steps"] < 1:
        raise NGChannelError("--steps must be at least 1")
    return np.linspace(opts["start"], opts["stop"], opts["steps"]).tolist()


def cmd_sweep(cfg: RunConfig) -> int:
    opts = cfg.options
    _require(cfg, **{"--state": cfg.state, "--axis": opts.get("axis"),
                     "--quantity": opts.get("quantity")})
    values = _sweep_values(opts)
    if opts["axis"] == "m":
        if any(v != int(v) for v in values):
            raise NGChannelError("axis m needs integer values")
        values = [int(v) for v in values]
    table = sweep(cfg.state, opts["axis"], values, opts["quantity"], cfg.stage)
    if cfg.format == "csv":
        rows = ([_fmt(x) if table.axis != "m" else x, _fmt(y), table.errors.get(i, "")]
                for i, (x, y) in enumerate(zip(table.axis_values, table.values)))
        _emit(cfg, _csv_text([table.axis, table.quantity, "error"], rows))
    else:
        _emit(cfg, _json_text(table.to_dict()))
    for i, msg in sorted(table.errors.items()):
        _record(warning="point failed", index=i, reason=msg)
    _record(status="ok", command="sweep", rows=len(values), failed=len(table.errors))
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    level = cfg.oracle
    with_oracle = level != "off"
    report = run_validation("spot" if level == "off" else level,
                            with_arbitration=not cfg.options.get("no_arbitration", False),
                            with_oracle=with_oracle, cutoff=cfg.cutoff,
                            quad_order=cfg.quad_order)
    if cfg.format == "json":
        _emit(cfg, _json_text(report.to_dict()))
    else:
        rows = ([c.check, c.label, _fmt(c.max_dev), _fmt(c.tol), c.passed]
                for c in report.checks)
        _emit(cfg, _csv_text(["check", "state", "max_dev", "tol", "passed"], rows))
    for line in report.to_text().splitlines():
        _record(report=line)
    _record(status="ok" if report.passed else "fail", command="validate",
            checks=len(report.checks))
    return EXIT_OK if report.passed else EXIT_VALIDATION


_DISPATCH = {"quasiprob": cmd_quasiprob, "stats": cmd_stats, "threshold": cmd_threshold,
             "sweep": cmd_sweep, "validate": cmd_validate}


_VALUE_FLAGS = ("--grid", "--grid-im", "--values")


def _join_values(argv: list) -> list:
    # Let "--grid -4:4:81" through; argparse would read "-4:4:81" as a flag.
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    """Entry point of the ``ngchannel`` console script."""
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_values(argv))
    try:
        cfg = make_config(args)
        if not cfg.reproducible:
            _record(generated=datetime.datetime.now(datetime.timezone.utc).isoformat(
                timespec="seconds"), version=__version__)
        return _DISPATCH[cfg.command](cfg)
    except ConfigError as exc:
        _record(status="error", code=EXIT_IO, error="ConfigError", reason=str(exc))
        return EXIT_IO
    except OSError as exc:
        _record(status="error", code=EXIT_IO, error=type(exc).__name__,
                reason=exc.strerror or str(exc), path=exc.filename or "")
        return EXIT_IO
    except NGChannelError as exc:
        _record(status="error", code=EXIT_DOMAIN, error=type(exc).__name__, reason=str(exc))
        return EXIT_DOMAIN


if __name__ == "__main__":  # pragma: no cover
    with contextlib.suppress(BrokenPipeError):
        sys.exit(main())
