"""Command-line front end.

Every command writes a JSON envelope ``{config, result, wall_time,
library_version, determinism_seed, status}`` validated against the schemas in
:mod:`poincare_lab.schemas`; ``sweep`` can write CSV instead. Output is
byte-identical across runs unless ``--timing`` is given.

Exit codes: 0 success, 1 computational failure (an error envelope is still
written), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from . import __version__
from .arithmetic import certified_search_radius, gamma_ball, min_nontrivial_opnorm, quotient_norm
from .certify import certificate, level_threshold
from .discrete_series import casimir_report, lp_norm_closed_form
from .errors import PoincareLabError
from .group import GroupElement, identity, recompose_cartan, CartanCoords
from .poincare import cuspidality_residual, eval_truncated
from .quadrature import lp_norm_numeric
from .schemas import ENVELOPE_SCHEMA, PAYLOAD_SCHEMAS

COMMANDS = (
    "lp-norm",
    "poincare-eval",
    "cuspidality",
    "certificate",
    "level-threshold",
    "gamma-ball",
    "quotient-norm",
    "casimir-report",
    "sweep",
)

REQUIRED = {
    "lp-norm": ("k",),
    "poincare-eval": ("k", "N"),
    "cuspidality": ("k", "N"),
    "certificate": ("k", "N"),
    "level-threshold": ("k",),
    "gamma-ball": ("N", "radius"),
    "quotient-norm": ("N", "probe"),
    "casimir-report": ("k",),
    "sweep": ("k", "N"),
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "json"
    timing: bool = False

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        missing = [p for p in REQUIRED[self.command] if self.params.get(p) is None]
        if missing:
            raise UsageError(f"{self.command} needs --{', --'.join(missing)}")
        tol = self.params.get("tol")
        if tol is not None and not tol > 0:
            raise UsageError("--tol must be positive")
        if self.format not in ("json", "csv"):
            raise UsageError("--format must be json or csv")
        if self.format == "csv" and self.command != "sweep":
            raise UsageError("csv output is only available for sweep")

    def echo(self) -> dict:
        return {"command": self.command, "params": self.params, "format": self.format}


def _probe(params) -> GroupElement:
    vals = params.get("probe")
    return identity() if vals is None else GroupElement(*vals)


def _int(params, key) -> int:
    v = params[key]
    if isinstance(v, str):
        raise UsageError(f"--{key} takes a single integer for this command")
    return int(v)


def casimir_samples(count: int = 100) -> list[GroupElement]:
    """Deterministic Kronecker-sequence samples with Cartan radius <= 2."""
    phi = (math.sqrt(5) - 1) / 2
    out = []
    for j in range(1, count + 1):
        u1 = (j * phi) % 1.0
        u2 = (j * math.sqrt(2)) % 1.0
        u3 = (j * math.sqrt(3)) % 1.0
        out.append(recompose_cartan(CartanCoords(2 * math.pi * u1, 2.0 * u2, 2 * math.pi * u3)))
    return out


def _lp_norm(params):
    k = _int(params, "k")
    p = float(params.get("p") or 1.0)
    res = lp_norm_numeric(k, p, tol=params.get("tol") or 1e-14)
    return {
        "k": k,
        "p": p,
        "value": res.value,
        "discretization_error_estimate": res.discretization_error_estimate,
        "tail_bound": res.tail_bound,
        "closed_form": lp_norm_closed_form(k, p),
    }


def _poincare_eval(params):
    return eval_truncated(_int(params, "k"), _int(params, "N"), _probe(params), params.get("radius") or 40.0).to_dict()


def _cuspidality(params):
    k, N = _int(params, "k"), _int(params, "N")
    res = cuspidality_residual(k, N, _probe(params), params.get("radius") or 40.0, params.get("nodes") or 64)
    return {"k": k, "N": N, "residual": res.residual, "bound": res.bound, "within_bound": res.within_bound}


def _certificate(params):
    return certificate(_int(params, "k"), _int(params, "N"), params.get("radius")).to_dict()


def _level_threshold(params):
    lt = level_threshold(_int(params, "k"))
    return {
        "k": lt.k,
        "n0": lt.n0,
        "T": lt.T,
        "rejected": [{"N": N, "witness": [int(x) for x in w.entries()]} for N, w in lt.rejected],
    }


def _gamma_ball(params):
    return gamma_ball(_int(params, "N"), float(params["radius"])).to_dict()


def _quotient_norm(params):
    g = _probe(params)
    radius = params.get("radius") or certified_search_radius(g)
    return {"N": _int(params, "N"), "value": quotient_norm(_int(params, "N"), g, radius), "search_radius": radius}


def _casimir(params):
    k = _int(params, "k")
    rep = casimir_report(k, casimir_samples(int(params.get("samples") or 100)))
    return {
        "k": k,
        "eigenvalue_re": rep.eigenvalue_estimate.real,
        "eigenvalue_im": rep.eigenvalue_estimate.imag,
        "relative_spread": rep.relative_spread,
        "sample_count": rep.sample_count,
    }


def _parse_range(value) -> range:
    if isinstance(value, int):
        return range(value, value + 1)
    lo, _, hi = str(value).partition(":")
    lo = int(lo)
    hi = int(hi) if hi else lo
    return range(lo, hi + 1)


SWEEP_COLUMNS = ("k", "N", "verified", "T", "min_nontrivial_opnorm", "probe_margin")


def sweep_rows(params):
    """Yield one row per ``(k, N)`` in grid order."""
    ks, Ns = _parse_range(params["k"]), _parse_range(params["N"])
    if not len(ks) or not len(Ns):
        raise UsageError("sweep ranges must be nonempty")
    radius = params.get("radius") or 40.0
    for k in ks:
        for N in Ns:
            cert = certificate(k, N)
            mn = min_nontrivial_opnorm(N, math.exp(cert.T) + math.exp(-cert.T))
            tv = eval_truncated(k, N, identity(), radius)
            yield {
                "k": k,
                "N": N,
                "verified": cert.verified,
                "T": cert.T,
                "min_nontrivial_opnorm": mn,
                "probe_margin": abs(tv.value) - tv.tail_bound,
            }


DISPATCH = {
    "lp-norm": _lp_norm,
    "poincare-eval": _poincare_eval,
    "cuspidality": _cuspidality,
    "certificate": _certificate,
    "level-threshold": _level_threshold,
    "gamma-ball": _gamma_ball,
    "quotient-norm": _quotient_norm,
    "casimir-report": _casimir,
}


def _envelope(config: RunConfig, result, status: str, elapsed: float, error=None) -> dict:
    env = {
        "config": config.echo(),
        "result": result,
        "wall_time": elapsed if config.timing else None,
        "library_version": __version__,
        "determinism_seed": None,
        "status": status,
    }
    if error is not None:
        env["error"] = error
    return env


def _dump(env: dict) -> str:
    return json.dumps(env, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _write(path, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _sweep_csv(rows, truncated: str | None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow(["" if r[c] is None else r[c] for c in SWEEP_COLUMNS])
    if truncated:
        buf.write(f"# truncated: {truncated}\n")
    return buf.getvalue()


def run(config: RunConfig) -> tuple[dict, int]:
    """Execute ``config``; returns ``(envelope, exit_code)`` and writes the output file."""
    config.validate()
    start = time.perf_counter()
    if config.command == "sweep":
        rows, err = [], None
        try:
            for row in sweep_rows(config.params):
                rows.append(row)
        except PoincareLabError as exc:
            err = {"type": type(exc).__name__, "message": str(exc)}
        result = {"rows": rows, "truncated": err is not None}
        env = _envelope(config, result, "error" if err else "ok", time.perf_counter() - start, err)
        jsonschema.validate(env, ENVELOPE_SCHEMA)
        jsonschema.validate(result, PAYLOAD_SCHEMAS["sweep"])
        if config.format == "csv":
            _write(config.output_path, _sweep_csv(rows, err and err["message"]))
        else:
            _write(config.output_path, _dump(env))
        return env, 1 if err else 0
    try:
        result = DISPATCH[config.command](config.params)
    except PoincareLabError as exc:
        env = _envelope(config, None, "error", time.perf_counter() - start,
                        {"type": type(exc).__name__, "message": str(exc)})
        jsonschema.validate(env, ENVELOPE_SCHEMA)
        _write(config.output_path, _dump(env))
        return env, 1
    env = _envelope(config, result, "ok", time.perf_counter() - start)
    jsonschema.validate(env, ENVELOPE_SCHEMA)
    jsonschema.validate(result, PAYLOAD_SCHEMAS[config.command])
    _write(config.output_path, _dump(env))
    return env, 0


def _summary(env: dict) -> str:
    cmd = env["config"]["command"]
    if env["status"] != "ok":
        return f"{cmd}: error {env['error']['type']}: {env['error']['message']}"
    r = env["result"]
    if cmd == "lp-norm":
        return f"lp-norm: ||c_{r['k']}||_{r['p']:g} = {r['value']:.12g} (closed form {r['closed_form']:.12g})"
    if cmd == "poincare-eval":
        return f"poincare-eval: value = {r['value_re']:.6g}{r['value_im']:+.6g}i, tail <= {r['tail_bound']:.3g}, {r['term_count']} terms"
    if cmd == "cuspidality":
        return f"cuspidality: |constant term| = {r['residual']:.3g} <= {r['bound']:.3g}: {r['within_bound']}"
    if cmd == "certificate":
        return f"certificate: k={r['k']} N={r['N']} verified={r['verified']} witness={r['witness']}"
    if cmd == "level-threshold":
        return f"level-threshold: n0({r['k']}) = {r['n0']}"
    if cmd == "gamma-ball":
        return f"gamma-ball: {r['count']} elements of Gamma({r['N']}) with ||.||_F <= {r['radius']:g}"
    if cmd == "quotient-norm":
        return f"quotient-norm: {r['value']:.12g}"
    if cmd == "casimir-report":
        return f"casimir-report: eigenvalue {r['eigenvalue_re']:.12g}, spread {r['relative_spread']:.3g}"
    return f"sweep: {len(r['rows'])} rows{' (truncated)' if r['truncated'] else ''}"


def _floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b,c,d; got {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("--probe takes four comma-separated entries")
    return vals


def _int_or_range(text: str):
    if ":" in text:
        _parse_range(text)
        return text
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poincare-lab", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--k", type=_int_or_range, help="weight (sweep: range like 4:6)")
    parser.add_argument("--N", type=_int_or_range, help="level (sweep: range like 1:8)")
    parser.add_argument("--p", type=float)
    parser.add_argument("--radius", type=float)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--nodes", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--probe", type=_floats, help="group element a,b,c,d")
    parser.add_argument("--out", help="output path (default: stdout only)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identity)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {
        key: getattr(args, key)
        for key in ("k", "N", "p", "radius", "tol", "nodes", "samples", "probe")
        if getattr(args, key) is not None
    }
    config = RunConfig(args.command, params, args.out, args.format, args.timing)
    try:
        config.validate()
        env, code = run(config)
    except UsageError as exc:
        parser.error(str(exc))
    print(_summary(env))
    if not args.out and (config.format == "json" or config.command != "sweep"):
        sys.stdout.write(_dump(env))
    elif not args.out:
        sys.stdout.write(_sweep_csv(env["result"]["rows"], env.get("error", {}).get("message")))
    return code


if __name__ == "__main__":
    sys.exit(main())
