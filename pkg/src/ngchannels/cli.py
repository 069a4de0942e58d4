"""Command-line access to the capacity, entropy-search and rendering routines.

Every command writes a provenance record (version, resolved configuration,
seed) followed by its data.  CSV output carries the record as ``#`` lines;
JSON output carries it under the ``"provenance"`` key.

Exit codes: 0 success, 2 configuration error, 3 truncation error,
4 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channels import (
    Environment,
    apply,
    attenuator,
    environment_from_json,
    load_channel,
)
from .classical_baseline import (
    classical_capacity_gaussian,
    delta_classical,
    differential_entropy,
    gaussian_entropy,
    mutual_information_gaussian_input,
    noise_from_json,
)
from .entropy_capacity import capacity_interval, delta_max, holevo_coherent_ensemble
from .errors import DomainError, InvalidStateError, NonConvergenceError, TruncationError
from .fock_core import FockState, make_coherent, make_fock, make_thermal
from .gaussian_unitaries import squeezed_vacuum
from .moe_search import MoeParams, minimize_output_entropy, minimize_symmetric, squeezed_state_scan
from .wigner_render import wigner

LN2 = float(np.log(2.0))

THREE_FOLD_CHANNEL = '{"kind": "attenuator", "eta": 0.5, "environment": {"kind": "pure", "amplitudes": [[1, 0], [0, 0], [0, 0], [1, 0]]}}'


class ConfigError(Exception):
    pass


# --------------------------------------------------------------------------
# parsing helpers


def parse_grid(text: str) -> np.ndarray:
    """``"start:stop:num"`` (inclusive linspace) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            return np.linspace(_num(start), _num(stop), int(num))
        return np.array([_num(t) for t in text.split(",") if t.strip()])
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None


def _num(token: str) -> float:
    token = token.strip().replace("pi", str(np.pi))
    # allow simple fractions such as 3.14159/3
    if "/" in token:
        a, b = token.split("/")
        return float(a) / float(b)
    return float(token)


def _json_arg(text: str):
    text = text.strip()
    if not text.startswith("{"):
        text = Path(text).read_text()
    return json.loads(text)


def _state_from_json(doc: dict):
    kind = doc.get("kind")
    if kind == "fock":
        return make_fock(int(doc["n"]), int(doc.get("cutoff", doc["n"])))
    if kind == "coherent":
        re, im = doc["alpha"] if isinstance(doc["alpha"], list) else (doc["alpha"], 0.0)
        alpha = complex(re, im)
        return make_coherent(alpha, int(doc.get("cutoff", int(abs(alpha) ** 2 + 10 * abs(alpha) + 20))))
    if kind == "thermal":
        return make_thermal(float(doc["nbar"]), int(doc.get("cutoff", 60)))
    if kind == "squeezed":
        return squeezed_vacuum(float(doc["r"]), float(doc.get("theta", 0.0)), int(doc.get("cutoff", 60)))
    if kind == "amplitudes":
        return FockState.normalized([complex(a, b) for a, b in doc["amplitudes"]])
    env = environment_from_json(doc)
    return FockState.normalized(env.vector) if env.vector is not None else env.state


def _channel(args):
    ch = load_channel(args.channel)
    if getattr(args, "eta", None) is not None:
        if ch.kind != "attenuator":
            raise ConfigError("--eta applies to attenuators only")
        ch = attenuator(args.eta, ch.environment)
    return ch


def _moe_params(args) -> MoeParams:
    n_fock = args.cutoff if args.cutoff is not None else args.moe_n_fock
    return MoeParams(n_fock, args.moe_n_init, args.moe_n_loop, args.moe_n_it, args.moe_delta0, args.seed)


# --------------------------------------------------------------------------
# output


def _provenance(args, extra=None) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    doc = {"tool": "ngchannels", "version": __version__, "config": config, "seed": args.seed}
    if extra:
        doc.update(extra)
    return doc


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_table(args, header, rows, notes=()):
    prov = _provenance(args)
    if args.format == "json":
        doc = {"provenance": prov, "columns": header, "rows": rows, "notes": list(notes)}
        _emit(args, json.dumps(doc, indent=2) + "\n")
        return
    buf = io.StringIO()
    buf.write(f"# ngchannels {__version__}\n")
    buf.write(f"# config: {json.dumps(prov['config'], sort_keys=True)}\n")
    buf.write(f"# seed: {args.seed}\n")
    for line in notes:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    _emit(args, buf.getvalue())


def _write_doc(args, doc: dict):
    _emit(args, json.dumps({"provenance": _provenance(args), **doc}, indent=2) + "\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _unit(args) -> float:
    return 1.0 / LN2 if args.unit == "bits" else 1.0


# --------------------------------------------------------------------------
# commands


def cmd_delta_sweep(args):
    etas = parse_grid(args.eta_grid)
    u = _unit(args)
    rows = []
    if args.family == "fock":
        envs = [(n, Environment.fock(int(n))) for n in parse_grid(args.n_list)]
    else:
        if not args.channel:
            raise ConfigError("--channel is required unless --family fock")
        envs = [(args.family, load_channel(args.channel).environment)]
    for label, env in envs:
        for eta in etas:
            ch = attenuator(float(eta), env)
            s_min = None
            if args.use_moe:
                s_min = minimize_output_entropy(ch, _moe_params(args), restarts=args.restarts).best_entropy
            d = delta_max(ch, s_min)
            rows.append([float(eta), label if isinstance(label, str) else int(label), d.value * u, d.mode])
    _write_table(args, ["eta", "param", f"delta_{args.unit}", "mode"], rows)


def cmd_capacity_interval(args):
    ch = _channel(args)
    u = _unit(args)
    header = ["nu", "lower", "upper", "loose"]
    if args.holevo:
        header.insert(3, "chi_coherent")
    delta = delta_max(ch)
    rows = []
    for nu in parse_grid(args.nu_grid):
        iv = capacity_interval(ch, float(nu), delta=delta)
        row = [iv.nu, iv.c_gaussian * u, iv.upper * u, int(iv.loose)]
        if args.holevo:
            row.insert(3, holevo_coherent_ensemble(ch, float(nu)).value * u)
        rows.append(row)
    notes = [f"delta={delta.value * u!r} ({delta.mode} mode)", "loose=1 marks c_gaussian < delta"]
    _write_table(args, header, rows, notes)


def cmd_moe(args):
    ch = _channel(args)
    params = _moe_params(args)
    if args.ray:
        m, p = (int(t) for t in args.ray.split(","))
        rep = minimize_symmetric(ch, m, p, params, restarts=args.restarts, workers=args.workers)
    else:
        rep = minimize_output_entropy(ch, params, restarts=args.restarts, workers=args.workers)
    doc = json.loads(rep.to_json())
    u = _unit(args)
    doc["best_entropy"] *= u
    doc["restart_entropies"] = [s * u for s in doc["restart_entropies"]]
    doc["trace"] = [[i, s * u] for i, s in doc["trace"]]
    doc["unit"] = args.unit
    _write_doc(args, doc)
    if args.wigner_out:
        grid = wigner(rep.centered_state, resolution=args.resolution)
        Path(args.wigner_out).write_text(grid.to_csv())


def cmd_squeezed_scan(args):
    ch = _channel(args)
    res = squeezed_state_scan(
        ch, parse_grid(args.theta_grid), parse_grid(args.r_grid), cutoff=args.cutoff or 60, refine=not args.no_refine
    )
    u = _unit(args)
    rows = [[float(th), float(r), float(res.table[i, j]) * u] for i, th in enumerate(res.thetas) for j, r in enumerate(res.rs)]
    notes = [
        f"argmin theta={res.theta_min!r} r={res.r_min!r} s_out={res.s_min * u!r} refined={res.refined}",
        f"theta period={res.theta_period!r}; distance to reference angles: "
        + ", ".join(f"{k}={v:.6g}" for k, v in res.theta_offsets.items()),
        *res.notes,
    ]
    _write_table(args, ["theta", "r", "s_out"], rows, notes)


def cmd_classical(args):
    noise = noise_from_json(_json_arg(args.noise))
    u = _unit(args)
    h_n = differential_entropy(noise)
    h_g = gaussian_entropy(noise.variance)
    c_g = classical_capacity_gaussian(args.energy / noise.variance)
    doc = {
        "noise": json.loads(noise.to_json()),
        "energy": args.energy,
        "unit": args.unit,
        "h_N": h_n * u,
        "h_NG": h_g * u,
        "delta_cl": delta_classical(noise) * u,
        "C_G": c_g * u,
        "I_lower": mutual_information_gaussian_input(noise, args.energy) * u,
    }
    _write_doc(args, doc)


def cmd_wigner(args):
    state = _state_from_json(_json_arg(args.state))
    if args.channel:
        state = apply(_channel(args), state)
    grid = wigner(state, extent=args.extent, resolution=args.resolution)
    if args.format == "json":
        _write_doc(args, json.loads(grid.to_json()))
        return
    rows = [[float(x), float(p), float(grid.values[i, j])] for i, p in enumerate(grid.p) for j, x in enumerate(grid.x)]
    _write_table(args, ["x", "p", "W"], rows)


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="csv for tables (default), json")
    common.add_argument("--unit", choices=["nats", "bits"], default="nats", help="entropy unit")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument(
        "--cutoff", type=int, default=None, help="Fock cutoff (squeezed-scan default 60; moe: same as --moe-n-fock)"
    )

    chan = argparse.ArgumentParser(add_help=False)
    chan.add_argument("--channel", default=THREE_FOLD_CHANNEL, help="channel as inline JSON or a file path")
    chan.add_argument("--eta", type=float, default=None, help="override the attenuator transmittance")

    moe = argparse.ArgumentParser(add_help=False)
    d = MoeParams()
    moe.add_argument("--moe-n-fock", type=int, default=d.n_fock)
    moe.add_argument("--moe-n-init", type=int, default=d.n_init)
    moe.add_argument("--moe-n-loop", type=int, default=d.n_loop)
    moe.add_argument("--moe-n-it", type=int, default=d.n_it)
    moe.add_argument("--moe-delta0", type=float, default=d.delta0)
    moe.add_argument("--restarts", type=int, default=8)

    parser = argparse.ArgumentParser(prog="ngchannels", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"ngchannels {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("delta-sweep", parents=[common, moe], help="interval width versus transmittance")
    p.add_argument("--family", default="fock", help="'fock' (uses --n-list) or a label for --channel's environment")
    p.add_argument("--n-list", default="1,2,3")
    p.add_argument("--channel", default=None)
    p.add_argument("--eta-grid", default="0:1:21")
    p.add_argument("--use-moe", action="store_true", help="take S_min from the stochastic search instead of vacuum")
    p.set_defaults(func=cmd_delta_sweep)

    p = sub.add_parser("capacity-interval", parents=[common, chan], help="capacity bounds versus photon budget")
    p.add_argument("--nu-grid", default="0:10:21")
    p.add_argument("--holevo", action="store_true", help="add the coherent-ensemble Holevo column")
    p.set_defaults(func=cmd_capacity_interval)

    p = sub.add_parser("moe", parents=[common, chan, moe], help="minimum-output-entropy search (JSON report)")
    p.add_argument("--ray", default=None, help="'m,p': restrict to real amplitudes on {m n + p}")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--wigner-out", default=None, help="also write the best state's Wigner grid (CSV)")
    p.add_argument("--resolution", type=int, default=121)
    p.set_defaults(func=cmd_moe)

    p = sub.add_parser(
        "squeezed-scan", parents=[common, chan], help="output entropy of rotated squeezed vacua (cutoff default 60)"
    )
    p.add_argument("--theta-grid", default="0:pi/3:25")
    p.add_argument("--r-grid", default="0:1:50")
    p.add_argument("--no-refine", action="store_true")
    p.set_defaults(func=cmd_squeezed_scan)

    p = sub.add_parser("classical", parents=[common], help="classical additive-noise baseline (JSON)")
    p.add_argument("--noise", default='{"kind": "uniform", "variance": 1.0}', help="noise spec JSON or file")
    p.add_argument("--energy", type=float, default=1.0, help="input variance E")
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("wigner", parents=[common], help="Wigner grid of a state or of a channel output")
    p.add_argument("--state", default='{"kind": "pure", "amplitudes": [[1, 0], [0, 0], [0, 0], [1, 0]]}')
    p.add_argument("--channel", default=None, help="if given, render the channel output for --state")
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--resolution", type=int, default=121)
    p.set_defaults(func=cmd_wigner)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except TruncationError as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return 3
    except NonConvergenceError as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return 4
    except (ConfigError, DomainError, InvalidStateError, KeyError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
