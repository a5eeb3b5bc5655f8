"""Command-line front end: ``nlcalc <command> [options]``.

Every option can also come from ``--config FILE`` (flat ``key = value``
lines, keys named after the long options); options given on the command line
win over the file.  Outputs go to ``--output`` (stdout when omitted); the
commands that write a data file also write ``<output>.json`` echoing the
resolved configuration.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import functions as fn
from . import io
from .antiderivative import SolverConfig, homogeneous_basis, solve
from .convergence_lab import (antiderivative_sweep, derivative_sweep, dyadic, figure_gradcon,
                              mode_pairing_sweep, zero_scaling_sweep)
from .derivative import BoundaryError, QuadratureConfig, annihilation_residual, apply, apply_grid
from .kernels import (CheckConfig, Flatness, FlatnessCase, KernelError, KernelProfile, builtin_kernel,
                      check_admissibility, load_tabulated_kernel, scale)
from .quadrature import QuadratureError
from .spectral import find_zeros

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

FLAGS = ("antisymmetry", "dipole", "analytic_class", "positivity", "flatness")

EXPERIMENTS = {
    "derivative-gaussian": "sup/L2 error of D u - u' for u = exp(-t^2) on [-5, 5]",
    "derivative-affine": "u(t) = 2t + 1, exact at every eps",
    "derivative-sqrt-abs": "u(t) = |t|^(1/2) on 1/2 <= |t| <= 3",
    "antiderivative-arctan": "F = 1/(1+t^2) against arctan",
    "antiderivative-gaussian": "F = exp(-t^2) against (sqrt(pi)/2) erf",
    "zero-scaling": "|eps xi_j,eps - xi_j| for the first three nonzero zeros",
    "mode-pairing": "weak pairing of the first homogeneous mode with the bump catalogue",
}

# command -> option defaults applied after the config file
DEFAULTS = {
    "common": {"kernel": "exponential", "k_alpha": None, "kernel_file": None, "support_radius": None,
               "flatness": None, "tolerance": 1e-13, "panel_budget": 200_000, "truncation": None},
    "check-kernel": {"require": list(FLAGS), "samples": 4096, "j_max": 12},
    "derive": {"epsilon": [0.1], "function": None, "input": None, "domain": "-5,5", "n": 1001,
               "annihilation": None},
    "antiderive": {"epsilon": [0.1], "function": "runge", "input": None, "domain": "-40,40",
                   "n": 2**14, "tau": 1e-8, "constant_policy": "zero-mean", "strict": False},
    "zeros": {"epsilon": [], "window": 3.0, "resolution": 64},
    "sweep": {"epsilon": None, "experiment": "derivative-gaussian", "window": 2.5,
              "domain": "-16,16", "n": 2**12},
    "figure": {"epsilon": [1.0, 0.5, 0.25], "domain": "-3,3", "n": 601},
}


class UsageError(ValueError):
    pass


def _kernel_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("kernel")
    g.add_argument("--kernel", help="catalogue kernel: indicator, exponential, sine, power, flat")
    g.add_argument("--k-alpha", type=float, help="flatness exponent of the power kernel")
    g.add_argument("--kernel-file", help="tabulated kernel CSV (s,value on s > 0)")
    g.add_argument("--support-radius", type=float, help="support radius of a tabulated kernel")
    g.add_argument("--flatness", help="flatness record 'k_alpha,b_alpha,K_plus,K_minus' for a tabulated kernel")
    g = p.add_argument_group("quadrature")
    g.add_argument("--tolerance", type=float, help="absolute quadrature tolerance")
    g.add_argument("--panel-budget", type=int, help="maximum number of quadrature panels")
    g.add_argument("--truncation", type=float, help="unscaled integration radius for non-compact kernels")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlcalc", description="Nonlocal derivative and antiderivative toolkit.")
    parser.add_argument("--version", action="version", version=f"nlcalc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--output", "-o", help="output path (default: stdout)")
        _kernel_options(p)
        return p

    p = add("check-kernel", "check admissibility conditions of a kernel")
    p.add_argument("--require", action="append", choices=FLAGS,
                   help="flag that must pass (repeatable; default: all)")
    p.add_argument("--samples", type=int, help="symmetric sample count")
    p.add_argument("--j-max", type=int, help="largest moment order in the analytic-class surrogate")

    p = add("derive", "apply D_{alpha,eps} to a function")
    p.add_argument("--epsilon", action="append", type=float, help="nonlocality (repeatable)")
    p.add_argument("--function", help=f"builtin function: {', '.join(fn.CATALOGUE)}")
    p.add_argument("--input", help="grid CSV ('# t,value; domain=[a,b]; n=N' header)")
    p.add_argument("--domain", help="output interval 'a,b' for builtin functions")
    p.add_argument("--n", type=int, help="number of output points for builtin functions")
    p.add_argument("--annihilation", type=int, metavar="N",
                   help="report the sine-kernel residual of exp(i N pi t / eps) instead")

    p = add("antiderive", "solve D_{alpha,eps} u = F spectrally")
    p.add_argument("--epsilon", action="append", type=float, help="nonlocality (one value)")
    p.add_argument("--function", help=f"builtin F: {', '.join(fn.CATALOGUE)}")
    p.add_argument("--input", help="grid CSV of F on a symmetric domain")
    p.add_argument("--domain", help="symmetric interval '-T,T' for builtin F")
    p.add_argument("--n", type=int, help="power-of-two sample count for builtin F")
    p.add_argument("--tau", type=float, help="relative null threshold")
    p.add_argument("--constant-policy", help="'zero-mean' or 'fixed:<c>'")
    p.add_argument("--strict", action="store_true", default=None,
                   help="fail instead of warning when F does not decay at the boundary")

    p = add("zeros", "real zeros of the kernel transform")
    p.add_argument("--epsilon", action="append", type=float, help="also report zeros scaled by 1/eps")
    p.add_argument("--window", type=float, help="unscaled search window [0, W]")
    p.add_argument("--resolution", type=int, help="samples per unit frequency")

    p = add("sweep", "run a convergence experiment")
    p.add_argument("--experiment", choices=sorted(EXPERIMENTS), help="experiment id")
    p.add_argument("--epsilon", action="append", type=float, help="strictly decreasing list (repeatable)")
    p.add_argument("--window", type=float, help="unscaled zero window (zero-scaling)")
    p.add_argument("--domain", help="symmetric solver domain '-T,T' (antiderivative experiments)")
    p.add_argument("--n", type=int, help="solver sample count (antiderivative experiments)")

    p = add("figure", "curves of D u for u = |t|^(1/2) and the indicator kernel")
    p.add_argument("--epsilon", action="append", type=float, help="strictly decreasing list (repeatable)")
    p.add_argument("--domain", help="interval 'a,b'")
    p.add_argument("--n", type=int, help="number of points")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, the config file, and command-line options."""
    cfg = dict(DEFAULTS["common"])
    cfg.update(DEFAULTS[args.command])
    if args.config:
        try:
            from_file = io.read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        unknown = set(from_file) - set(cfg) - {"output"}
        if unknown:
            raise UsageError(f"unknown config keys for {args.command}: {', '.join(sorted(unknown))}")
        cfg.update(from_file)
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        cfg[key] = value
    if isinstance(cfg.get("epsilon"), (int, float)):
        cfg["epsilon"] = [cfg["epsilon"]]
    if isinstance(cfg.get("require"), str):
        cfg["require"] = [cfg["require"]]
    cfg["command"] = args.command
    return cfg


def _interval(text, name: str = "domain") -> tuple[float, float]:
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(",")
    try:
        a, b = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--{name} must be 'a,b', got {text!r}") from None
    if not b > a:
        raise UsageError(f"--{name} needs a < b")
    return a, b


def make_kernel(cfg: dict) -> KernelProfile:
    flat = None
    if cfg.get("flatness") is not None:
        vals = cfg["flatness"]
        vals = [float(v) for v in (vals if isinstance(vals, list) else str(vals).split(","))]
        if len(vals) != 4:
            raise UsageError("--flatness needs k_alpha,b_alpha,K_plus,K_minus")
        case = FlatnessCase.SINGULAR if vals[0] < 0 else FlatnessCase.FINITE_LIMIT
        flat = Flatness(*vals, case=case)
    if cfg.get("kernel_file"):
        return load_tabulated_kernel(cfg["kernel_file"], cfg.get("support_radius"), flat)
    return builtin_kernel(str(cfg["kernel"]), cfg.get("k_alpha"))


def _quadrature(cfg: dict) -> QuadratureConfig:
    return QuadratureConfig(float(cfg["tolerance"]), int(cfg["panel_budget"]), cfg.get("truncation"))


def _epsilons(cfg: dict, minimum: int = 1) -> list[float]:
    eps = [float(e) for e in (cfg.get("epsilon") or [])]
    if len(eps) < minimum:
        raise UsageError("--epsilon is required")
    if any(not e > 0 for e in eps):
        raise UsageError("--epsilon must be positive")
    return eps


def _emit(text: str, cfg: dict) -> None:
    if cfg.get("output"):
        Path(cfg["output"]).write_text(text)
    else:
        sys.stdout.write(text)


def _sidecar(cfg: dict, payload: dict) -> None:
    if not cfg.get("output"):
        return
    body = dict(payload)
    body["config"] = {k: v for k, v in sorted(cfg.items())}
    body["version"] = __version__
    io.write_json(str(cfg["output"]) + ".json", body)


# ---------------------------------------------------------------------------
# commands


def cmd_check_kernel(cfg: dict) -> int:
    k = make_kernel(cfg)
    report = check_admissibility(k, CheckConfig(samples=int(cfg["samples"]), j_max=int(cfg["j_max"])))
    out = report.to_dict()
    out["required"] = list(cfg["require"])
    out["kernel_record"] = k.to_dict()
    _emit(io.dumps(out), cfg)
    failed = [f for f in cfg["require"] if not report.flags[f]]
    if failed:
        print(f"nlcalc: {k.name} fails {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_derive(cfg: dict) -> int:
    k = make_kernel(cfg)
    eps = _epsilons(cfg)
    q = _quadrature(cfg)
    if cfg.get("annihilation") is not None:
        n = int(cfg["annihilation"])
        res = {f"{e:g}": annihilation_residual(scale(k, e), n, q=q) for e in eps}
        _emit(io.dumps({"kernel": k.name, "n": n, "residual": res}), cfg)
        return EXIT_OK
    if cfg.get("input"):
        u = io.read_grid_csv(cfg["input"])
        # the widest kernel window decides which samples can be output
        mask, first = apply_grid(scale(k, max(eps)), u, q)
        t = u.t[mask]
        columns = {"t": t}
        for e in eps:
            columns[f"eps={e:g}"] = first if e == max(eps) else apply(scale(k, e), u, t, q)
    else:
        name = cfg.get("function") or "linear"
        u = fn.get(name)
        a, b = _interval(cfg["domain"])
        t = np.linspace(a, b, int(cfg["n"]))
        columns = {"t": t}
        for e in eps:
            columns[f"eps={e:g}"] = apply(scale(k, e), u, t, q)
    _emit(io.write_table_csv(None, columns), cfg)
    _sidecar(cfg, {"kernel": k.to_dict(), "epsilon": eps})
    return EXIT_OK


def _constant_policy(text: str) -> tuple[str, float]:
    text = str(text)
    if text == "zero-mean":
        return "zero-mean", 0.0
    for prefix in ("fixed:", "fixed-value:"):
        if text.startswith(prefix):
            try:
                return "fixed-value", float(text[len(prefix):])
            except ValueError:
                break
    raise UsageError(f"--constant-policy must be 'zero-mean' or 'fixed:<c>', got {text!r}")


def cmd_antiderive(cfg: dict) -> int:
    k = make_kernel(cfg)
    eps = _epsilons(cfg)
    if len(eps) != 1:
        raise UsageError("antiderive takes exactly one --epsilon")
    policy, c = _constant_policy(cfg["constant_policy"])
    if cfg.get("input"):
        F = io.read_grid_csv(cfg["input"])
        if not math.isclose(F.a, -F.b):
            raise UsageError("antiderive needs F on a symmetric domain [-T, T)")
        T, n = F.b, F.n
    else:
        a, b = _interval(cfg["domain"])
        if not math.isclose(a, -b):
            raise UsageError("--domain must be symmetric, '-T,T'")
        T, n = b, int(cfg["n"])
        F = None
    scfg = SolverConfig(half_width=T, n=n, null_threshold=float(cfg["tau"]), constant_policy=policy,
                        constant_value=c, strict=bool(cfg["strict"]))
    if F is None:
        F = scfg.sample(fn.get(str(cfg["function"])))
    res = solve(scale(k, eps[0]), F, scfg, _quadrature(cfg))
    if cfg.get("output"):
        io.write_grid_csv(cfg["output"], res.particular)
    else:
        sys.stdout.write(io.write_table_csv(None, {"t": res.particular.t, "value": res.particular.values}))
    payload = res.to_dict()
    payload["solver"] = payload.pop("config")
    payload["kernel_record"] = k.to_dict()
    _sidecar(cfg, payload)
    return EXIT_OK


def cmd_zeros(cfg: dict) -> int:
    k = make_kernel(cfg)
    zs = find_zeros(k, float(cfg["window"]), int(cfg["resolution"]))
    out = zs.to_dict()
    eps = _epsilons(cfg, minimum=0)
    if eps:
        out["scaled"] = {f"{e:g}": [{"xi": x, "k": d} for x, d in
                                     homogeneous_basis(k, e, float(cfg["window"]) / e,
                                                       int(cfg["resolution"]))]
                         for e in eps}
    _emit(io.dumps(out), cfg)
    return EXIT_OK


def cmd_sweep(cfg: dict) -> int:
    exp = cfg["experiment"]
    k = make_kernel(cfg)
    q = _quadrature(cfg)
    eps = _epsilons(cfg, minimum=0) or (dyadic(1, 6) if exp.startswith("antiderivative") else dyadic(0, 6))
    if exp == "derivative-gaussian":
        u = fn.get("gaussian")
        report = derivative_sweep(k, u, u.df, eps, q=q, experiment=exp)
    elif exp == "derivative-affine":
        report = derivative_sweep(k, lambda t: 2.0 * t + 1.0, lambda t: np.full_like(t, 2.0), eps,
                                  sup_u2=0.0, q=q, experiment=exp)
    elif exp == "derivative-sqrt-abs":
        u = fn.get("sqrt-abs")
        report = derivative_sweep(k, u, u.df, eps, region=[(-3.0, -0.5), (0.5, 3.0)], n_points=201,
                                  q=q, experiment=exp)
    elif exp.startswith("antiderivative"):
        a, b = _interval(cfg["domain"])
        if not math.isclose(a, -b):
            raise UsageError("--domain must be symmetric, '-T,T'")
        F = fn.get("runge" if exp.endswith("arctan") else "gaussian")
        report = antiderivative_sweep(k, F, F.antiderivative, eps, p_norms=(2.0, math.inf),
                                      cfg=SolverConfig(half_width=b, n=int(cfg["n"])), q=q,
                                      experiment=exp)
    elif exp == "zero-scaling":
        report = zero_scaling_sweep(k, eps, float(cfg["window"]))
    elif exp == "mode-pairing":
        report = mode_pairing_sweep(k, eps)
    else:  # argparse restricts choices; config files are checked here
        raise UsageError(f"unknown experiment {exp!r}")
    out = report.to_dict()
    out["config"] = {key: v for key, v in sorted(cfg.items())}
    out["version"] = __version__
    _emit(io.dumps(out), cfg)
    return EXIT_OK


def cmd_figure(cfg: dict) -> int:
    eps = _epsilons(cfg)
    a, b = _interval(cfg["domain"])
    data = figure_gradcon(eps, np.linspace(a, b, int(cfg["n"])), _quadrature(cfg))
    _emit(io.write_table_csv(None, data), cfg)
    _sidecar(cfg, {"kernel": "indicator", "function": "sqrt-abs", "epsilon": eps})
    return EXIT_OK


COMMANDS = {
    "check-kernel": cmd_check_kernel,
    "derive": cmd_derive,
    "antiderive": cmd_antiderive,
    "zeros": cmd_zeros,
    "sweep": cmd_sweep,
    "figure": cmd_figure,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except (UsageError, KernelError) as exc:
        print(f"nlcalc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BoundaryError, QuadratureError, ValueError, OSError) as exc:
        print(f"nlcalc {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
