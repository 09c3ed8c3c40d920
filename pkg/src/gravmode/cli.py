"""Command-line surface.

Subcommands:
  point      evaluate one (omega, lc) pair and print the report
  figure     sweep omega for each lc and write the deficit table (csv/json)
  verify     compare the perturbative pipeline against exact diagonalization
  selfcheck  run the special-function and quadrature reference suite

All outputs are deterministic for a given configuration: the
configuration is echoed into the output header, rows are ordered
lc-major / omega-minor, and floats are written in shortest round-trip
form.  Exit codes: 0 success, 1 usage error, 2 numerical failure
(non-convergence or a verification tolerance miss).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .core import TruncationSpec, make_params
from .coupling import (
    kernel_element_tanh_sinh,
    mean_potential_closed_form,
    potential_kernel_column,
)
from .perturbation import mode_report
from .specfun import (
    QuadratureError,
    QuadratureSpec,
    bessel_k0_scaled,
    integrate_1d,
    phi_n,
)

CSV_COLUMNS = [
    "omega_over_planck",
    "lc_over_planck",
    "one_minus_eta",
    "log10_one_minus_eta",
    "one_minus_fidelity",
    "log10_one_minus_fidelity",
    "z_squared",
    "e00_over_hbar_omega",
    "n_max",
    "converged",
]

_QUAD_NAMES = {"gh": "gauss_hermite", "ts": "tanh_sinh"}
WEAK_COUPLING_WARN = 0.1  # warn when |<U>|/(hbar omega) exceeds this


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _read_config(path: str) -> dict:
    """Key = value lines; '#' starts a comment; unknown keys rejected later."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


_CONFIG_KEYS = {
    "omega": float,
    "lc": float,
    "omega_min": float,
    "omega_max": float,
    "points": int,
    "lc_list": str,
    "nmax": int,
    "tol": float,
    "quad": str,
    "nodes": int,
    "format": str,
    "out": str,
}


def _apply_config(args: argparse.Namespace, parser: _Parser):
    """Fill unset flags from --config; explicit flags win."""
    if not getattr(args, "config", None):
        return
    try:
        raw = _read_config(args.config)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    for key, val in raw.items():
        if key not in _CONFIG_KEYS:
            parser.error(f"unknown config key {key!r}")
        if getattr(args, key, None) is None:
            try:
                setattr(args, key, _CONFIG_KEYS[key](val))
            except ValueError:
                parser.error(f"bad value for config key {key!r}: {val!r}")


def _quad_spec(args) -> QuadratureSpec:
    scheme = _QUAD_NAMES[args.quad or "gh"]
    return QuadratureSpec(scheme=scheme, nodes=args.nodes or 200)


def _trunc_spec(args, default_nmax=64) -> TruncationSpec:
    return TruncationSpec(
        n_max=args.nmax if args.nmax is not None else default_nmax,
        tol=args.tol if args.tol is not None else 5e-3,
    )


def _parse_lc_list(text: str, parser: _Parser):
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        parser.error(f"bad --lc-list value {text!r}")
    if not values:
        parser.error("--lc-list must contain at least one value")
    return values


# ---------------------------------------------------------------------------
# point
# ---------------------------------------------------------------------------

def cmd_point(args, parser: _Parser) -> int:
    if args.omega is None or args.lc is None:
        parser.error("point requires --omega and --lc")
    if args.format not in (None, "text", "json"):
        parser.error("point supports --format text or json")
    try:
        params = make_params(args.omega, args.lc)
        trunc = _trunc_spec(args)
        qspec = _quad_spec(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        report = mode_report(params, trunc, qspec)
    except QuadratureError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 2
    mean_u = mean_potential_closed_form(params)
    if abs(mean_u) > WEAK_COUPLING_WARN:
        sys.stderr.write(
            f"warning: |<U>|/(hbar omega) = {abs(mean_u):.4g} exceeds "
            f"{WEAK_COUPLING_WARN}; first-order results are not reliable here\n"
        )
    fields = dict(report.row_dict())
    fields["eta"] = report.eta
    fields["fidelity"] = report.fidelity
    fields["mean_potential_over_hbar_omega"] = mean_u
    order = [
        "omega_over_planck", "lc_over_planck", "eta", "one_minus_eta",
        "log10_one_minus_eta", "fidelity", "one_minus_fidelity",
        "log10_one_minus_fidelity", "z_squared",
        "mean_potential_over_hbar_omega", "e00_over_hbar_omega",
        "n_max", "converged",
    ]
    if (args.format or "text") == "json":
        sys.stdout.write(json.dumps({k: fields[k] for k in order}, indent=2) + "\n")
    else:
        width = max(len(k) for k in order)
        for key in order:
            sys.stdout.write(f"{key:<{width}} = {_fmt(fields[key])}\n")
    return 0 if report.converged else 2


# ---------------------------------------------------------------------------
# figure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    """Long-lived sweep definition: log-spaced omega grid, lc values,
    truncation and quadrature settings, output target."""

    omega_min: float = 1e-3
    omega_max: float = 1.0
    points: int = 61
    # default lc pair: both ~ the Planck length, chosen so the default grid
    # stays below the chi ~ 1 turnover of the first-order deficits
    lc_values: tuple = (0.5, 1.0)
    trunc: TruncationSpec = field(default_factory=TruncationSpec)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    out: str = "figure.csv"
    format: str = "csv"

    def __post_init__(self):
        if not (0.0 < self.omega_min < self.omega_max) or self.points < 2:
            raise ValueError("need 0 < omega-min < omega-max and points >= 2")
        if not self.lc_values or any(v <= 0.0 for v in self.lc_values):
            raise ValueError("lc values must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError(f"figure format must be csv or json, got {self.format!r}")

    @property
    def omegas(self) -> np.ndarray:
        return np.logspace(math.log10(self.omega_min),
                           math.log10(self.omega_max), self.points)

    def header_dict(self) -> dict:
        return {
            "omega_min": self.omega_min,
            "omega_max": self.omega_max,
            "points": self.points,
            "lc_list": ",".join(repr(v) for v in self.lc_values),
            "nmax": self.trunc.n_max,
            "tol": self.trunc.tol,
            "quad": {"gauss_hermite": "gh", "tanh_sinh": "ts"}[self.quad.scheme],
            "nodes": self.quad.nodes,
            "format": self.format,
        }


def _sweep_from_args(args, parser: _Parser) -> SweepConfig:
    lcs = _parse_lc_list(args.lc_list, parser) if args.lc_list else None
    fmt = args.format or "csv"
    kwargs = {}
    if args.omega_min is not None:
        kwargs["omega_min"] = args.omega_min
    if args.omega_max is not None:
        kwargs["omega_max"] = args.omega_max
    if args.points is not None:
        kwargs["points"] = args.points
    if lcs is not None:
        kwargs["lc_values"] = tuple(lcs)
    try:
        return SweepConfig(
            trunc=_trunc_spec(args),
            quad=_quad_spec(args),
            out=args.out or f"figure.{fmt}",
            format=fmt,
            **kwargs,
        )
    except ValueError as exc:
        parser.error(str(exc))


def run_sweep(config: SweepConfig) -> list:
    """Rows of the sweep table in deterministic lc-major, omega-minor
    order (rows may be computed concurrently; assembly order is fixed)."""
    grid = [(lc, float(om)) for lc in config.lc_values for om in config.omegas]

    def one(point):
        lc, om = point
        return mode_report(make_params(om, lc), config.trunc, config.quad).row_dict()

    with ThreadPoolExecutor(max_workers=4) as pool:
        return list(pool.map(one, grid))


def render_sweep(config: SweepConfig, rows: list) -> str:
    if config.format == "csv":
        header = config.header_dict()
        lines = ["# gravmode figure sweep"]
        lines += [f"# {key} = {header[key]}" for key in sorted(header)]
        lines.append(",".join(CSV_COLUMNS))
        for row in rows:
            lines.append(",".join(_fmt(row[col]) for col in CSV_COLUMNS))
        return "\n".join(lines) + "\n"
    return json.dumps({"config": config.header_dict(), "rows": rows}, indent=2) + "\n"


def cmd_figure(args, parser: _Parser) -> int:
    if args.format not in (None, "csv", "json"):
        parser.error("figure supports --format csv or json")
    config = _sweep_from_args(args, parser)
    try:
        rows = run_sweep(config)
    except QuadratureError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 2
    with open(config.out, "w", encoding="utf-8") as fh:
        fh.write(render_sweep(config, rows))
    bad = sum(1 for row in rows if not row["converged"])
    sys.stdout.write(f"wrote {len(rows)} rows to {config.out}\n")
    if bad:
        sys.stderr.write(f"{bad} rows failed the truncation convergence check\n")
        return 2
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args, parser: _Parser) -> int:
    lcs = _parse_lc_list(args.lc_list, parser) if args.lc_list else [1.0]
    if args.omega_min is not None or args.omega_max is not None or args.points is not None:
        lo = args.omega_min if args.omega_min is not None else 1e-2
        hi = args.omega_max if args.omega_max is not None else 5e-2
        pts = args.points if args.points is not None else 3
        if not (0.0 < lo < hi) or pts < 2:
            parser.error("need 0 < omega-min < omega-max and points >= 2")
        omegas = [float(v) for v in np.logspace(math.log10(lo), math.log10(hi), pts)]
    else:
        omegas = [0.01, 0.02, 0.05]
    trunc = _trunc_spec(args, default_nmax=40)
    qspec = _quad_spec(args)

    all_ok = True
    header = (f"{'omega':>10} {'lc':>6} {'d(1-eta)rel':>12} {'d(1-F)rel':>12} "
              f"{'dE/hw':>12} {'overlap^2':>14} {'status':>8}")
    sys.stdout.write(header + "\n")
    for lc in lcs:
        for om in omegas:
            try:
                cmp_ = oracle.compare(make_params(om, lc), trunc, qspec)
            except (QuadratureError, RuntimeError) as exc:
                sys.stderr.write(f"numerical failure at omega={om}, lc={lc}: {exc}\n")
                return 2
            ratio = max(1.0, (om / 0.01) ** 2)
            ok = (
                cmp_.rel_diff_one_minus_eta <= 1e-3 * ratio
                and cmp_.rel_diff_one_minus_fidelity <= 1e-3 * ratio
                and cmp_.abs_diff_energy <= 1e-7 * ratio * ratio
                and cmp_.overlap_sq >= 1.0 - 1e-8 * ratio * ratio
                and cmp_.variational_ok
            )
            all_ok &= ok
            sys.stdout.write(
                f"{om:>10.4g} {lc:>6.3g} {cmp_.rel_diff_one_minus_eta:>12.3e} "
                f"{cmp_.rel_diff_one_minus_fidelity:>12.3e} "
                f"{cmp_.abs_diff_energy:>12.3e} {cmp_.overlap_sq:>14.12f} "
                f"{'PASS' if ok else 'FAIL':>8}\n"
            )
    return 0 if all_ok else 2


# ---------------------------------------------------------------------------
# selfcheck
# ---------------------------------------------------------------------------

def _selfcheck_cases():
    sqrt_pi = math.sqrt(math.pi)

    def k0e_refs():
        refs = {  # e^x K0(x), 20-digit references (mpmath, dps=40)
            1e-60: 138.27103709530115349,
            1e-8: 18.536612444976901932,
            0.25: 1.9793338485985686836,
            1.0: 1.1444630798068950147,
        }
        return max(abs(bessel_k0_scaled(x) / r - 1.0) for x, r in refs.items()), 1e-13

    def k0e_monotone():
        xs = np.logspace(-30, 3, 200)
        vals = bessel_k0_scaled(xs)
        return 0.0 if np.all(np.diff(vals) < 0.0) else 1.0, 0.5

    def k0e_asymptotic():
        x = 1e3
        return abs(bessel_k0_scaled(x) / math.sqrt(math.pi / (2 * x)) - 1.0), 1e-3

    def gh_gaussian():
        val, _ = integrate_1d(lambda q: np.exp(-q * q), QuadratureSpec())
        return abs(val - sqrt_pi), 1e-13

    def ts_gaussian():
        val, _ = integrate_1d(lambda q: np.exp(-q * q),
                              QuadratureSpec(scheme="tanh_sinh"))
        return abs(val - sqrt_pi), 1e-12

    def phi_normalization():
        worst = 0.0
        for n in (0, 5, 30):
            for beta in (0.5, 1.0, 3.0):
                spec = (QuadratureSpec(nodes=256) if beta <= 1.0
                        else QuadratureSpec(scheme="tanh_sinh", tol=1e-13))
                val, _ = integrate_1d(lambda q: phi_n(n, q, beta) ** 2, spec)
                worst = max(worst, abs(val - 1.0))
        return worst, 1e-12

    def phi_orthogonality():
        val, _ = integrate_1d(lambda q: phi_n(2, q, 1.0) * phi_n(0, q, 1.0),
                              QuadratureSpec())
        return abs(val), 1e-13

    def kernel_vs_bessel():
        worst = 0.0
        for chi in (1.0, 1e-4, 1e-12, 1e-30, 1e-60):
            t00 = potential_kernel_column(chi, 16)[0]
            worst = max(worst, abs(t00 * sqrt_pi / bessel_k0_scaled(chi) - 1.0))
        return worst, 1e-12

    def kernel_vs_tanh_sinh():
        a = potential_kernel_column(0.01, 16)[6]
        b = kernel_element_tanh_sinh(6, 0, 0.01)
        return abs(a / b - 1.0), 1e-10

    return [
        ("bessel_k0_scaled reference values", k0e_refs),
        ("bessel_k0_scaled strictly decreasing", k0e_monotone),
        ("bessel_k0_scaled large-x asymptotics", k0e_asymptotic),
        ("gauss-hermite gaussian integral", gh_gaussian),
        ("tanh-sinh gaussian integral", ts_gaussian),
        ("oscillator eigenfunction normalization", phi_normalization),
        ("oscillator eigenfunction orthogonality", phi_orthogonality),
        ("radial kernel matches scaled bessel", kernel_vs_bessel),
        ("radial kernel matches tanh-sinh", kernel_vs_tanh_sinh),
    ]


def cmd_selfcheck(args, parser: _Parser) -> int:
    all_ok = True
    for name, case in _selfcheck_cases():
        err, tol = case()
        ok = err <= tol
        all_ok &= ok
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'}  {name} (err {err:.2e}, tol {tol:.0e})\n")
    return 0 if all_ok else 2


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="gravmode",
                     description="gravitational clone-decoherence of a harmonic mode")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_point=False, with_sweep=False):
        if with_point:
            p.add_argument("--omega", type=float, help="mode frequency / Planck frequency")
            p.add_argument("--lc", type=float, help="regularization length / Planck length")
        if with_sweep:
            p.add_argument("--omega-min", type=float, dest="omega_min")
            p.add_argument("--omega-max", type=float, dest="omega_max")
            p.add_argument("--points", type=int)
            p.add_argument("--lc-list", dest="lc_list",
                           help="comma-separated lc values")
        p.add_argument("--nmax", type=int, help="Fock cutoff per mode")
        p.add_argument("--tol", type=float, help="truncation convergence tolerance")
        p.add_argument("--quad", choices=("gh", "ts"),
                       help="quadrature backend (gauss-hermite / tanh-sinh)")
        p.add_argument("--nodes", type=int, help="quadrature nodes (gh axes)")
        p.add_argument("--format", choices=("csv", "json", "text"))
        p.add_argument("--out", help="output path")
        p.add_argument("--config", help="key = value config file; flags override")

    add_common(sub.add_parser("point", help="evaluate a single (omega, lc) pair"),
               with_point=True)
    add_common(sub.add_parser("figure", help="write the sweep table behind the deficit figures"),
               with_sweep=True)
    add_common(sub.add_parser("verify", help="perturbation theory vs exact diagonalization"),
               with_sweep=True)
    add_common(sub.add_parser("selfcheck", help="special-function reference suite"))
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, parser)
    handler = {
        "point": cmd_point,
        "figure": cmd_figure,
        "verify": cmd_verify,
        "selfcheck": cmd_selfcheck,
    }[args.command]
    return handler(args, parser)


if __name__ == "__main__":
    sys.exit(main())
