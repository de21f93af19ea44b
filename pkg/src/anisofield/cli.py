"""Batch command line interface.

Every verification and simulation is a subcommand that writes a versioned
JSON report (schema "report/1") plus CSV artifacts into the output directory.
Settings come from an INI config file overridden by flags; the resolved
configuration is echoed into each report. Exit codes: 0 all checks passed,
1 a check failed or a certificate was refused, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ._backend import backend_name
from ._util import thread_count
from ._version import __version__
from .errors import (
    AnisoFieldError,
    BackendError,
    ConfigError,
    DegenerateWitnessError,
    DomainError,
    OffGridError,
)
from .kernels import HurstPair, StationaryKernel, f_h, r0, r_theta
from .lamperti import (
    FieldCovariance,
    RectIncrement,
    check_lemma1,
    check_lemma2,
    check_lemma3,
    check_r1,
    field_cov,
)
from .reports import CheckRecord, VerificationReport, atomic_write_text, csv_float
from .sampler import GridSpec, draw_values, factorize_covariance, sample, save_samples
from .spectral import (
    ThetaCertificate,
    a_closed_form,
    a_quadrature,
    a_series,
    b_quadrature,
    b_series,
    certificate_for,
    fourier_inversion_scan,
    theta_bound,
    verify_main_inequality,
    verify_psd_gram,
)
from .stats import (
    IncrementTestConfig,
    RectanglePair,
    empirical_covariance,
    test_increment_stationarity,
    test_not_fbs,
)

__all__ = ["RunConfig", "main"]

_DEFAULT_GRID = tuple(0.25 * k for k in range(1, 11))
_DEFAULT_LAGS = tuple(-3.0 + 0.5 * k for k in range(13))
_DEFAULT_FREQS = tuple(float(x) for x in np.geomspace(1e-2, 20.0, 25))
_DEFAULT_PAIRS = (
    RectanglePair(
        RectIncrement((0.5, 0.5), (1.5, 1.25)), RectIncrement((1.25, 1.0), (2.25, 1.75))
    ),
    RectanglePair(
        RectIncrement((1.0, 1.0), (2.0, 3.0)), RectIncrement((1.5, 0.25), (2.5, 2.25))
    ),
    RectanglePair(
        RectIncrement((0.25, 2.0), (1.75, 2.5)), RectIncrement((2.0, 0.75), (3.5, 1.25))
    ),
)


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings for one command invocation, echoed into reports."""

    command: str
    hurst: HurstPair = HurstPair(0.5, 0.5)
    theta: Union[float, str] = "auto"
    seed: int = 0
    out: str = "out"
    tol: float = 1e-8
    paths: int = 10000
    significance: float = 0.01
    grid_t1: tuple[float, ...] = _DEFAULT_GRID
    grid_t2: tuple[float, ...] = _DEFAULT_GRID
    include_axes: bool = False
    lags_v1: tuple[float, ...] = _DEFAULT_LAGS
    lags_v2: tuple[float, ...] = _DEFAULT_LAGS
    freqs: tuple[float, ...] = _DEFAULT_FREQS
    draws: int = 200
    gram_points: int = 200
    save_limit: int = 4
    rectangles: tuple[RectanglePair, ...] = _DEFAULT_PAIRS

    def __post_init__(self) -> None:
        if isinstance(self.theta, str) and self.theta != "auto":
            raise ConfigError(f"theta must be a number or 'auto', got {self.theta!r}")
        if not self.tol > 0.0:
            raise ConfigError("tol must be positive")
        if self.draws < 1:
            raise ConfigError("draws must be at least 1")
        if not 2 <= self.gram_points <= 2048:
            raise ConfigError("gram_points must lie in [2, 2048]")
        if self.save_limit < 0:
            raise ConfigError("save_limit must be nonnegative")
        if not 0.0 < self.significance < 1.0:
            raise ConfigError("significance must lie in (0, 1)")

    def resolved_theta(self) -> float:
        if self.theta == "auto":
            return 0.9 * theta_bound(self.hurst).theta_bound
        return float(self.theta)

    def echo(self) -> dict:
        return {
            "command": self.command,
            "hurst": {"h1": self.hurst.h1, "h2": self.hurst.h2},
            "theta": {"requested": self.theta, "resolved": self.resolved_theta()},
            "seed": self.seed,
            "out": self.out,
            "tol": self.tol,
            "paths": self.paths,
            "significance": self.significance,
            "grid": {
                "t1": list(self.grid_t1),
                "t2": list(self.grid_t2),
                "include_axes": self.include_axes,
            },
            "lags": {"v1": list(self.lags_v1), "v2": list(self.lags_v2)},
            "frequencies": list(self.freqs),
            "draws": self.draws,
            "gram_points": self.gram_points,
            "save_limit": self.save_limit,
            "rectangles": [
                {"base": {"u": list(p.base.u), "v": list(p.base.v)},
                 "shifted": {"u": list(p.shifted.u), "v": list(p.shifted.v)}}
                for p in self.rectangles
            ],
            "threads": thread_count(),
            "backend": backend_name(),
            "version": __version__,
        }


# ---------------------------------------------------------------------------
# config parsing

def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise ConfigError(f"expected at least one number, got {text!r}")
    return values


def _parse_hurst(text: str) -> HurstPair:
    values = _parse_floats(text)
    if len(values) != 2:
        raise ConfigError(f"hurst needs exactly two components, got {text!r}")
    return HurstPair(values[0], values[1])


def _parse_theta(text: str) -> Union[float, str]:
    if text.strip().lower() == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"theta must be a number or 'auto', got {text!r}") from exc


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {text!r}") from exc


def _parse_rect_pair(text: str) -> RectanglePair:
    values = _parse_floats(text)
    if len(values) != 8:
        raise ConfigError(
            "each rectangle pair needs 8 numbers: base u1,u2,v1,v2 then shifted u1,u2,v1,v2"
        )
    base = RectIncrement((values[0], values[1]), (values[2], values[3]))
    shifted = RectIncrement((values[4], values[5]), (values[6], values[7]))
    return RectanglePair(base, shifted)


# (section, key) -> (RunConfig field, parser)
_FILE_KEYS: dict[tuple[str, str], tuple[str, Callable]] = {
    ("run", "hurst"): ("hurst", _parse_hurst),
    ("run", "theta"): ("theta", _parse_theta),
    ("run", "seed"): ("seed", _parse_int),
    ("run", "out"): ("out", str),
    ("run", "tol"): ("tol", float),
    ("run", "paths"): ("paths", _parse_int),
    ("run", "significance"): ("significance", float),
    ("run", "save_limit"): ("save_limit", _parse_int),
    ("grid", "t1"): ("grid_t1", _parse_floats),
    ("grid", "t2"): ("grid_t2", _parse_floats),
    ("grid", "include_axes"): ("include_axes", _parse_bool),
    ("lags", "v1"): ("lags_v1", _parse_floats),
    ("lags", "v2"): ("lags_v2", _parse_floats),
    ("spectral", "x"): ("freqs", _parse_floats),
    ("verify", "draws"): ("draws", _parse_int),
    ("verify", "gram_points"): ("gram_points", _parse_int),
}


def _load_config_file(path: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path) as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path!r}: {exc}") from exc

    overrides: dict = {}
    for section in parser.sections():
        if section == "test":
            pairs = []
            for key, raw in parser.items(section):
                if not key.startswith("pair"):
                    raise ConfigError(f"unknown config key [{section}] {key}")
                pairs.append(_parse_rect_pair(raw))
            if pairs:
                overrides["rectangles"] = tuple(pairs)
            continue
        for key, raw in parser.items(section):
            spec = _FILE_KEYS.get((section, key))
            if spec is None:
                raise ConfigError(f"unknown config key [{section}] {key}")
            name, parse = spec
            try:
                overrides[name] = parse(raw)
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc
    return overrides


def _build_config(args: argparse.Namespace) -> RunConfig:
    settings: dict = {"command": args.command}
    if args.config is not None:
        settings.update(_load_config_file(args.config))
    if args.hurst is not None:
        settings["hurst"] = _parse_hurst(args.hurst)
    if args.theta is not None:
        settings["theta"] = _parse_theta(args.theta)
    if args.seed is not None:
        settings["seed"] = args.seed
    if args.out is not None:
        settings["out"] = args.out
    if args.tol is not None:
        settings["tol"] = args.tol
    if args.paths is not None:
        settings["paths"] = args.paths
    return RunConfig(**settings)


def _write_report(cfg: RunConfig, report: VerificationReport, filename: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, filename)
    atomic_write_text(path, report.to_json())
    return path


# ---------------------------------------------------------------------------
# subcommands

def cmd_kernel_eval(cfg: RunConfig) -> VerificationReport:
    start = time.perf_counter()
    kernel = StationaryKernel(cfg.hurst, cfg.resolved_theta())
    h1, h2 = cfg.hurst.h1, cfg.hurst.h2
    lines = ["v1,v2,F_H1,F_H2,R0,R_theta"]
    for v1 in cfg.lags_v1:
        for v2 in cfg.lags_v2:
            row = (
                v1,
                v2,
                f_h(h1, v1),
                f_h(h2, v2),
                r0(cfg.hurst, (v1, v2)),
                r_theta(kernel, (v1, v2)),
            )
            lines.append(",".join(csv_float(x) for x in row))
    origin_err = abs(float(r_theta(kernel, (0.0, 0.0))) - 1.0)
    checks = [
        CheckRecord(
            name="origin_normalization",
            passed=origin_err == 0.0,
            statistic=origin_err,
            threshold=0.0,
            inputs={"lag": [0.0, 0.0]},
        )
    ]
    report = VerificationReport(cfg.echo(), checks, time.perf_counter() - start)
    os.makedirs(cfg.out, exist_ok=True)
    csv_path = os.path.join(cfg.out, "kernel_eval.csv")
    atomic_write_text(csv_path, "\n".join(lines) + "\n")
    _write_report(cfg, report, "kernel_eval_report.json")
    print(f"kernel-eval: wrote {len(lines) - 1} rows to {csv_path}")
    return report


def cmd_theta_bound(cfg: RunConfig) -> VerificationReport:
    start = time.perf_counter()
    cert = theta_bound(cfg.hurst)
    theta = cfg.resolved_theta()
    checks = [
        CheckRecord(
            name="theta_bound",
            passed=True,
            statistic=cert.theta_bound,
            threshold=cert.tolerance,
            inputs=dict(cert.evidence),
        ),
        CheckRecord(
            name="theta_within_bound",
            passed=abs(theta) <= cert.theta_bound,
            statistic=abs(theta),
            threshold=cert.theta_bound,
            inputs={"theta": theta},
        ),
    ]
    report = VerificationReport(cfg.echo(), checks, time.perf_counter() - start)
    _write_report(cfg, report, "theta_bound_report.json")
    print(
        f"theta_bound(h1={cfg.hurst.h1:g}, h2={cfg.hurst.h2:g}) = "
        f"{csv_float(cert.theta_bound)}"
    )
    return report


def cmd_spectral(cfg: RunConfig) -> VerificationReport:
    start = time.perf_counter()
    eval_tol = cfg.tol / 4.0
    hs = [cfg.hurst.h1]
    if cfg.hurst.h2 != cfg.hurst.h1:
        hs.append(cfg.hurst.h2)
    lines = ["h,x,a_series,a_quadrature,a_closed_form,b_series,b_quadrature"]
    checks = []
    for h in hs:
        worst = {"a_series_vs_closed": 0.0, "a_series_vs_quadrature": 0.0,
                 "b_series_vs_quadrature": 0.0}
        for x in cfg.freqs:
            a_s = a_series(h, x, eval_tol)
            a_q = a_quadrature(h, x, eval_tol)
            a_c = a_closed_form(h, x)
            b_s = b_series(h, x, eval_tol)
            b_q = b_quadrature(h, x, eval_tol)
            lines.append(",".join(csv_float(v) for v in (h, x, a_s, a_q, a_c, b_s, b_q)))
            worst["a_series_vs_closed"] = max(worst["a_series_vs_closed"], abs(a_s - a_c))
            worst["a_series_vs_quadrature"] = max(
                worst["a_series_vs_quadrature"], abs(a_s - a_q)
            )
            worst["b_series_vs_quadrature"] = max(
                worst["b_series_vs_quadrature"], abs(b_s - b_q)
            )
        for name, value in worst.items():
            checks.append(
                CheckRecord(
                    name=f"{name}_h={h:g}",
                    passed=value <= cfg.tol,
                    statistic=value,
                    threshold=cfg.tol,
                    inputs={"h": h, "x_count": len(cfg.freqs)},
                )
            )
    report = VerificationReport(cfg.echo(), checks, time.perf_counter() - start)
    os.makedirs(cfg.out, exist_ok=True)
    csv_path = os.path.join(cfg.out, "spectral.csv")
    atomic_write_text(csv_path, "\n".join(lines) + "\n")
    _write_report(cfg, report, "spectral_report.json")
    print(f"spectral: wrote {len(lines) - 1} rows to {csv_path}")
    return report


def cmd_verify(cfg: RunConfig) -> VerificationReport:
    start = time.perf_counter()
    theta = cfg.resolved_theta()
    kernel = StationaryKernel(cfg.hurst, theta)
    fc = FieldCovariance(kernel)
    rng = np.random.default_rng(cfg.seed)

    lags = rng.uniform(-3.0, 3.0, size=(cfg.draws, 2))
    res_r1 = max(check_r1(kernel, v) for v in lags)
    res_even = max(
        abs(float(r_theta(kernel, (v[0], v[1]))) - float(r_theta(kernel, (-v[0], -v[1]))))
        for v in lags
    )
    ts = rng.uniform(0.1, 4.0, size=(cfg.draws, 2))
    ss = rng.uniform(0.1, 4.0, size=(cfg.draws, 2))
    res_l1 = max(max(check_lemma1(fc, t, s)) for t, s in zip(ts, ss))
    res_l2 = max(max(check_lemma2(fc, t, s)) for t, s in zip(ts, ss))
    res_l3 = max(check_lemma3(fc, t, s) for t, s in zip(ts, ss))
    res_sym = max(
        abs(field_cov(fc, t, s) - field_cov(fc, s, t)) for t, s in zip(ts, ss)
    )

    def residual_check(name: str, value: float) -> CheckRecord:
        return CheckRecord(
            name=name,
            passed=value <= cfg.tol,
            statistic=float(value),
            threshold=cfg.tol,
            inputs={"draws": cfg.draws, "seed": cfg.seed},
        )

    checks = [
        residual_check("folded_identity", res_r1),
        residual_check("kernel_evenness", res_even),
        residual_check("increment_variance_identity", res_l1),
        residual_check("mixed_product_identity", res_l2),
        residual_check("folded_two_point_identity", res_l3),
        residual_check("covariance_symmetry", res_sym),
    ]

    cert = theta_bound(cfg.hurst)
    checks.append(
        CheckRecord(
            name="theta_within_bound",
            passed=abs(theta) <= cert.theta_bound,
            statistic=abs(theta),
            threshold=cert.theta_bound,
            inputs={"theta": theta},
        )
    )
    checks.extend(verify_main_inequality(cfg.hurst, theta).checks)
    checks.extend(fourier_inversion_scan(kernel).checks)
    gram_pts = rng.uniform(-2.5, 2.5, size=(cfg.gram_points, 2))
    checks.extend(verify_psd_gram(kernel, gram_pts).checks)

    report = VerificationReport(cfg.echo(), checks, time.perf_counter() - start)
    _write_report(cfg, report, "verify_report.json")
    return report


def _grid_log_points(grid: GridSpec) -> np.ndarray:
    t1, t2 = grid.positive_points()
    pts = np.column_stack([np.log(t1), np.log(t2)])
    if pts.shape[0] > 2048:
        stride = -(-pts.shape[0] // 2048)
        pts = pts[::stride]
    return pts


def cmd_simulate(cfg: RunConfig) -> VerificationReport:
    start = time.perf_counter()
    if cfg.paths < 2:
        raise ConfigError("simulate needs paths >= 2")
    theta = cfg.resolved_theta()
    kernel = StationaryKernel(cfg.hurst, theta)
    fc = FieldCovariance(kernel)
    grid = GridSpec(cfg.grid_t1, cfg.grid_t2, cfg.include_axes)

    cert = certificate_for(kernel, points=_grid_log_points(grid))
    method = cert.method if isinstance(cert, ThetaCertificate) else "gram_scan"
    factor = factorize_covariance(fc, grid, cert)
    checks = [
        CheckRecord(
            name="certificate",
            passed=True,
            statistic=abs(theta),
            threshold=cert.theta_bound if isinstance(cert, ThetaCertificate) else None,
            inputs={"method": method},
        ),
        CheckRecord(
            name="factorization_rank",
            passed=True,
            statistic=factor.rank,
            threshold=factor.clip_tol,
            inputs={"lambda_max": factor.lambda_max, "n_points": int(np.prod(grid.shape))},
        ),
    ]

    values = draw_values(factor, cfg.seed, cfg.paths)
    n1, n2 = grid.shape
    diag = [(i, i) for i in range(n1 * n2)]
    est, se = empirical_covariance(values, diag)
    axis1, axis2 = grid.axis1, grid.axis2
    for i in range(n1 * n2):
        t1v, t2v = float(axis1[i // n2]), float(axis2[i % n2])
        analytic = float(field_cov(fc, (t1v, t2v), (t1v, t2v)))
        err = abs(float(est[i]) - analytic)
        checks.append(
            CheckRecord(
                name=f"variance[{i}]",
                passed=err <= 5.0 * float(se[i]),
                statistic=err,
                threshold=5.0 * float(se[i]),
                inputs={"t1": t1v, "t2": t2v, "empirical": float(est[i]), "analytic": analytic},
            )
        )

    n_save = min(cfg.save_limit, cfg.paths)
    if n_save > 0:
        paths_dir = os.path.join(cfg.out, "samples")
        written = save_samples(sample(factor, cfg.seed, n_save), paths_dir)
        print(f"simulate: wrote {len(written)} sample files to {paths_dir}")
    report = VerificationReport(cfg.echo(), checks, time.perf_counter() - start)
    _write_report(cfg, report, "simulate_report.json")
    return report


def cmd_test(cfg: RunConfig) -> VerificationReport:
    start = time.perf_counter()
    theta = cfg.resolved_theta()
    kernel = StationaryKernel(cfg.hurst, theta)
    tconfig = IncrementTestConfig(
        n_paths=cfg.paths, rectangles=cfg.rectangles, significance=cfg.significance
    )

    checks = []
    for outcome in test_increment_stationarity(kernel, tconfig, cfg.seed):
        corrected = outcome.details.get("threshold")
        inputs = {k: v for k, v in outcome.details.items() if k != "threshold"}
        inputs["statistic"] = outcome.statistic
        inputs["description"] = outcome.description
        checks.append(
            CheckRecord(
                name=outcome.name,
                passed=outcome.passed,
                statistic=outcome.p_value,
                threshold=corrected,
                inputs=inputs,
            )
        )

    witness = test_not_fbs(kernel, tconfig, cfg.seed)
    expect_reject = theta != 0.0
    behaved = witness.passed if expect_reject else not witness.passed
    inputs = dict(witness.details)
    inputs["statistic"] = witness.statistic
    inputs["expected"] = "reject" if expect_reject else "no_reject"
    checks.append(
        CheckRecord(
            name=witness.name,
            passed=behaved,
            statistic=witness.p_value,
            threshold=cfg.significance,
            inputs=inputs,
        )
    )

    report = VerificationReport(cfg.echo(), checks, time.perf_counter() - start)
    _write_report(cfg, report, "test_report.json")
    return report


_DISPATCH: dict[str, Callable[[RunConfig], VerificationReport]] = {
    "kernel-eval": cmd_kernel_eval,
    "theta-bound": cmd_theta_bound,
    "spectral": cmd_spectral,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "test": cmd_test,
}


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", metavar="PATH", help="INI config file")
    shared.add_argument("--hurst", metavar="H1,H2", help="Hurst pair, each in (0,1)")
    shared.add_argument("--theta", metavar="VALUE|auto", help="modulation size")
    shared.add_argument("--seed", type=int, metavar="N", help="random seed")
    shared.add_argument("--out", metavar="DIR", help="output directory")
    shared.add_argument("--tol", type=float, metavar="X", help="check tolerance")
    shared.add_argument("--paths", type=int, metavar="N", help="Monte Carlo paths")

    parser = argparse.ArgumentParser(
        prog="anisofield",
        description="Construct, verify and simulate modulated self-similar fields.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("kernel-eval", "tabulate F_H, R0 and R_theta on a lag grid"),
        ("verify", "run every analytic identity and positivity check"),
        ("theta-bound", "print the admissible modulation bound"),
        ("spectral", "dump the a/b spectral tables by all routes"),
        ("simulate", "draw exact Gaussian samples and compare variances"),
        ("test", "Monte Carlo stationarity and distinguishability tests"),
    ):
        sub.add_parser(name, parents=[shared], help=text)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        thread_count()
        cfg = _build_config(args)
        report = _DISPATCH[cfg.command](cfg)
    except (ConfigError, DomainError, OffGridError, BackendError, DegenerateWitnessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AnisoFieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    n_pass = sum(1 for c in report.checks if c.passed)
    print(f"{cfg.command}: {n_pass}/{len(report.checks)} checks passed")
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
