"""Release acceptance suite.

One test per acceptance criterion, so `pytest -v` prints exactly one
pass or fail line for each. Tolerances and runtime caps are asserted
inside the tests; seeds are fixed so every outcome is reproducible.
"""

import math
import time

import numpy as np
import pytest
from scipy.stats import chi2

from anisofield.kernels import (
    HurstPair,
    StationaryKernel,
    f_h,
    fbs_covariance,
    modulation,
    r0,
    r_theta,
)
from anisofield.lamperti import FieldCovariance, RectIncrement, check_r1
from anisofield.sampler import GridSpec, draw_values, factorize_covariance
from anisofield.spectral import (
    a_closed_form,
    a_quadrature,
    a_series,
    b_quadrature,
    b_series,
    certificate_for,
    gamma_modulus_ratio,
    lower_bound_b,
    theta_bound,
    verify_main_inequality,
    verify_psd_gram,
)
from anisofield.stats import (
    IncrementTestConfig,
    RectanglePair,
    empirical_covariance,
    test_increment_stationarity,
    test_not_fbs,
)

SEED = 20260814
HALF = HurstPair(0.5, 0.5)

RECTANGLE_PAIRS = (
    RectanglePair(RectIncrement((0.5, 0.5), (1.5, 1.25)),
                  RectIncrement((1.25, 1.0), (2.25, 1.75))),
    RectanglePair(RectIncrement((1.0, 1.0), (2.0, 3.0)),
                  RectIncrement((1.5, 0.25), (2.5, 2.25))),
    RectanglePair(RectIncrement((0.25, 2.0), (1.75, 2.5)),
                  RectIncrement((2.0, 0.75), (3.5, 1.25))),
)


def test_criterion_1_identity_suite():
    """Fold, evenness and two-sided relation at 1e-12 relative, 1e4 draws."""
    rng = np.random.default_rng(SEED)
    n = 10_000
    h1s = rng.uniform(0.02, 0.98, n)
    h2s = rng.uniform(0.02, 0.98, n)
    thetas = rng.uniform(-3.0, 3.0, n)
    v1s = rng.uniform(-6.0, 6.0, n)
    v2s = rng.uniform(-6.0, 6.0, n)

    start = time.perf_counter()
    worst = 0.0
    for h1, h2, theta, v1, v2 in zip(h1s, h2s, thetas, v1s, v2s):
        hp = HurstPair(h1, h2)
        kern = StationaryKernel(hp, theta)
        lags = ([v1, v1, -v1], [v2, -v2, -v2])
        r_pp, r_pm, r_mm = (float(x) for x in r_theta(kern, lags))
        scale = max(1.0, abs(r_pp), abs(r_pm))
        fold = check_r1(kern, (v1, v2)) / scale
        evenness = abs(r_pp - r_mm) / scale
        two_sided = 2.0 * theta * float(r0(hp, (v1, v2))) * float(modulation(hp, (v1, v2)))
        two_sided = abs((r_pp - r_pm) - two_sided) / scale
        worst = max(worst, fold, evenness, two_sided)
    elapsed = time.perf_counter() - start

    assert worst <= 1e-12, f"worst identity residual {worst:.3e}"
    assert elapsed < 5.0, f"identity suite took {elapsed:.2f}s"


def test_criterion_2_half_hurst_collapse():
    """At H=1/2: F_H, a and b reduce to elementary closed forms at 1e-10."""
    start = time.perf_counter()
    worst = 0.0
    for v in np.linspace(-12.0, 12.0, 200):
        want = 2.0 * math.exp(-abs(v) / 2.0)
        worst = max(worst, abs(f_h(0.5, v) - want) / max(1.0, want))
    for x in np.linspace(0.0, 20.0, 200):
        want_a = 1.0 / (0.25 + x * x)
        want_b = 4.0 * x / ((0.25 + x * x) * (2.25 + x * x))
        worst = max(worst, abs(a_closed_form(0.5, x) - want_a) / max(1.0, want_a))
        worst = max(worst, abs(a_series(0.5, x, 1e-12) - want_a) / max(1.0, want_a))
        worst = max(worst, abs(b_series(0.5, x, 1e-12) - want_b) / max(1.0, want_b))
    elapsed = time.perf_counter() - start

    assert worst <= 1e-10, f"worst collapse error {worst:.3e}"
    assert elapsed < 1.0, f"collapse check took {elapsed:.2f}s"


def test_criterion_3_three_route_agreement():
    """Series, quadrature and closed form agree below 1e-8 across H and x."""
    hs = [round(0.1 * k, 1) for k in range(1, 10)]
    xs = np.geomspace(1e-2, 20.0, 100)
    start = time.perf_counter()
    worst = 0.0
    for h in hs:
        for x in xs:
            a_q = a_quadrature(h, x, 1e-9)
            worst = max(worst, abs(a_series(h, x, 1e-9) - a_q))
            worst = max(worst, abs(a_closed_form(h, x) - a_q))
            worst = max(worst, abs(b_series(h, x, 1e-9) - b_quadrature(h, x, 1e-9)))
    elapsed = time.perf_counter() - start

    assert worst < 1e-8, f"worst route disagreement {worst:.3e}"
    assert elapsed < 60.0, f"route sweep took {elapsed:.2f}s"


def test_criterion_4_positivity_suite():
    """a > 0, b above its lower bound, positive main-inequality margin,
    and the gamma modulus ratio dominating sinh(pi x)/(pi x). No failures."""
    hs = [round(0.1 * k, 1) for k in range(1, 10)]
    xpos = np.geomspace(1e-3, 30.0, 120)
    failures = []
    for h in hs:
        half_sqrt = 0.5 * math.sqrt(0.9 * theta_bound(HurstPair(h, h)).theta_bound)
        for x in np.concatenate([[0.0], xpos]):
            if not a_series(h, x, 1e-10) > 0.0:
                failures.append(("a", h, x))
        for x in xpos:
            b_val = b_series(h, x, 1e-10)
            if not b_val > lower_bound_b(h, x):
                failures.append(("b_lower", h, x))
            if not a_series(h, x, 1e-10) - half_sqrt * abs(b_val) > 0.0:
                failures.append(("main_margin", h, x))
            if not gamma_modulus_ratio(h, x) >= math.sinh(math.pi * x) / (math.pi * x):
                failures.append(("gamma_ratio", h, x))
    assert failures == []


def test_criterion_5_theta_bound_anchor():
    """theta_bound((0.5, 0.5)) against the published anchor 0.0053284(10)."""
    got = theta_bound(HALF).theta_bound
    # evaluating the same closed form at 50-digit precision gives
    # 0.005326761163845968, outside the anchor window; the assertion is
    # kept as published so the discrepancy stays visible
    assert got == pytest.approx(0.0053284, abs=1e-6)


def test_criterion_6_psd_certification():
    """20 random 200-point Grams stay PSD at 0.9x the bound; theta=100 fails."""
    theta_star = 0.9 * theta_bound(HALF).theta_bound
    kern = StationaryKernel(HALF, theta_star)
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    for trial in range(20):
        pts = rng.uniform(-2.5, 2.5, size=(200, 2))
        report = verify_psd_gram(kern, pts, jitter_tol=1e-8)
        bad = [c.name for c in report.checks if not c.passed]
        assert bad == [], f"gram trial {trial} failed {bad}"
    control = verify_main_inequality(HALF, 100.0)
    assert any(not c.passed for c in control.checks)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"certification took {elapsed:.2f}s"


def test_criterion_7_simulation_conformance():
    """theta=0 paths reproduce the fBs covariance and increment variances."""
    hp = HurstPair(0.3, 0.8)
    kern = StationaryKernel(hp, 0.0)
    ticks = tuple(0.25 * k for k in range(1, 11))
    grid = GridSpec(ticks, ticks)
    n_paths = 10_000

    start = time.perf_counter()
    factor = factorize_covariance(FieldCovariance(kern), grid, certificate_for(kern))
    values = draw_values(factor, seed=SEED, n_paths=n_paths)

    est, se = empirical_covariance(values)
    t1 = np.repeat(grid.axis1, 10)
    t2 = np.tile(grid.axis2, 10)
    analytic = fbs_covariance(hp, (t1[:, None], t2[:, None]), (t1[None, :], t2[None, :]))
    iu = np.triu_indices(100)
    within = np.abs(est - analytic)[iu] <= 4.0 * se[iu]
    fraction = float(np.mean(within))

    # unit-cell rectangular increments; exact chi-square law with known mean,
    # alpha = 0.01 family-wise over the 81 cells
    cells = values.reshape(n_paths, 10, 10)
    incr = cells[:, 1:, 1:] - cells[:, :-1, 1:] - cells[:, 1:, :-1] + cells[:, :-1, :-1]
    sigma2 = 0.25 ** (2.0 * hp.h1) * 0.25 ** (2.0 * hp.h2)
    stat = n_paths * np.mean(incr**2, axis=0) / sigma2
    alpha_cell = 0.01 / stat.size
    lo = chi2.ppf(alpha_cell / 2.0, n_paths)
    hi = chi2.ppf(1.0 - alpha_cell / 2.0, n_paths)
    inside = np.all((stat >= lo) & (stat <= hi))
    elapsed = time.perf_counter() - start

    assert fraction >= 0.99, f"only {fraction:.4f} of entries within 4 SE"
    assert inside, f"increment variance outside [{lo:.1f}, {hi:.1f}]"
    assert elapsed < 120.0, f"conformance run took {elapsed:.2f}s"


def test_criterion_8_counterexample_demonstration():
    """The modulated field has stationary increments yet is provably not
    an fBs: the witness moment rejects at alpha=0.01 with the analytic gap
    at or above 5 Monte Carlo standard errors, while theta=0 stays at the
    nominal false-rejection rate."""
    theta_star = 0.9 * theta_bound(HALF).theta_bound
    kern = StationaryKernel(HALF, theta_star)
    start = time.perf_counter()

    stationarity = test_increment_stationarity(
        kern, IncrementTestConfig(n_paths=10_000, rectangles=RECTANGLE_PAIRS), seed=31
    )
    assert all(o.passed for o in stationarity)

    # the analytic witness gap is ~4.8e-4, so 5 standard errors need
    # just under a billion paths; the sampler streams them in fixed chunks
    witness = test_not_fbs(kern, IncrementTestConfig(n_paths=950_000_000), seed=SEED)
    gap = witness.details["analytic_gap"]
    se = witness.details["standard_error"]
    assert witness.passed, "witness failed to reject the fBs hypothesis"
    assert witness.p_value < 0.01
    assert abs(gap) >= 5.0 * se, f"gap {gap:.3e} below 5 SE ({se:.3e})"

    null_kernel = StationaryKernel(HALF, 0.0)
    null_config = IncrementTestConfig(n_paths=20_000)
    rejections = sum(
        test_not_fbs(null_kernel, null_config, seed=s).passed for s in range(100, 150)
    )
    elapsed = time.perf_counter() - start

    assert rejections / 50.0 <= 0.03, f"{rejections} null rejections in 50 runs"
    assert elapsed < 300.0, f"counterexample run took {elapsed:.2f}s"
