"""Exact Gaussian simulation of certified field covariances on finite grids.

The grid covariance is always assembled through the Lamperti lift
(`lamperti.field_cov` semantics), factorized by symmetric eigendecomposition
(robust to the near-semidefinite spectra of theta near its bound), and driven
by a counter-based generator: paths are partitioned into fixed blocks of
2^15, each block keyed by SeedSequence(seed, spawn_key=(block,)), and normals
come from the inverse CDF. Output bits therefore depend only on
(seed, grid, kernel), not on chunking or execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import ndtri

from ._backend import core
from .errors import (
    DomainError,
    EigenFailure,
    FactorizationError,
    NotCertifiedError,
    OffGridError,
)
from .kernels import StationaryKernel, kernel_values
from .lamperti import FieldCovariance, RectIncrement
from .reports import VerificationReport, atomic_write_text, canonical_json, csv_float
from .spectral import ThetaCertificate

__all__ = [
    "GridSpec",
    "GridSample",
    "CovarianceFactor",
    "factorize_covariance",
    "draw_values",
    "sample",
    "rectangular_increments",
    "sample_to_csv",
    "sample_to_json",
    "save_samples",
]

MAX_GRID_POINTS = 4096
_PATH_BLOCK = 1 << 15

Certificate = Union[ThetaCertificate, VerificationReport]


def _ascending_positive(points, name: str) -> tuple[float, ...]:
    pts = tuple(float(p) for p in points)
    if not pts:
        raise DomainError(f"{name} must be nonempty")
    if min(pts) <= 0.0:
        raise DomainError(f"{name} must be strictly positive")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise DomainError(f"{name} must be strictly increasing")
    return pts


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid of strictly positive coordinates.

    With include_axes set, a zero row and column are prepended and carry exact
    zeros in every sample (the field vanishes on the axes).
    """

    t1_points: tuple[float, ...]
    t2_points: tuple[float, ...]
    include_axes: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "t1_points", _ascending_positive(self.t1_points, "t1_points"))
        object.__setattr__(self, "t2_points", _ascending_positive(self.t2_points, "t2_points"))
        n1, n2 = self.shape
        if n1 * n2 > MAX_GRID_POINTS:
            raise DomainError(f"grid has {n1 * n2} points, limit is {MAX_GRID_POINTS}")

    @property
    def axis1(self) -> np.ndarray:
        base = np.asarray(self.t1_points, dtype=np.float64)
        return np.concatenate([[0.0], base]) if self.include_axes else base

    @property
    def axis2(self) -> np.ndarray:
        base = np.asarray(self.t2_points, dtype=np.float64)
        return np.concatenate([[0.0], base]) if self.include_axes else base

    @property
    def shape(self) -> tuple[int, int]:
        extra = 1 if self.include_axes else 0
        return (len(self.t1_points) + extra, len(self.t2_points) + extra)

    def positive_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened (t1, t2) coordinates of the positive points, row-major in t1."""
        g1, g2 = np.meshgrid(self.t1_points, self.t2_points, indexing="ij")
        return g1.ravel(), g2.ravel()

    def flat_index(self, point: tuple[float, float]) -> int:
        """Flat row-major index of a grid point; OffGridError when absent."""
        idx = []
        for coord, axis in zip(point, (self.axis1, self.axis2)):
            j = int(np.argmin(np.abs(axis - coord)))
            if abs(axis[j] - coord) > 1e-9 * max(1.0, abs(coord)):
                raise OffGridError(f"coordinate {coord} is not on the grid")
            idx.append(j)
        return idx[0] * self.shape[1] + idx[1]

    def descriptor(self) -> dict:
        return {
            "t1_points": list(self.t1_points),
            "t2_points": list(self.t2_points),
            "include_axes": self.include_axes,
        }


@dataclass(frozen=True)
class GridSample:
    """One realization on a grid; values matrix is indexed [t1, t2]."""

    grid: GridSpec
    values: np.ndarray
    seed: int
    kernel: dict
    path_index: int = 0


@dataclass(frozen=True)
class CovarianceFactor:
    """Eigen factor F of the positive-point covariance: F F^T = C up to clipping."""

    fc: FieldCovariance
    grid: GridSpec
    matrix: np.ndarray
    eigenvalues: np.ndarray
    clip_tol: float
    lambda_max: float

    @property
    def rank(self) -> int:
        return self.matrix.shape[1]


def _grid_covariance(fc: FieldCovariance, grid: GridSpec) -> np.ndarray:
    t1, t2 = grid.positive_points()
    u1, u2 = np.log(t1), np.log(t2)
    h1, h2 = fc.hurst.h1, fc.hurst.h2
    if isinstance(fc.kernel, StationaryKernel):
        cov = core.rtheta_gram(h1, h2, fc.kernel.theta, u1, u2)
    else:
        cov = np.asarray(
            kernel_values(fc.kernel, u1[:, None] - u1[None, :], u2[:, None] - u2[None, :]),
            dtype=np.float64,
        )
    pref = np.exp(h1 * u1 + h2 * u2)
    cov *= pref[:, None]
    cov *= pref[None, :]
    return cov


def _check_certificate(fc: FieldCovariance, certificate: Optional[Certificate]) -> None:
    if isinstance(certificate, ThetaCertificate):
        kern = fc.kernel
        if not isinstance(kern, StationaryKernel):
            raise NotCertifiedError("analytic certificates only apply to StationaryKernel")
        same_h = certificate.hurst == kern.hurst
        if not same_h or abs(kern.theta) > certificate.theta_bound:
            raise NotCertifiedError(
                f"certificate admits |theta| <= {certificate.theta_bound} for "
                f"hurst {certificate.hurst}, kernel has theta={kern.theta}, hurst={kern.hurst}"
            )
        return
    if isinstance(certificate, VerificationReport):
        names = {c.name for c in certificate.checks}
        if "gram_min_eigenvalue" in names and certificate.passed:
            return
        raise NotCertifiedError("verification report is not a passing Gram scan")
    raise NotCertifiedError(
        "factorize_covariance requires a ThetaCertificate or a passing Gram-scan report"
    )


def factorize_covariance(
    fc: FieldCovariance,
    grid: GridSpec,
    certificate: Optional[Certificate],
    clip_tol: float = 1e-12,
) -> CovarianceFactor:
    """Symmetric eigendecomposition of the grid covariance with small-eigenvalue clipping."""
    _check_certificate(fc, certificate)
    if not 0.0 < clip_tol < 1.0:
        raise DomainError("clip_tol must lie in (0, 1)")
    cov = _grid_covariance(fc, grid)
    try:
        eigvals, eigvecs = np.linalg.eigh(cov)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigendecomposition failed: {exc}") from exc
    lam_max = float(eigvals[-1])
    if not lam_max > 0.0:
        raise FactorizationError("covariance matrix has no positive eigenvalue")
    clipped = np.where(eigvals < clip_tol * lam_max, 0.0, eigvals)
    keep = clipped > 0.0
    factor = eigvecs[:, keep] * np.sqrt(clipped[keep])[None, :]

    n = cov.shape[0]
    tol = clip_tol * lam_max * (1.0 + 1e-3) + 64.0 * np.finfo(np.float64).eps * n * lam_max
    worst = float(np.max(np.abs(factor @ factor.T - cov)))
    if worst > tol:
        raise FactorizationError(
            f"factor reconstruction error {worst:.3e} exceeds {tol:.3e}; "
            "kernel covariance is not positive semidefinite at this tolerance"
        )
    return CovarianceFactor(fc, grid, factor, eigvals, clip_tol, lam_max)


def _standard_normals(seed: int, path_start: int, n_paths: int, dim: int) -> np.ndarray:
    """Inverse-CDF normals for paths [path_start, path_start + n_paths).

    Path p draws dim consecutive 64-bit words from the Philox stream of its
    block p // 2^15, so any chunking of a run reproduces identical bits.
    """
    out = np.empty((n_paths, dim), dtype=np.float64)
    row = 0
    p = path_start
    end = path_start + n_paths
    while p < end:
        block = p // _PATH_BLOCK
        lo = p - block * _PATH_BLOCK
        hi = min(end - block * _PATH_BLOCK, _PATH_BLOCK)
        key = np.random.SeedSequence(seed, spawn_key=(block,)).generate_state(2, np.uint64)
        raw = np.random.Philox(key=key).random_raw(hi * dim)[lo * dim :]
        u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
        take = hi - lo
        out[row : row + take] = ndtri(u).reshape(take, dim)
        row += take
        p += take
    return out


def draw_values(
    factor: CovarianceFactor, seed: int, n_paths: int, path_start: int = 0
) -> np.ndarray:
    """Realizations as a (n_paths, n_grid_points) matrix, axis points exactly 0."""
    if n_paths < 0:
        raise DomainError("n_paths must be nonnegative")
    n1, n2 = factor.grid.shape
    full = np.zeros((n_paths, n1 * n2), dtype=np.float64)
    if n_paths == 0:
        return full
    z = _standard_normals(int(seed), int(path_start), n_paths, factor.rank)
    pos = z @ factor.matrix.T
    if factor.grid.include_axes:
        body = pos.reshape(n_paths, n1 - 1, n2 - 1)
        grid_view = full.reshape(n_paths, n1, n2)
        grid_view[:, 1:, 1:] = body
    else:
        full[:] = pos
    return full


def sample(factor: CovarianceFactor, seed: int, n_paths: int) -> list[GridSample]:
    """Draw n_paths realizations as GridSample objects (deterministic in seed)."""
    flat = draw_values(factor, seed, n_paths)
    n1, n2 = factor.grid.shape
    descriptor = factor.fc.descriptor()
    return [
        GridSample(
            grid=factor.grid,
            values=flat[i].reshape(n1, n2).copy(),
            seed=int(seed),
            kernel=descriptor,
            path_index=i,
        )
        for i in range(n_paths)
    ]


def rectangular_increments(sample: GridSample, rect: RectIncrement) -> float:
    """Four-corner alternating sum of the sample over the rectangle."""
    flat = sample.values.ravel()
    total = 0.0
    for corner, sign in rect.corners():
        total += sign * float(flat[sample.grid.flat_index(corner)])
    return total


def sample_to_csv(sample: GridSample) -> str:
    """Row-major CSV: header names the t2 coordinates, first column is t1."""
    header = "t1," + ",".join(csv_float(t) for t in sample.grid.axis2)
    lines = [header]
    for i, t1 in enumerate(sample.grid.axis1):
        row = ",".join(csv_float(v) for v in sample.values[i])
        lines.append(f"{csv_float(t1)},{row}")
    return "\n".join(lines) + "\n"


def sample_to_json(sample: GridSample) -> str:
    return canonical_json(
        {
            "schema": "sample/1",
            "grid": sample.grid.descriptor(),
            "seed": sample.seed,
            "path": sample.path_index,
            "kernel": sample.kernel,
            "values": sample.values.tolist(),
        }
    )


def save_samples(
    samples: Sequence[GridSample],
    directory,
    formats: Sequence[str] = ("csv", "json"),
) -> list[str]:
    """Write one file per path per format; atomic, returns the paths written."""
    import os

    os.makedirs(directory, exist_ok=True)
    written = []
    for s in samples:
        stem = os.path.join(os.fspath(directory), f"sample_{s.path_index:05d}")
        if "csv" in formats:
            atomic_write_text(stem + ".csv", sample_to_csv(s))
            written.append(stem + ".csv")
        if "json" in formats:
            atomic_write_text(stem + ".json", sample_to_json(s))
            written.append(stem + ".json")
    return written
