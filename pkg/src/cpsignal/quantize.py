"""Grid quantization of sampled continuous sources, with a certified budget.

A continuous source enters as a sample file; samples are binned on a box
grid, each bin represented by its geometric center, and the resulting
discrete instance is handed to the solvers. The value of the discrete
problem over-estimates the continuous optimum by at most

    epsilon = (2 ||z_q|| + ||e||) ||V||_2 ||e||,

where ``e = z - z_q`` is the quantization error and both norms are
root-mean-square estimates over the same sample set, so the continuous
optimum is certified to lie in [discrete value - epsilon, discrete value].
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dnn import sym_eig
from .model import CostVariant, JointPmf


class OutOfBoxError(ValueError):
    """A sample lies outside the quantizer box; carries the first index."""

    def __init__(self, index: int, point):
        self.index = int(index)
        super().__init__(f"sample {index} lies outside the quantizer box: {point}")


@dataclass(frozen=True)
class SampleSet:
    points: np.ndarray  # (count, dim)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        if pts.shape[0] < 1:
            raise ValueError("need at least one sample")
        if not np.all(np.isfinite(pts)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class GridQuantizer:
    """Axis-aligned box split into per-dimension uniform bins.

    The representative of each cell is its geometric center (a conditional
    centroid would need the unknown density; centers keep the budget
    computable from samples alone).
    """

    lower: np.ndarray
    upper: np.ndarray
    bins: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64).ravel()
        upper = np.asarray(self.upper, dtype=np.float64).ravel()
        bins = np.asarray(self.bins, dtype=np.int64).ravel()
        if not (lower.shape == upper.shape == bins.shape):
            raise ValueError("lower, upper and bins must have equal length")
        if np.any(upper <= lower):
            raise ValueError("box must satisfy lower < upper componentwise")
        if np.any(bins < 1):
            raise ValueError("bins must be positive integers")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "bins", bins)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return (self.upper - self.lower) / self.bins

    def assign(self, samples: SampleSet) -> np.ndarray:
        """Per-dimension bin indices for every sample; rejects out-of-box points."""
        pts = samples.points
        if pts.shape[1] != self.dim:
            raise ValueError(f"samples have dimension {pts.shape[1]}, grid expects {self.dim}")
        outside = np.any((pts < self.lower) | (pts > self.upper), axis=1)
        if np.any(outside):
            first = int(np.argmax(outside))
            raise OutOfBoxError(first, pts[first])
        idx = np.floor((pts - self.lower) / self.widths).astype(np.int64)
        return np.minimum(idx, self.bins - 1)  # points exactly at the top edge

    def centers(self, idx: np.ndarray) -> np.ndarray:
        return self.lower + (idx + 0.5) * self.widths


@dataclass(frozen=True)
class ErrorBudget:
    """Empirical norms feeding the certification bound."""

    e_norm: float       # RMS of ||z - z_q||
    zq_norm: float      # RMS of ||z_q||
    v_spectral: float   # ||V||_2
    epsilon: float

    def __post_init__(self):
        expected = (2.0 * self.zq_norm + self.e_norm) * self.v_spectral * self.e_norm
        if self.epsilon != expected:
            raise ValueError("epsilon does not satisfy the budget identity")
        if min(self.e_norm, self.zq_norm, self.v_spectral, self.epsilon) < 0.0:
            raise ValueError("budget norms must be nonnegative")

    @classmethod
    def compute(cls, e_norm: float, zq_norm: float, v_spectral: float) -> "ErrorBudget":
        return cls(e_norm, zq_norm, v_spectral,
                   (2.0 * zq_norm + e_norm) * v_spectral * e_norm)


def spectral_norm(variant: str, m: int) -> float:
    """||V||_2 of the variant's cost matrix (largest |eigenvalue|)."""
    w, _ = sym_eig(CostVariant.cost_matrix(variant, m))
    return float(np.max(np.abs(w)))


def quantization_stats(samples: SampleSet, grid: GridQuantizer) -> tuple[float, float]:
    """(e_norm, zq_norm): RMS quantization error and RMS representative norm."""
    idx = grid.assign(samples)
    centers = grid.centers(idx)
    err = samples.points - centers
    e_norm = float(np.sqrt(np.mean(np.sum(err * err, axis=1))))
    zq_norm = float(np.sqrt(np.mean(np.sum(centers * centers, axis=1))))
    return e_norm, zq_norm


def quantize(
    samples: SampleSet, grid: GridQuantizer, variant: str
) -> tuple[JointPmf, ErrorBudget]:
    """Bin samples to cell centers and compute the certification budget."""
    if grid.dim % 2 != 0:
        raise ValueError("state dimension must be even (stacked [x; y])")
    m = grid.dim // 2
    idx = grid.assign(samples)
    flat = np.ravel_multi_index(idx.T, tuple(int(b) for b in grid.bins))
    uniq, counts = np.unique(flat, return_counts=True)
    cell_idx = np.column_stack(np.unravel_index(uniq, tuple(int(b) for b in grid.bins)))
    states = grid.centers(cell_idx)
    probs = counts.astype(np.float64) / samples.count
    probs /= probs.sum()
    pmf = JointPmf(m, states, probs)
    e_norm, zq_norm = quantization_stats(samples, grid)
    budget = ErrorBudget.compute(e_norm, zq_norm, spectral_norm(variant, m))
    return pmf, budget


@dataclass(frozen=True)
class CertifiedInterval:
    """[discrete - epsilon, discrete] bracketing the continuous optimum."""

    lower: float
    upper: float
    epsilon: float
    proxy_value: float
    contains_proxy: bool


def certify(
    continuous_upper_proxy: float, discrete_value: float, budget: ErrorBudget
) -> CertifiedInterval:
    """Interval for the continuous optimum implied by the discrete solve.

    The discrete value never under-shoots the continuous optimum and
    over-shoots by at most epsilon; the proxy (typically the finest
    affordable grid's value) is recorded with a containment flag.
    """
    lo = discrete_value - budget.epsilon
    hi = discrete_value
    slack = 1e-12 * (1.0 + abs(discrete_value))
    inside = (lo - slack) <= continuous_upper_proxy <= (hi + slack)
    return CertifiedInterval(lo, hi, budget.epsilon, continuous_upper_proxy, inside)


# -- sample file I/O ---------------------------------------------------------

_HEADER = struct.Struct("<QQ")


def write_samples(path: str | Path, points: np.ndarray) -> None:
    """Binary sample file: u64 count, u64 dim, then float64 row-major (LE)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(pts.shape[0], pts.shape[1]))
        fh.write(np.ascontiguousarray(pts, dtype="<f8").tobytes())


def read_samples(path: str | Path) -> SampleSet:
    """Read a binary (header + float64) or CSV (one point per line) sample file."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        pts = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
        return SampleSet(pts)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: not a sample file (too short)")
    count, dim = _HEADER.unpack_from(raw)
    expected = _HEADER.size + 8 * count * dim
    if count < 1 or dim < 1 or len(raw) != expected:
        raise ValueError(
            f"{path}: header says count={count} dim={dim}, "
            f"expected {expected} bytes, found {len(raw)}"
        )
    pts = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(count, dim)
    return SampleSet(pts.astype(np.float64))
