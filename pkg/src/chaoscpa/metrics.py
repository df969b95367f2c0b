"""Statistical image-cipher metrics.

These are the usual figures reported for chaos-based image ciphers. They
measure statistics only: a cipher that merely swaps two pixels under a weak
key, or one broken by five chosen plaintexts, can still score well.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from chaoscpa.errors import InvalidParameterError, UndefinedCorrelationError, ValidationError
from chaoscpa.image_core import as_image

REPORT_FIELDS = ("entropy", "hist_variance", "corr_h", "corr_v", "corr_d", "npcr", "uaci")

CAPTION = (
    "Statistical metrics are necessary but not sufficient: they do not detect "
    "chosen-plaintext weaknesses or weak keys."
)


def histogram(img) -> np.ndarray:
    return np.bincount(as_image(img).ravel(), minlength=256).astype(np.int64)


def bitplane_histogram(img, plane: int) -> tuple[int, int]:
    """Counts of 0 and 1 bits in bit ``plane`` (0 = least significant)."""
    if not 0 <= plane <= 7:
        raise InvalidParameterError(f"bit plane must be in 0..7, got {plane}")
    arr = as_image(img)
    ones = int(((arr >> plane) & 1).sum())
    return arr.size - ones, ones


def histogram_variance(bins, exact: bool = False) -> float | Fraction:
    """Population variance of the bin counts (divides by the number of bins).

    With ``exact=True`` the result is a :class:`~fractions.Fraction`.
    """
    values = [Fraction(int(b)) for b in bins]
    var = statistics.pvariance(values)
    return var if exact else float(var)


def shannon_entropy(img) -> float:
    h = histogram(img)
    p = h[h > 0] / h.sum()
    return float(-(p * np.log2(p)).sum()) + 0.0


_OFFSETS = {"horizontal": (0, 1), "vertical": (1, 0), "diagonal": (1, 1)}


def adjacent_pairs(img, direction: str) -> tuple[np.ndarray, np.ndarray]:
    if direction not in _OFFSETS:
        raise InvalidParameterError(f"direction must be one of {sorted(_OFFSETS)}")
    arr = as_image(img).astype(np.float64)
    di, dj = _OFFSETS[direction]
    m, n = arr.shape
    return arr[: m - di, : n - dj].ravel(), arr[di:, dj:].ravel()


def adjacent_correlation(img, direction: str = "horizontal") -> float:
    """Pearson correlation over every adjacent pixel pair in ``direction``."""
    x, y = adjacent_pairs(img, direction)
    if x.size < 2:
        raise UndefinedCorrelationError(f"fewer than 2 {direction} pixel pairs")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float((dx * dx).sum()), float((dy * dy).sum())
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError(f"zero variance among {direction} pixel pairs")
    rho = float((dx * dy).sum()) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, rho))


def _pair(c1, c2) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_image(c1), as_image(c2)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch {a.shape} vs {b.shape}")
    return a.astype(np.int64), b.astype(np.int64)


def npcr(c1, c2) -> float:
    a, b = _pair(c1, c2)
    return 100.0 * float(np.count_nonzero(a != b)) / a.size


def uaci(c1, c2) -> float:
    a, b = _pair(c1, c2)
    return 100.0 * float(np.abs(a - b).sum()) / (255.0 * a.size)


def keystream_utilization(m: int, d: int) -> Fraction:
    """Fraction of the bits of ``floor(10**m * x) mod d`` that end up used:
    ``ceil(log2 d) / (m * ceil(log2 10))``."""
    if m < 1 or d < 2:
        raise InvalidParameterError("need m >= 1 and d >= 2")
    # (k - 1).bit_length() == ceil(log2 k) for k >= 2, with no float rounding
    return Fraction((d - 1).bit_length(), m * (10 - 1).bit_length())


@dataclass
class MetricReport:
    values: dict[str, float | None]
    height: int
    width: int
    sources: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {name: self.values.get(name) for name in REPORT_FIELDS}
        out.update({"M": self.height, "N": self.width, "sources": list(self.sources), "caption": CAPTION})
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _maybe_corr(img, direction: str) -> float | None:
    try:
        return adjacent_correlation(img, direction)
    except UndefinedCorrelationError:
        return None


def report(img, pair=None, sources: list[str] | None = None) -> MetricReport:
    """Single-image metrics, plus NPCR/UACI when ``pair`` is given.

    Correlations that are undefined (constant images) are reported as ``None``.
    """
    arr = as_image(img)
    values: dict[str, float | None] = {
        "entropy": shannon_entropy(arr),
        "hist_variance": histogram_variance(histogram(arr)),
        "corr_h": _maybe_corr(arr, "horizontal"),
        "corr_v": _maybe_corr(arr, "vertical"),
        "corr_d": _maybe_corr(arr, "diagonal"),
        "npcr": None,
        "uaci": None,
    }
    if pair is not None:
        values["npcr"] = npcr(arr, pair)
        values["uaci"] = uaci(arr, pair)
    return MetricReport(values, arr.shape[0], arr.shape[1], list(sources or []))
