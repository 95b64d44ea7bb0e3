"""Time-series coordination measures.

Pearson correlation, lagged cross-correlation functions with per-lag
overlap normalization, turn-taking lag distributions based on above-mean
"on" states, and fixed-range histograms.  All functions are pure and
reentrant; series are 1-D float arrays (or anything ``np.asarray`` accepts).
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UndefinedCorrelationError",
    "pearson_r",
    "CcfResult",
    "cross_correlation",
    "CcfAggregate",
    "aggregate_ccf",
    "LagSpec",
    "LagDistribution",
    "turn_lags",
    "HistogramResult",
    "histogram",
    "ccf_csv_text",
    "lag_csv_text",
    "histogram_csv_text",
]


class UndefinedCorrelationError(ValueError):
    """Correlation undefined (a series has zero variance)."""


def pearson_rows(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise sample Pearson r for paired (m, n) arrays.

    Returns an (m,) array with nan marking undefined rows (zero variance or
    non-finite input).  Each row is centered and rescaled by its max
    absolute deviation before the dot products, so series spanning hundreds
    of orders of magnitude (diverging trajectories) stay in range.  Row
    results do not depend on which other rows are present, which keeps
    batched and one-at-a-time evaluation bitwise identical.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm = x - x.mean(axis=1, keepdims=True)
    ym = y - y.mean(axis=1, keepdims=True)
    xs = np.abs(xm).max(axis=1)
    ys = np.abs(ym).max(axis=1)
    with np.errstate(invalid="ignore"):
        ok = (xs > 0) & (ys > 0)
    r = np.full(x.shape[0], np.nan)
    if ok.any():
        xn = xm[ok] / xs[ok, None]
        yn = ym[ok] / ys[ok, None]
        num = (xn * yn).sum(axis=1)
        den = np.sqrt((xn * xn).sum(axis=1) * (yn * yn).sum(axis=1))
        r[ok] = np.clip(num / den, -1.0, 1.0)
    return r


def pearson_r(x, y) -> float:
    """Sample Pearson correlation coefficient of two equal-length series.

    Parameters
    ----------
    x, y : array-like
        Series of equal length >= 2.

    Returns
    -------
    float in [-1, 1].

    Raises
    ------
    UndefinedCorrelationError
        If either series has zero variance (or non-finite values), so the
        coefficient is undefined; callers that tabulate results should
        record an undefined marker instead.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
        raise ValueError("pearson_r needs two 1-D series of equal length")
    if len(x) < 2:
        raise ValueError("pearson_r needs length >= 2")
    r = pearson_rows(x[None, :], y[None, :])[0]
    if np.isnan(r):
        raise UndefinedCorrelationError("correlation undefined: zero variance")
    return float(r)


@dataclass(frozen=True)
class CcfResult:
    """Cross-correlation function over lags -max_lag..+max_lag.

    Sign convention: at positive lag k the value is the correlation of
    x[0:n-k] with y[k:n], i.e. Person 2's series lags Person 1's (Person 1
    leads).  ``values[max_lag]`` (k = 0) equals the plain Pearson r of the
    aligned series.  Undefined lags are nan.
    """

    max_lag: int
    values: np.ndarray

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.max_lag, self.max_lag + 1)

    def value(self, k: int) -> float:
        if not -self.max_lag <= k <= self.max_lag:
            raise ValueError(f"lag {k} outside +-{self.max_lag}")
        return float(self.values[k + self.max_lag])


def cross_correlation(x, y, max_lag: int) -> CcfResult:
    """Lagged Pearson cross-correlation of two series.

    Each lag's value is a true Pearson coefficient of the overlapping
    segments, normalized by the means and variances of those segments
    alone.  A zero-variance overlap yields nan at that lag only.

    Parameters
    ----------
    x, y : array-like
        Equal-length series with ``len > 2 * max_lag + 2``.
    max_lag : int
        Largest lag magnitude, >= 1.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    max_lag = int(max_lag)
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    n = len(x)
    if len(y) != n:
        raise ValueError("series lengths differ")
    if n <= 2 * max_lag + 2:
        raise ValueError(f"need length > {2 * max_lag + 2}, got {n}")
    values = np.empty(2 * max_lag + 1)
    for k in range(-max_lag, max_lag + 1):
        if k >= 0:
            seg_x, seg_y = x[: n - k], y[k:]
        else:
            seg_x, seg_y = x[-k:], y[: n + k]
        values[k + max_lag] = pearson_rows(seg_x[None, :], seg_y[None, :])[0]
    return CcfResult(max_lag=max_lag, values=values)


@dataclass(frozen=True)
class CcfAggregate:
    """Per-lag mean/SD over a batch of CCFs, with defined-value counts."""

    max_lag: int
    mean: np.ndarray
    sd: np.ndarray
    n_defined: np.ndarray

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.max_lag, self.max_lag + 1)


def aggregate_ccf(results: list[CcfResult]) -> CcfAggregate:
    """Per-lag arithmetic mean and sample SD over defined CCF values.

    All results must share ``max_lag``; at least two are required.  Lags
    where fewer than one (mean) or two (SD) values are defined come out nan,
    and the count of undefined entries is reported per lag.
    """
    if len(results) < 2:
        raise ValueError("aggregate_ccf needs at least 2 results")
    max_lag = results[0].max_lag
    if any(res.max_lag != max_lag for res in results):
        raise ValueError("aggregate_ccf: mixed max_lag values")
    stack = np.vstack([res.values for res in results])
    defined = np.isfinite(stack)
    n_def = defined.sum(axis=0)
    mean = np.full(stack.shape[1], np.nan)
    sd = np.full(stack.shape[1], np.nan)
    for j in range(stack.shape[1]):
        col = stack[defined[:, j], j]
        if len(col) >= 1:
            mean[j] = col.mean()
        if len(col) >= 2:
            sd[j] = col.std(ddof=1)
    return CcfAggregate(max_lag=max_lag, mean=mean, sd=sd, n_defined=n_def)


@dataclass(frozen=True)
class LagSpec:
    """Turn-lag extraction settings; on-states are samples strictly above
    the series' own mean (fixed rule)."""

    max_lag: int = 20
    threshold_rule: str = field(default="series mean")

    def __post_init__(self):
        if int(self.max_lag) < 1:
            raise ValueError("max_lag must be >= 1")
        if self.threshold_rule != "series mean":
            raise ValueError("only the 'series mean' threshold rule is supported")


@dataclass(frozen=True)
class LagDistribution:
    """Counts of signed nearest-on-state lags in [-max_lag, +max_lag]."""

    max_lag: int
    counts: np.ndarray
    total_events: int

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.max_lag, self.max_lag + 1)

    @property
    def rel_freq(self) -> np.ndarray:
        if self.total_events == 0:
            return np.zeros_like(self.counts, dtype=float)
        return self.counts / self.total_events

    def mode_lag(self) -> int:
        return int(self.lags[np.argmax(self.counts)])


def turn_lags(x, y, spec: LagSpec = LagSpec()) -> LagDistribution:
    """Distribution of lags from x's on-states to the nearest y on-state.

    A sample is "on" when strictly above its own series' mean.  Every on
    sample of ``x`` at time t is an event; the lag recorded is t' - t for
    the on sample t' of ``y`` minimizing |t' - t|, with equidistant ties
    resolved toward positive lag.  Events whose nearest |lag| exceeds
    ``spec.max_lag`` are discarded.  If either series has no on-states the
    distribution is empty (total_events = 0).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("series lengths differ")
    max_lag = int(spec.max_lag)
    counts = np.zeros(2 * max_lag + 1, dtype=int)
    on_x = np.flatnonzero(x > x.mean())
    on_y = np.flatnonzero(y > y.mean())
    if len(on_x) == 0 or len(on_y) == 0:
        return LagDistribution(max_lag=max_lag, counts=counts, total_events=0)
    pos = np.searchsorted(on_y, on_x)
    right = on_y[np.minimum(pos, len(on_y) - 1)]
    left = on_y[np.maximum(pos - 1, 0)]
    d_right = np.where(pos < len(on_y), np.abs(right - on_x), np.iinfo(np.int64).max)
    d_left = np.where(pos > 0, np.abs(left - on_x), np.iinfo(np.int64).max)
    # ties go to the right candidate, which has t' >= t (positive lag)
    nearest = np.where(d_right <= d_left, right, left)
    lag = nearest - on_x
    keep = np.abs(lag) <= max_lag
    np.add.at(counts, lag[keep] + max_lag, 1)
    return LagDistribution(max_lag=max_lag, counts=counts, total_events=int(keep.sum()))


@dataclass(frozen=True)
class HistogramResult:
    """Fixed-range uniform-bin counts plus an out-of-range overflow count."""

    lo: float
    hi: float
    counts: np.ndarray
    overflow: int

    @property
    def bin_count(self) -> int:
        return len(self.counts)

    @property
    def edges(self) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * np.arange(self.bin_count + 1) / self.bin_count


def histogram(values, bin_count: int, lo: float, hi: float) -> HistogramResult:
    """Count values into uniform bins over [lo, hi].

    Bins are left-closed/right-open except the final bin, which also
    includes ``hi``.  Values outside the range (including nan) land in the
    overflow count, never in a bin.
    """
    bin_count = int(bin_count)
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    if not lo < hi:
        raise ValueError("need lo < hi")
    values = np.asarray(values, dtype=float).ravel()
    counts = np.zeros(bin_count, dtype=int)
    if len(values) == 0:
        return HistogramResult(lo=float(lo), hi=float(hi), counts=counts, overflow=0)
    with np.errstate(invalid="ignore"):
        inside = (values >= lo) & (values <= hi)
    overflow = int((~inside).sum())
    width = (hi - lo) / bin_count
    idx = np.floor((values[inside] - lo) / width).astype(int)
    idx = np.clip(idx, 0, bin_count - 1)
    np.add.at(counts, idx, 1)
    return HistogramResult(lo=float(lo), hi=float(hi), counts=counts, overflow=overflow)


def _fmt(value: float) -> str:
    return repr(float(value))


def ccf_csv_text(agg: CcfAggregate) -> str:
    """CCF aggregate as CSV: `lag,mean,sd,n_defined`."""
    lines = ["lag,mean,sd,n_defined"]
    for lag, mean, sd, n in zip(agg.lags, agg.mean, agg.sd, agg.n_defined):
        lines.append(f"{lag},{_fmt(mean)},{_fmt(sd)},{n}")
    return "\n".join(lines) + "\n"


def lag_csv_text(dist: LagDistribution) -> str:
    """Lag distribution as CSV: `lag,count,rel_freq`."""
    lines = ["lag,count,rel_freq"]
    rel = dist.rel_freq
    for lag, count, freq in zip(dist.lags, dist.counts, rel):
        lines.append(f"{lag},{count},{_fmt(freq)}")
    return "\n".join(lines) + "\n"


def histogram_csv_text(hist: HistogramResult) -> str:
    """Histogram as CSV: `bin_lo,bin_hi,count`."""
    lines = ["bin_lo,bin_hi,count"]
    edges = hist.edges
    for i, count in enumerate(hist.counts):
        lines.append(f"{_fmt(edges[i])},{_fmt(edges[i + 1])},{count}")
    return "\n".join(lines) + "\n"
