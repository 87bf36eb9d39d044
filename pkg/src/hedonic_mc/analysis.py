"""Distribution analysis of core sizes.

Data are weighted observations: distinct values with integer (or float)
weights, so a million games with a handful of distinct core sizes never get
expanded into a million floats. All statistics below treat an observation
of weight ``w`` exactly like ``w`` tied copies of it.

Core size 0 lies outside the support of the Weibull, Gamma and lognormal
families. A zero policy says what to do with it before fitting:

``drop_zeros``
    discard empty-core games (default);
``shift_by_one``
    fit ``core_size + 1``;
``include_raw``
    fit as-is, which is refused when any zero is present.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, special, stats

from .errors import (
    ComparisonError,
    ConvergenceError,
    InsufficientDataError,
    NoFitError,
)

ZERO_POLICIES = ("drop_zeros", "shift_by_one", "include_raw")
FAMILIES = ("weibull", "gamma", "lognormal")
N_PARAMS = 2
RESIDUAL_TOL = 1e-10


# -- weighted data ---------------------------------------------------------


def as_weighted(data, weights=None) -> Tuple[np.ndarray, np.ndarray]:
    """Return sorted distinct values and their summed weights.

    ``data`` is either a mapping ``{value: weight}`` or a sequence of values
    (with optional parallel ``weights``).
    """
    if isinstance(data, Mapping):
        if weights is not None:
            raise TypeError("weights must not be given with a mapping")
        values = np.array(list(data.keys()), dtype=float)
        weights = np.array(list(data.values()), dtype=float)
    else:
        values = np.asarray(data, dtype=float).ravel()
        weights = np.ones_like(values) if weights is None else np.asarray(weights, dtype=float).ravel()
    if values.shape != weights.shape:
        raise ValueError("values and weights differ in length")
    if np.any(weights < 0) or not np.all(np.isfinite(values)):
        raise ValueError("weights must be non-negative and values finite")
    keep = weights > 0
    uniq, inverse = np.unique(values[keep], return_inverse=True)
    return uniq, np.bincount(inverse, weights=weights[keep], minlength=len(uniq))


def apply_zero_policy(values, weights, policy: str) -> Tuple[np.ndarray, np.ndarray]:
    if policy not in ZERO_POLICIES:
        raise ValueError(f"zero policy must be one of {ZERO_POLICIES}, got {policy!r}")
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if policy == "drop_zeros":
        keep = values != 0
        values, weights = values[keep], weights[keep]
    elif policy == "shift_by_one":
        values = values + 1.0
    if np.any(values <= 0):
        raise NoFitError(f"non-positive observations remain under zero policy {policy!r}")
    return values, weights


def _digest(x: np.ndarray, w: np.ndarray) -> str:
    h = hashlib.sha1()
    h.update(np.ascontiguousarray(x, dtype=float).tobytes())
    h.update(np.ascontiguousarray(w, dtype=float).tobytes())
    return h.hexdigest()[:16]


# -- moments ---------------------------------------------------------------


@dataclass(frozen=True)
class MomentsSummary:
    count: float
    mean: float
    variance: float
    skewness: float
    kurtosis: float

    @property
    def degenerate(self) -> bool:
        return self.variance == 0

    @property
    def cullen_frey(self) -> Tuple[float, float]:
        """(squared skewness, kurtosis), the Cullen-Frey plot coordinates."""
        return self.skewness**2, self.kurtosis


def _is_integral(a: np.ndarray) -> bool:
    return bool(np.all(a == np.round(a))) and bool(np.all(np.abs(a) < 2**53))


def moments(data, weights=None) -> MomentsSummary:
    """Weighted sample moments; kurtosis is non-excess (normal = 3).

    Integer data are summed exactly with fractions before the final
    conversion to float. Constant data give ``variance == 0`` and NaN
    skewness/kurtosis (``summary.degenerate`` is then True).
    """
    x, w = as_weighted(data, weights)
    count = w.sum()
    if count < 4:
        raise InsufficientDataError(f"need at least 4 observations, got {count:g}")
    if _is_integral(x) and _is_integral(w):
        xs = [int(v) for v in x]
        ws = [int(v) for v in w]
        total = sum(ws)
        mean = Fraction(sum(a * b for a, b in zip(xs, ws)), total)
        cm = [sum(b * (a - mean) ** p for a, b in zip(xs, ws)) / total for p in (2, 3, 4)]
        m2, m3, m4 = cm
        variance = float(m2 * total / (total - 1))
        mean_f = float(mean)
    else:
        mean_f = float(np.dot(w, x) / count)
        d = x - mean_f
        m2, m3, m4 = (float(np.dot(w, d**p) / count) for p in (2, 3, 4))
        variance = m2 * count / (count - 1)
    if m2 == 0:
        return MomentsSummary(float(count), mean_f, 0.0, math.nan, math.nan)
    skew = float(m3) / float(m2) ** 1.5
    kurt = float(m4) / float(m2) ** 2
    return MomentsSummary(float(count), mean_f, variance, skew, kurt)


# -- families ----------------------------------------------------------------


def _weibull_logpdf(x, shape, scale):
    z = np.log(x) - math.log(scale)
    return math.log(shape) - math.log(scale) + (shape - 1.0) * z - np.exp(shape * z)


def _gamma_logpdf(x, shape, scale):
    return -special.gammaln(shape) - shape * math.log(scale) + (shape - 1.0) * np.log(x) - x / scale


def _lognormal_logpdf(x, shape, scale):
    lx = np.log(x)
    return -lx - math.log(shape) - 0.5 * math.log(2 * math.pi) - (lx - math.log(scale)) ** 2 / (2 * shape**2)


_LOGPDF = {"weibull": _weibull_logpdf, "gamma": _gamma_logpdf, "lognormal": _lognormal_logpdf}


def family_cdf(family: str, x, shape: float, scale: float):
    x = np.asarray(x, dtype=float)
    if family == "weibull":
        return -np.expm1(-((x / scale) ** shape))
    if family == "gamma":
        return special.gammainc(shape, x / scale)
    if family == "lognormal":
        return special.ndtr((np.log(x) - math.log(scale)) / shape)
    raise ValueError(f"unknown family {family!r}")


def _log_cdf_sf(family: str, x, shape: float, scale: float):
    """(log F(x), log(1 - F(x))) without cancellation in either tail."""
    if family == "weibull":
        z = (x / scale) ** shape
        return np.log(-np.expm1(-z)), -z
    if family == "gamma":
        return stats.gamma.logcdf(x, shape, scale=scale), stats.gamma.logsf(x, shape, scale=scale)
    if family == "lognormal":
        t = (np.log(x) - math.log(scale)) / shape
        return special.log_ndtr(t), special.log_ndtr(-t)
    raise ValueError(f"unknown family {family!r}")


def log_likelihood(family: str, x, w, shape: float, scale: float) -> float:
    """Weighted log-likelihood, summed with ``math.fsum``."""
    terms = np.asarray(w, dtype=float) * _LOGPDF[family](np.asarray(x, dtype=float), shape, scale)
    return math.fsum(terms.tolist())


@dataclass(frozen=True)
class FitResult:
    """One fitted two-parameter family.

    For the lognormal family ``shape`` is the log-scale standard deviation
    and ``scale`` is ``exp`` of the log-scale mean.
    """

    family: str
    shape: float
    scale: float
    log_likelihood: float
    n_obs: float
    ks: float
    cvm: float
    ad: float
    aic: float
    bic: float
    zero_policy: str
    data_digest: str = field(default="", compare=False)
    residual: float = field(default=0.0, compare=False)

    def cdf(self, x):
        return family_cdf(self.family, x, self.shape, self.scale)

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.family == "lognormal":
            out["meanlog"] = math.log(self.scale)
            out["sdlog"] = self.shape
        return out


def _prepare(data, weights, policy):
    x, w = as_weighted(data, weights)
    x, w = apply_zero_policy(x, w, policy)
    if w.sum() < 2:
        raise NoFitError("need at least 2 positive observations")
    if len(x) < 2:
        raise NoFitError("all observations are equal; no two-parameter fit exists")
    return x, w


def _expand_bracket(f, lo, hi, increasing, limit=200):
    """Widen [lo, hi] geometrically until ``f`` changes sign."""
    for _ in range(limit):
        flo, fhi = f(lo), f(hi)
        if (flo < 0) == increasing and (fhi > 0) == increasing and flo * fhi < 0:
            return lo, hi
        if (flo > 0) == increasing:
            lo /= 2
        if (fhi < 0) == increasing:
            hi *= 2
    raise ConvergenceError("could not bracket the shape equation", last_iterate=(lo, hi))


def _solve_shape(f, guess, increasing):
    lo, hi = _expand_bracket(f, guess / 2, guess * 2, increasing)
    try:
        root = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc), last_iterate=(lo, hi)) from None
    residual = abs(f(root))
    if not residual < RESIDUAL_TOL:
        raise ConvergenceError(f"shape equation residual {residual:.3e} above {RESIDUAL_TOL}", last_iterate=root)
    return root, residual


def _finish(family, x, w, shape, scale, policy, residual) -> FitResult:
    ll = log_likelihood(family, x, w, shape, scale)
    n_obs = float(w.sum())
    ks, cvm, ad = _gof(family, x, w, shape, scale)
    return FitResult(
        family=family,
        shape=float(shape),
        scale=float(scale),
        log_likelihood=ll,
        n_obs=n_obs,
        ks=ks,
        cvm=cvm,
        ad=ad,
        aic=2 * N_PARAMS - 2 * ll,
        bic=N_PARAMS * math.log(n_obs) - 2 * ll,
        zero_policy=policy,
        data_digest=_digest(x, w),
        residual=float(residual),
    )


def weibull_shape_equation(x, w):
    """Profile score for the Weibull shape; its root is the MLE."""
    y = x / x.max()
    ly = np.log(y)
    mean_ly = np.dot(w, ly) / w.sum()

    def g(k):
        yk = w * y**k
        return np.dot(yk, ly) / yk.sum() - 1.0 / k - mean_ly

    return g


def gamma_shape_equation(x, w):
    """``log(a) - digamma(a) - s`` with ``s = log(mean) - mean(log x)``."""
    total = w.sum()
    s = math.log(np.dot(w, x) / total) - np.dot(w, np.log(x)) / total
    return (lambda a: math.log(a) - special.digamma(a) - s), s


def fit_weibull(data, weights=None, zero_policy: str = "drop_zeros") -> FitResult:
    x, w = _prepare(data, weights, zero_policy)
    g = weibull_shape_equation(x, w)
    lx = np.log(x)
    sd = math.sqrt(np.dot(w, (lx - np.dot(w, lx) / w.sum()) ** 2) / w.sum())
    shape, residual = _solve_shape(g, 1.28 / sd, increasing=True)
    scale = (np.dot(w, x**shape) / w.sum()) ** (1.0 / shape)
    return _finish("weibull", x, w, shape, scale, zero_policy, residual)


def fit_gamma(data, weights=None, zero_policy: str = "drop_zeros") -> FitResult:
    x, w = _prepare(data, weights, zero_policy)
    f, s = gamma_shape_equation(x, w)
    if not s > 0:
        raise NoFitError("zero spread in the data; no Gamma fit exists")
    guess = (3 - s + math.sqrt((s - 3) ** 2 + 24 * s)) / (12 * s)
    shape, residual = _solve_shape(f, guess, increasing=False)
    scale = np.dot(w, x) / w.sum() / shape
    return _finish("gamma", x, w, shape, scale, zero_policy, residual)


def fit_lognormal(data, weights=None, zero_policy: str = "drop_zeros") -> FitResult:
    x, w = _prepare(data, weights, zero_policy)
    lx = np.log(x)
    mu = np.dot(w, lx) / w.sum()
    sigma = math.sqrt(np.dot(w, (lx - mu) ** 2) / w.sum())
    return _finish("lognormal", x, w, sigma, math.exp(mu), zero_policy, 0.0)


FITTERS = {"weibull": fit_weibull, "gamma": fit_gamma, "lognormal": fit_lognormal}


def fit(family: str, data, weights=None, zero_policy: str = "drop_zeros") -> FitResult:
    try:
        fitter = FITTERS[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}") from None
    return fitter(data, weights, zero_policy)


# -- goodness of fit -----------------------------------------------------------


def _gof(family, x, w, shape, scale):
    """KS, Cramer-von Mises W^2 and Anderson-Darling A^2 with tied weights.

    A distinct value ``v`` of weight ``c`` occupies order-statistic
    positions ``a+1..a+c``, where ``a`` is the weight below it; the
    per-position sums of the textbook formulas are summed in closed form
    over each such run.
    """
    n = float(w.sum())
    a = np.concatenate(([0.0], np.cumsum(w)[:-1]))
    b = a + w
    u = np.asarray(family_cdf(family, x, shape, scale), dtype=float)

    ks = float(max(np.max(b / n - u), np.max(u - a / n)))

    centre = (a + b) / (2 * n)
    cvm = 1.0 / (12 * n) + math.fsum((w * (u - centre) ** 2 + (w**3 - w) / (12 * n * n)).tolist())

    with np.errstate(divide="ignore"):
        log_u, log_1mu = _log_cdf_sf(family, x, shape, scale)
    lower = b * b - a * a
    upper = w * (2 * n + 1) - (b * (b + 1) - a * (a + 1))
    total = math.fsum((lower * log_u).tolist() + (upper * log_1mu).tolist())
    ad = -n - total / n
    return ks, float(cvm), float(ad)


def gof_statistics(data, fit_result: FitResult, weights=None) -> Tuple[float, float, float]:
    x, w = as_weighted(data, weights)
    x, w = apply_zero_policy(x, w, fit_result.zero_policy)
    return _gof(fit_result.family, x, w, fit_result.shape, fit_result.scale)


# -- model comparison ----------------------------------------------------------


@dataclass(frozen=True)
class ModelRanking:
    by_aic: List[str]
    by_bic: List[str]
    aic: Dict[str, float]
    bic: Dict[str, float]

    @property
    def preferred(self) -> str:
        return self.by_aic[0]


def model_compare(fits: Sequence[FitResult]) -> ModelRanking:
    """Rank fits by AIC (lowest first), with the BIC ranking alongside."""
    fits = list(fits)
    if not fits:
        raise ComparisonError("nothing to compare")
    ref = fits[0]
    for f in fits[1:]:
        if (f.data_digest, f.zero_policy, f.n_obs) != (ref.data_digest, ref.zero_policy, ref.n_obs):
            raise ComparisonError("fits were made on different data or zero policies")
    if len({f.family for f in fits}) != len(fits):
        raise ComparisonError("each family may appear only once")
    return ModelRanking(
        by_aic=[f.family for f in sorted(fits, key=lambda f: f.aic)],
        by_bic=[f.family for f in sorted(fits, key=lambda f: f.bic)],
        aic={f.family: f.aic for f in fits},
        bic={f.family: f.bic for f in fits},
    )


# -- export ------------------------------------------------------------------


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def export_distribution_tables(hist, fits: Optional[Mapping[int, Sequence[FitResult]]] = None) -> str:
    """Relative-frequency and empirical-CDF table for every size, as CSV.

    ``fits`` maps a size to fitted results; each adds a ``<family>_cdf``
    column holding the fitted CDF at the core size after that fit's zero
    policy (left blank where the policy drops the row).
    """
    fits = fits or {}
    families = sorted({f.family for rows in fits.values() for f in rows}, key=FAMILIES.index)
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["players", "core_size", "count", "frequency", "cdf", *(f"{fam}_cdf" for fam in families)])
    for n in hist.sizes():
        row = hist.row(n)
        total = sum(row.values())
        if not total:
            continue
        by_family = {f.family: f for f in fits.get(n, ())}
        running = 0
        for k, count in row.items():
            running += count
            cells = [n, k, count, _fmt(count / total), _fmt(running / total)]
            for fam in families:
                f = by_family.get(fam)
                if f is None or (k == 0 and f.zero_policy != "shift_by_one"):
                    cells.append("")
                else:
                    cells.append(_fmt(f.cdf(k + 1 if f.zero_policy == "shift_by_one" else k)))
            out.writerow(cells)
    return buf.getvalue()
