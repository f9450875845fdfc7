"""Chain quality measures: autocovariances, effective sample size, rank stability."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .mcmc import ChainSamples
from .prior import ConstrainedCovariance
from .wins import WinMatrix

# multiplier shared by the effective-sample-size estimators
ESS_CAP_FACTOR = 1.5


def default_bandwidth(n: int) -> int:
    """Bartlett window width used when none is requested: floor(N^(1/3))."""
    b = max(1, int(n ** (1.0 / 3.0)))
    # float cube roots misround near perfect cubes
    while (b + 1) ** 3 <= n:
        b += 1
    while b > 1 and b**3 > n:
        b -= 1
    return b


def autocovariance(draws: np.ndarray, lag: int) -> np.ndarray:
    """Empirical lag-``lag`` autocovariance matrix of a draw sequence.

    Uses the fixed divisor N regardless of lag, which keeps the Bartlett-
    weighted long-run sum positive semidefinite.
    """
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 2:
        raise ValueError("draws must be a 2-D array of shape (N, M)")
    n = len(draws)
    if not 0 <= lag < n:
        raise ValueError(f"lag must lie in [0, {n}), got {lag}")
    centered = draws - draws.mean(axis=0)
    return centered[: n - lag].T @ centered[lag:] / n


def sample_covariance(draws: np.ndarray) -> np.ndarray:
    """Sample covariance of the draws with the usual N - 1 divisor."""
    draws = np.asarray(draws, dtype=float)
    n = len(draws)
    if n < 2:
        raise ValueError("need at least 2 draws")
    return autocovariance(draws, 0) * (n / (n - 1.0))


def spectral_longrun(draws: np.ndarray, bandwidth: int, return_flag: bool = False):
    """Bartlett-windowed long-run covariance estimate.

    Sums the sample covariance and triangularly downweighted symmetrized lag
    autocovariances up to ``bandwidth - 1``.  Materially negative eigenvalues
    are floored at zero; ``return_flag`` additionally reports whether that
    flooring occurred.
    """
    draws = np.asarray(draws, dtype=float)
    n = len(draws)
    if n < 2:
        raise ValueError("need at least 2 draws")
    bandwidth = int(bandwidth)
    if not 1 <= bandwidth <= n:
        raise ValueError(f"bandwidth must lie in [1, {n}], got {bandwidth}")

    centered = draws - draws.mean(axis=0)
    longrun = centered.T @ centered / (n - 1.0)
    for k in range(1, bandwidth):
        weight = 1.0 - k / bandwidth
        lag = centered[: n - k].T @ centered[k:] / n
        longrun = longrun + weight * (lag + lag.T)
    longrun = 0.5 * (longrun + longrun.T)

    eigvals, eigvecs = np.linalg.eigh(longrun)
    tol = 1e-12 * max(eigvals[-1], np.finfo(float).tiny)
    floored = bool(eigvals[0] < -tol)
    if floored:
        longrun = (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T
        longrun = 0.5 * (longrun + longrun.T)
    return (longrun, floored) if return_flag else longrun


def _ess_core(sigma: np.ndarray, longrun: np.ndarray, n: int, threshold: float) -> tuple[float, int]:
    eigvals, eigvecs = np.linalg.eigh(sigma)
    largest = eigvals[-1]
    if largest <= 0:
        raise ValueError("draws have zero variance in every direction")
    keep = eigvals > threshold * largest
    rank_est = int(keep.sum())
    basis = eigvecs[:, keep]

    sig_eigs = np.linalg.eigvalsh(basis.T @ sigma @ basis)
    lr_eigs = np.linalg.eigvalsh(basis.T @ longrun @ basis)
    if lr_eigs.min() <= 0:
        raise RuntimeError(
            "long-run covariance is singular on the retained subspace; "
            "increase the chain length or the bandwidth"
        )
    log_ratio = (np.log(sig_eigs).sum() - np.log(lr_eigs).sum()) / rank_est
    return float(n * np.exp(log_ratio)), rank_est


def _cap_ess(ess: float, n: int) -> tuple[float, bool]:
    cap = ESS_CAP_FACTOR * n
    if ess > cap:
        warnings.warn(
            f"effective sample size {ess:.0f} exceeds {ESS_CAP_FACTOR} times the "
            f"{n} draws; capping at {cap:.0f}",
            RuntimeWarning,
        )
        return cap, True
    return ess, False


def multivariate_ess(draws: np.ndarray, threshold: float = 1e-8,
                     bandwidth: int | None = None) -> tuple[float, int]:
    """Effective sample size of a vector chain on its non-degenerate subspace.

    Eigendirections of the sample covariance below ``threshold`` times the
    largest eigenvalue are treated as exact constraints and excluded.  On the
    retained subspace the estimate is
    ``N * (pdet(sample cov) / pdet(long-run cov)) ** (1 / rank)``.

    Parameters
    ----------
    draws : ndarray, shape (N, M)
    threshold : float
        Relative eigenvalue cutoff in (0, 1).
    bandwidth : int, optional
        Bartlett window width; defaults to ``floor(N ** (1/3))``.

    Returns
    -------
    (ess, rank_est) : tuple of float and int
        The estimate is capped at 1.5 N (with a warning) since values beyond
        that exceed what the estimator can resolve.
    """
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 2:
        raise ValueError("draws must be a 2-D array of shape (N, M)")
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie strictly between 0 and 1")
    n = len(draws)
    b = default_bandwidth(n) if bandwidth is None else int(bandwidth)
    sigma = sample_covariance(draws)
    longrun = spectral_longrun(draws, b)
    ess, rank_est = _ess_core(sigma, longrun, n, threshold)
    ess, _ = _cap_ess(ess, n)
    return ess, rank_est


def univariate_ess(x: np.ndarray) -> float:
    """Scalar effective sample size via the initial monotone sequence rule.

    Pairs of consecutive autocovariances are summed, truncated at the first
    nonpositive pair, and forced nonincreasing before entering the asymptotic
    variance.  A constant series counts as fully independent, and the result
    is capped at 1.5 N.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) < 4:
        raise ValueError("need a 1-D series of at least 4 draws")
    n = len(x)
    centered = x - x.mean()
    var0 = float(centered @ centered) / n
    if var0 == 0.0:
        return float(n)

    nfft = 1 << int(2 * n - 1).bit_length()
    spectrum = np.fft.rfft(centered, nfft)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), nfft)[:n].real / n

    pair_count = n // 2
    pairs = acov[0 : 2 * pair_count : 2] + acov[1 : 2 * pair_count : 2]
    nonpositive = np.nonzero(pairs <= 0)[0]
    cutoff = int(nonpositive[0]) if len(nonpositive) else pair_count
    if cutoff == 0:
        return ESS_CAP_FACTOR * n
    head = np.minimum.accumulate(pairs[:cutoff])
    asymptotic_var = -acov[0] + 2.0 * head.sum()
    if asymptotic_var <= 0:
        return ESS_CAP_FACTOR * n
    return float(min(n * acov[0] / asymptotic_var, ESS_CAP_FACTOR * n))


def acceptance_rate(samples: ChainSamples) -> float:
    """Share of post-burn-in proposals that were accepted."""
    if samples.proposed == 0:
        raise ValueError("chain recorded no proposals")
    return samples.accepted / samples.proposed


def _count_inversions(seq: np.ndarray) -> int:
    # bottom-up merge sort, counting crossings between the halves it merges
    work = np.array(seq, dtype=float)
    buffer = np.empty_like(work)
    n = len(work)
    inversions = 0
    width = 1
    while width < n:
        for start in range(0, n, 2 * width):
            mid = min(start + width, n)
            end = min(start + 2 * width, n)
            i, j, k = start, mid, start
            while i < mid and j < end:
                if work[i] <= work[j]:
                    buffer[k] = work[i]
                    i += 1
                else:
                    buffer[k] = work[j]
                    j += 1
                    inversions += mid - i
                k += 1
            if i < mid:
                buffer[k:end] = work[i:mid]
            else:
                buffer[k:end] = work[j:end]
            work[start:end] = buffer[start:end]
        width *= 2
    return inversions


def kendall_tau_distance(rank_a, rank_b) -> int:
    """Number of entity pairs ordered differently by two rankings.

    Both arguments must be permutations of the same values.  Zero means
    identical orderings; the maximum is M (M - 1) / 2 for full reversal.
    """
    a = np.asarray(rank_a)
    b = np.asarray(rank_b)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError("rankings must be 1-D arrays of equal length")
    if len(np.unique(a)) != len(a) or not np.array_equal(np.sort(a), np.sort(b)):
        raise ValueError("rankings must be permutations of the same values")
    order = np.argsort(a, kind="stable")
    return _count_inversions(b[order])


def rank_descending(values) -> np.ndarray:
    """Ranks 1..M by descending value, ties broken by original position."""
    values = np.asarray(values, dtype=float)
    order = np.lexsort((np.arange(len(values)), -values))
    ranks = np.empty(len(values), dtype=int)
    ranks[order] = np.arange(1, len(values) + 1)
    return ranks


def rank_stability_series(samples: ChainSamples, window: int) -> list[tuple[int, int]]:
    """Distance of running-mean rankings from the final ranking, every ``window`` draws.

    Returns (kept-draw count, Kendall tau distance) pairs; the last point is
    always the full chain and has distance zero by construction.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    n = samples.n_kept
    if n < 1:
        raise ValueError("chain has no kept draws")
    running = np.cumsum(samples.merit_draws, axis=0)
    final = rank_descending(running[-1] / n)
    points = list(range(window, n, window)) + [n]
    series = []
    for t in points:
        ranks_t = rank_descending(running[t - 1] / t)
        series.append((t, kendall_tau_distance(ranks_t, final)))
    return series


def _normalized_acf(x: np.ndarray, max_lag: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = len(x)
    centered = x - x.mean()
    var0 = float(centered @ centered) / n
    if var0 == 0.0:
        out = np.zeros(max_lag + 1)
        out[0] = 1.0
        return out
    nfft = 1 << int(2 * n - 1).bit_length()
    spectrum = np.fft.rfft(centered, nfft)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), nfft)[: max_lag + 1].real / n
    return acov / var0


def _resolve_params(samples: ChainSamples, params, cov, wins) -> list[str]:
    merit_names = [f"merit{i}" for i in range(samples.m)]
    if params == "all":
        names = list(merit_names) + ["variance"]
        if cov is not None:
            names.append("quad_form")
        if wins is not None:
            names.append("loglik")
        return names
    valid = set(merit_names) | {"variance", "quad_form", "loglik"}
    names = [params] if isinstance(params, str) else list(params)
    for name in names:
        if name not in valid:
            raise ValueError(f"unknown trace parameter {name!r}")
        if name == "quad_form" and cov is None:
            raise ValueError("quad_form requires the constrained covariance")
        if name == "loglik" and wins is None:
            raise ValueError("loglik requires the win matrix")
    return names


def _chunked_loglik(draws: np.ndarray, wins: WinMatrix) -> np.ndarray:
    out = np.empty(len(draws))
    for start in range(0, len(draws), 512):
        chunk = draws[start : start + 512]
        diff = chunk[:, None, :] - chunk[:, :, None]
        out[start : start + len(chunk)] = -np.sum(
            wins.wins * np.logaddexp(0.0, diff), axis=(1, 2)
        )
    return out


def trace_export(samples: ChainSamples, params="all", cov: ConstrainedCovariance | None = None,
                 wins: WinMatrix | None = None, bandwidth: int | None = None):
    """Long-format trace and autocorrelation tables for external plotting.

    ``params`` selects among the merit components (``merit0`` ...),
    ``variance``, ``quad_form`` (which needs ``cov``), and ``loglik`` (which
    needs ``wins``), or ``"all"`` for everything computable from the inputs
    given.  Returns ``(trace_rows, acf_rows)`` where trace rows are
    ``(draw_index, parameter, value)`` and acf rows are
    ``(lag, parameter, autocorrelation)`` up to the bandwidth.
    """
    names = _resolve_params(samples, params, cov, wins)
    n = samples.n_kept
    if n < 1:
        raise ValueError("chain has no kept draws")
    series: dict[str, np.ndarray] = {}
    for name in names:
        if name.startswith("merit"):
            series[name] = samples.merit_draws[:, int(name[5:])]
        elif name == "variance":
            series[name] = samples.variance_draws
        elif name == "quad_form":
            series[name] = np.einsum(
                "ni,ij,nj->n", samples.merit_draws, cov.pinv, samples.merit_draws
            )
        else:
            series[name] = _chunked_loglik(samples.merit_draws, wins)

    max_lag = min(default_bandwidth(n) if bandwidth is None else int(bandwidth), n - 1)
    trace_rows = []
    acf_rows = []
    for name in names:
        values = series[name]
        trace_rows.extend((t + 1, name, float(values[t])) for t in range(n))
        acf = _normalized_acf(values, max_lag)
        acf_rows.extend((lag, name, float(acf[lag])) for lag in range(max_lag + 1))
    return trace_rows, acf_rows


@dataclass(frozen=True)
class DiagnosticsReport:
    """Summary of chain quality produced by ``diagnose``."""

    ess: float
    rank_est: int
    acceptance_rate: float
    bandwidth: int
    per_param_ess: np.ndarray
    kendall_series: list
    flags: dict

    def __post_init__(self) -> None:
        if not 0.0 <= self.acceptance_rate <= 1.0:
            raise ValueError("acceptance_rate must lie in [0, 1]")
        if not self.ess > 0:
            raise ValueError("ess must be positive")
        if self.rank_est < 1:
            raise ValueError("rank_est must be at least 1")
        if self.bandwidth < 1:
            raise ValueError("bandwidth must be at least 1")

    def to_dict(self) -> dict:
        return {
            "ess": float(self.ess),
            "rank_est": int(self.rank_est),
            "acceptance_rate": float(self.acceptance_rate),
            "bandwidth": int(self.bandwidth),
            "per_param_ess": [float(v) for v in self.per_param_ess],
            "kendall_series": [[int(t), int(d)] for t, d in self.kendall_series],
            "flags": dict(self.flags),
        }


def diagnose(samples: ChainSamples, threshold: float = 1e-8, bandwidth: int | None = None,
             window: int | None = None, extra_flags: dict | None = None) -> DiagnosticsReport:
    """Compute the standard diagnostics bundle for one chain.

    ``window`` controls the rank-stability stride and defaults to a hundredth
    of the kept draws.  ``extra_flags`` are merged into the report flags so
    callers can carry provenance such as whether prior jitter was applied.
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie strictly between 0 and 1")
    draws = samples.merit_draws
    n = samples.n_kept
    b = default_bandwidth(n) if bandwidth is None else int(bandwidth)
    sigma = sample_covariance(draws)
    longrun, floored = spectral_longrun(draws, b, return_flag=True)
    ess, rank_est = _ess_core(sigma, longrun, n, threshold)
    ess, capped = _cap_ess(ess, n)

    per_param = np.array([univariate_ess(draws[:, j]) for j in range(samples.m)])
    series = rank_stability_series(samples, window if window else max(1, n // 100))
    flags = {"eigenvalue_floor_hit": floored, "ess_capped": capped}
    if extra_flags:
        flags.update(extra_flags)

    return DiagnosticsReport(
        ess=ess,
        rank_est=rank_est,
        acceptance_rate=acceptance_rate(samples),
        bandwidth=b,
        per_param_ess=per_param,
        kendall_series=series,
        flags=flags,
    )
