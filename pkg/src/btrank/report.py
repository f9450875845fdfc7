"""Posterior ranking summaries and exports."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .diagnostics import kendall_tau_distance
from .mcmc import ChainSamples

MIN_DRAWS = 100


@dataclass(frozen=True)
class RankingReport:
    """Per-entity posterior summaries, ranks, and pairwise outranking shares.

    Rank 1 is the best entity.  ``outrank[i, j]`` is the share of draws in
    which entity ``i``'s merit exceeds entity ``j``'s, with exact ties split.
    ``mle_rank`` is None when no baseline merits were supplied.
    """

    entities: tuple[str, ...]
    mean: np.ndarray
    sd: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    rank: np.ndarray
    outrank: np.ndarray
    mle_rank: np.ndarray | None
    level: float

    def __post_init__(self) -> None:
        m = len(self.entities)
        if (self.ci_low > self.ci_high).any():
            raise ValueError("interval bounds are crossed")
        if sorted(self.rank.tolist()) != list(range(1, m + 1)):
            raise ValueError("rank must be a permutation of 1..M")
        if self.outrank.shape != (m, m):
            raise ValueError("outrank must be square")
        if not np.allclose(self.outrank + self.outrank.T, 1.0):
            raise ValueError("outrank[i,j] + outrank[j,i] must equal 1")

    @property
    def m(self) -> int:
        return len(self.entities)

    def ranks_by_entity(self) -> dict[str, int]:
        return {name: int(r) for name, r in zip(self.entities, self.rank)}

    def mle_ranks_by_entity(self) -> dict[str, int] | None:
        if self.mle_rank is None:
            return None
        return {name: int(r) for name, r in zip(self.entities, self.mle_rank)}


def rank_entities(values: np.ndarray, entities) -> np.ndarray:
    """Ranks 1..M by descending value, breaking exact ties by entity name."""
    order = sorted(range(len(entities)), key=lambda i: (-values[i], entities[i]))
    ranks = np.empty(len(entities), dtype=int)
    for position, idx in enumerate(order, start=1):
        ranks[idx] = position
    return ranks


def _outranking(draws: np.ndarray) -> np.ndarray:
    n, m = draws.shape
    counts = np.zeros((m, m))
    step = max(1, 2_000_000 // (m * m))
    for start in range(0, n, step):
        chunk = draws[start : start + step]
        counts += (chunk[:, :, None] > chunk[:, None, :]).sum(axis=0)
        counts += 0.5 * (chunk[:, :, None] == chunk[:, None, :]).sum(axis=0)
    out = counts / n
    np.fill_diagonal(out, 0.5)
    return out


def summarize(samples: ChainSamples, entities, level: float = 0.95,
              mle_merits: np.ndarray | None = None) -> RankingReport:
    """Posterior means, spreads, equal-tailed intervals, and ranks.

    Ranks order entities by descending posterior mean, breaking exact ties
    lexicographically by entity name.  ``mle_merits``, when given, adds a
    baseline ranking computed the same way.

    Parameters
    ----------
    samples : ChainSamples
        At least 100 kept draws.
    entities : sequence of str
        Names matching the merit dimension.
    level : float
        Credible interval mass, strictly between 0 and 1.
    mle_merits : ndarray, optional
        Baseline merit vector, for example from the maximum likelihood fit.
    """
    entities = tuple(entities)
    if len(entities) != samples.m:
        raise ValueError(f"got {len(entities)} entity names for {samples.m} merit components")
    if samples.n_kept < MIN_DRAWS:
        raise ValueError(f"need at least {MIN_DRAWS} kept draws, got {samples.n_kept}")
    if not 0 < level < 1:
        raise ValueError("level must lie strictly between 0 and 1")

    draws = samples.merit_draws
    mean = draws.mean(axis=0)
    sd = draws.std(axis=0, ddof=1)
    tail = (1.0 - level) / 2.0
    ci_low, ci_high = np.quantile(draws, [tail, 1.0 - tail], axis=0)

    mle_rank = None
    if mle_merits is not None:
        mle_merits = np.asarray(mle_merits, dtype=float)
        if mle_merits.shape != (samples.m,):
            raise ValueError("baseline merits have the wrong shape")
        mle_rank = rank_entities(mle_merits, entities)

    return RankingReport(
        entities=entities,
        mean=mean,
        sd=sd,
        ci_low=ci_low,
        ci_high=ci_high,
        rank=rank_entities(mean, entities),
        outrank=_outranking(draws),
        mle_rank=mle_rank,
        level=level,
    )


def compare_rankings(ranks_a: dict, ranks_b: dict):
    """Kendall tau distance between two rankings plus the swapped pairs.

    Both mappings must rank exactly the same entities.  Returns
    ``(distance, swaps)`` where swaps lists the entity pairs the two rankings
    order differently, alphabetically.
    """
    if set(ranks_a) != set(ranks_b):
        raise ValueError("rankings cover different entity sets")
    names = sorted(ranks_a)
    a = np.array([ranks_a[name] for name in names])
    b = np.array([ranks_b[name] for name in names])
    distance = kendall_tau_distance(a, b)
    swaps = [
        (names[i], names[j])
        for i in range(len(names))
        for j in range(i + 1, len(names))
        if (a[i] - a[j]) * (b[i] - b[j]) < 0
    ]
    return distance, swaps


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def export_report(report: RankingReport, format: str, path) -> None:
    """Write the ranking table as ``csv`` or the full report as ``json``.

    Floats are written with 17 significant digits so re-parsing reproduces
    them exactly.
    """
    if format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["entity", "mean", "sd", "ci_low", "ci_high", "rank", "mle_rank"])
            for i, name in enumerate(report.entities):
                writer.writerow([
                    name,
                    _fmt(report.mean[i]),
                    _fmt(report.sd[i]),
                    _fmt(report.ci_low[i]),
                    _fmt(report.ci_high[i]),
                    int(report.rank[i]),
                    int(report.mle_rank[i]) if report.mle_rank is not None else "",
                ])
    elif format == "json":
        payload = {
            "level": report.level,
            "entities": list(report.entities),
            "mean": [float(v) for v in report.mean],
            "sd": [float(v) for v in report.sd],
            "ci_low": [float(v) for v in report.ci_low],
            "ci_high": [float(v) for v in report.ci_high],
            "rank": [int(v) for v in report.rank],
            "mle_rank": [int(v) for v in report.mle_rank] if report.mle_rank is not None else None,
            "outrank": [[float(v) for v in row] for row in report.outrank],
        }
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
    else:
        raise ValueError(f"unknown export format {format!r}; expected 'csv' or 'json'")
