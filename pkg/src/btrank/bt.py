"""Bradley-Terry win probabilities, log-likelihood, and maximum likelihood merits."""

from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.special import expit

from .wins import WinMatrix


def win_probability(merit_i: float, merit_j: float) -> float:
    """Probability that the entity with merit ``merit_i`` beats ``merit_j``.

    Depends only on the merit difference, so a common shift of both merits
    leaves the probability unchanged.
    """
    return float(expit(merit_i - merit_j))


def log_likelihood(merits: np.ndarray, w: WinMatrix) -> float:
    """Bradley-Terry log-likelihood of a merit vector given counted wins.

    Binomial coefficients are constant in the merits and omitted.  Evaluated
    through log1p-style sums, so large merit gaps stay finite.
    """
    merits = np.asarray(merits, dtype=float)
    if merits.shape != (w.m,):
        raise ValueError(f"merits must have shape {(w.m,)}, got {merits.shape}")
    diff = merits[None, :] - merits[:, None]
    # log pi[i, j] = -log(1 + exp(merit_j - merit_i)); diagonal weight is zero
    return float(-np.sum(w.wins * np.logaddexp(0.0, diff)))


def _check_mle_exists(w: WinMatrix) -> None:
    totals_won = w.wins.sum(axis=1)
    totals_lost = w.wins.sum(axis=0)
    for i, name in enumerate(w.entities):
        if totals_won[i] == 0:
            raise RuntimeError(
                f"entity {name!r} has no wins, so the maximum likelihood merits do not exist"
            )
        if totals_lost[i] == 0:
            raise RuntimeError(
                f"entity {name!r} has no losses, so the maximum likelihood merits do not exist"
            )
    n_parts, _ = connected_components(w.comparisons > 0, directed=False)
    if n_parts > 1:
        raise RuntimeError(
            f"comparison graph is disconnected ({n_parts} components); merits are not jointly identifiable"
        )


def mle_newman(w: WinMatrix, tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    """Maximum likelihood merit vector via the fixed-point strength iteration.

    Iterates, for each entity in turn,

        pi_i <- sum_j wins[i,j] pi_j / (pi_i + pi_j)  /  sum_j wins[j,i] / (pi_i + pi_j)

    updating strengths in place within a sweep (a simultaneous update cycles
    without converging on two-entity data), renormalizing the geometric mean
    to one after each sweep, until the largest relative change falls below
    ``tol``.  Returns log-strengths centered to sum to zero.

    Raises
    ------
    RuntimeError
        If the estimate does not exist (an entity with no wins or no losses,
        or a disconnected comparison graph) or ``max_iter`` is exhausted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_mle_exists(w)

    wins = w.wins
    pi = np.ones(w.m)
    for sweep in range(1, max_iter + 1):
        previous = pi.copy()
        for i in range(w.m):
            denom = pi[i] + pi
            numer = np.sum(wins[i] * pi / denom)
            pi[i] = numer / np.sum(wins[:, i] / denom)
        pi /= np.exp(np.mean(np.log(pi)))
        if np.max(np.abs(pi - previous) / previous) < tol:
            merits = np.log(pi)
            return merits - merits.mean()
    raise RuntimeError(f"strength iteration did not converge within {max_iter} sweeps")
