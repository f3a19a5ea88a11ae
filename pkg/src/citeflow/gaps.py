"""Knowledge-gap detection via a gamma regression on interaction strength.

Observed symmetrised interaction probabilities are modelled from two
features of each community pair: content similarity of their papers and
second-order proximity of their citation neighbourhoods. The model is a
gamma GLM with a log link fitted by iteratively reweighted least squares;
for this family/link the working weights are constant, and a step-halving
guard keeps the deviance non-increasing at every iteration. Pairs with no
observed interaction cannot enter the gamma likelihood, so they are
excluded from fitting but still receive predictions; pairs whose
prediction exceeds observation the most are the knowledge gaps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .content import EmbeddingStore, content_similarity
from .detect import CommunityId, Cover
from .errors import (
    ArgumentError,
    CollinearityError,
    InsufficientDataError,
    UndefinedMetricError,
)
from .interact import InteractionNetwork, second_order_proximity

log = logging.getLogger(__name__)

MAX_ITERATIONS = 100
DEVIANCE_RTOL = 1e-8

Pair = tuple[CommunityId, CommunityId]


@dataclass
class GapModel:
    """Fitted gamma GLM with a log link."""

    coefficients: np.ndarray  # intercept, content, proximity
    std_errors: np.ndarray
    dispersion: float
    iterations: int
    converged: bool
    deviance: float
    deviance_path: tuple[float, ...] = field(default=(), repr=False)

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Predicted mean interaction for rows of (content, proximity)."""
        x = np.asarray(features, dtype=np.float64)
        design = np.column_stack([np.ones(len(x)), x])
        return np.exp(design @ self.coefficients)

    def confidence_intervals(self, z: float = 1.959963984540054) -> np.ndarray:
        """Per-coefficient normal-approximation intervals (default 95%)."""
        half = z * self.std_errors
        return np.column_stack([self.coefficients - half, self.coefficients + half])


@dataclass(frozen=True)
class GapRecord:
    """Observed vs predicted interaction for one community pair."""

    pair: Pair
    observed: float
    predicted: float

    @property
    def residual(self) -> float:
        """Positive when the model expected more transfer than observed."""
        return self.predicted - self.observed


@dataclass
class DesignMatrix:
    """Feature rows for the gap model, one per unordered community pair."""

    features: np.ndarray  # (n, 2): content similarity, proximity
    responses: np.ndarray  # (n,): symmetrised observed interaction
    pairs: list[Pair]
    dropped: int = 0


def build_design(
    net: InteractionNetwork,
    store: EmbeddingStore,
    cover: Cover,
    directed: bool = False,
) -> DesignMatrix:
    """One row per unordered pair of the cover's communities.

    The response is the symmetrised interaction (both directions summed);
    ``directed`` switches to one row per ordered pair with the one-way
    weight. Pairs whose proximity is undefined (a community with no
    third-party interactions) are dropped with a warning.
    """
    members = {c.id: c.members for c in cover.communities}
    ids = sorted(members)
    rows: list[tuple[float, float]] = []
    responses: list[float] = []
    pairs: list[Pair] = []
    dropped = 0
    if directed:
        ordered = [(i, j) for i in ids for j in ids if i != j]
    else:
        ordered = [
            (ids[a], ids[b])
            for a in range(len(ids))
            for b in range(a + 1, len(ids))
        ]
    feature_cache: dict[Pair, tuple[float, float]] = {}  # features are symmetric
    for i, j in ordered:
        key = (i, j) if i <= j else (j, i)
        try:
            if key in feature_cache:
                similarity, proximity = feature_cache[key]
            else:
                proximity = second_order_proximity(net, i, j)
                similarity = content_similarity(members[i], members[j], store)
                feature_cache[key] = (similarity, proximity)
        except UndefinedMetricError as exc:
            dropped += 1
            log.warning("pair (%s, %s) dropped: %s", i, j, exc)
            continue
        rows.append((similarity, proximity))
        if directed:
            responses.append(net.weight(i, j))
        else:
            responses.append(net.weight(i, j) + net.weight(j, i))
        pairs.append((i, j))
    return DesignMatrix(
        features=np.asarray(rows, dtype=np.float64).reshape(-1, 2),
        responses=np.asarray(responses, dtype=np.float64),
        pairs=pairs,
        dropped=dropped,
    )


def _gamma_deviance(y: np.ndarray, mu: np.ndarray) -> float:
    return float(2.0 * np.sum((y - mu) / mu - np.log(y / mu)))


def _check_collinearity(design: np.ndarray) -> None:
    names = ["intercept", "content_similarity", "proximity"]
    rank = np.linalg.matrix_rank(design)
    if rank == design.shape[1]:
        return
    for col in range(design.shape[1] - 1, 0, -1):
        reduced = np.delete(design, col, axis=1)
        if np.linalg.matrix_rank(reduced) == rank:
            raise CollinearityError(
                f"design matrix is singular; feature {names[col]!r} is collinear",
                feature=names[col],
            )
    raise CollinearityError("design matrix is singular", feature=names[0])


def fit_gamma_glm(rows: np.ndarray, responses: np.ndarray) -> GapModel:
    """Maximum-likelihood gamma GLM (log link) by IRLS.

    Only strictly positive responses participate; at least three are
    required. Converges when the relative deviance change drops below
    1e-8, capped at 100 iterations. The deviance path is recorded and is
    non-increasing by construction (step halving).
    """
    x = np.asarray(rows, dtype=np.float64)
    y = np.asarray(responses, dtype=np.float64)
    if x.ndim != 2:
        raise ArgumentError("feature rows must be a 2-d array")
    keep = y > 0
    if int(keep.sum()) < 3:
        raise InsufficientDataError(
            f"need at least 3 pairs with positive interaction, got {int(keep.sum())}"
        )
    if not np.isfinite(x).all():
        raise ArgumentError("features contain non-finite values")
    x, y = x[keep], y[keep]
    n, p = x.shape[0], x.shape[1] + 1
    design = np.column_stack([np.ones(n), x])
    _check_collinearity(design)

    beta = np.zeros(p)
    beta[0] = float(np.log(np.mean(y)))
    mu = np.exp(design @ beta)
    deviance = _gamma_deviance(y, mu)
    path = [deviance]
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        eta = np.log(mu)
        working = eta + (y - mu) / mu  # weights are identically 1 for gamma+log
        new_beta, *_ = np.linalg.lstsq(design, working, rcond=None)
        step = 1.0
        while True:
            candidate = beta + step * (new_beta - beta)
            cand_mu = np.exp(design @ candidate)
            cand_dev = _gamma_deviance(y, cand_mu)
            if cand_dev <= deviance or step < 1e-10:
                break
            step /= 2.0
        beta, mu = candidate, cand_mu
        path.append(cand_dev)
        if deviance - cand_dev <= DEVIANCE_RTOL * (abs(deviance) + DEVIANCE_RTOL):
            deviance = cand_dev
            converged = True
            break
        deviance = cand_dev

    pearson = (y - mu) / mu
    dof = max(n - p, 1)
    dispersion = float(np.sum(pearson**2) / dof)
    xtx_inv = np.linalg.pinv(design.T @ design)
    std_errors = np.sqrt(np.clip(np.diag(xtx_inv) * dispersion, 0.0, None))
    return GapModel(
        coefficients=beta,
        std_errors=std_errors,
        dispersion=dispersion,
        iterations=iterations,
        converged=converged,
        deviance=deviance,
        deviance_path=tuple(path),
    )


def residual_report(
    model: GapModel,
    rows: np.ndarray,
    responses: np.ndarray,
    pairs: Sequence[Pair],
) -> list[GapRecord]:
    """Predicted-minus-observed for every pair, largest residual first.

    Zero-response pairs are included here even though they were excluded
    from fitting.
    """
    predictions = model.predict(rows)
    records = [
        GapRecord(pair=pair, observed=float(obs), predicted=float(pred))
        for pair, obs, pred in zip(pairs, responses, predictions)
    ]
    records.sort(key=lambda r: (-r.residual, r.pair))
    return records


@dataclass(frozen=True)
class GapArea:
    """One research area with its strongest unrealised-transfer partners."""

    community: CommunityId
    total_positive_residual: float
    partners: tuple[GapRecord, ...]


def rank_gap_communities(
    records: Sequence[GapRecord], k_areas: int = 4, k_partners: int = 5
) -> list[GapArea]:
    """Communities with the greatest summed positive residuals.

    For each of the top ``k_areas`` communities, report its ``k_partners``
    partners with the largest residuals.
    """
    totals: dict[CommunityId, float] = {}
    involving: dict[CommunityId, list[GapRecord]] = {}
    for rec in records:
        for node in rec.pair:
            involving.setdefault(node, []).append(rec)
            totals[node] = totals.get(node, 0.0) + max(rec.residual, 0.0)
    ranked = sorted(totals, key=lambda c: (-totals[c], c))[:k_areas]
    areas = []
    for community in ranked:
        partners = sorted(involving[community], key=lambda r: (-r.residual, r.pair))
        areas.append(
            GapArea(
                community=community,
                total_positive_residual=totals[community],
                partners=tuple(partners[:k_partners]),
            )
        )
    return areas
