"""Four-step deviation chain for multi-step complexity judgments.

Each comparison step is an independent Bernoulli trial: the reasoner
deviates from the common-sense answer with probability alpha_i and conforms
with beta_i = 1 - alpha_i, where alpha_i < beta_i. The chain state is the
running count of deviations, so the count after four steps follows a
Poisson-binomial law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

STEPS = 4
ALPHA_MAX = 0.5


@dataclass(frozen=True)
class MarkovParams:
    alphas: tuple

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if len(alphas) != STEPS:
            raise ValueError(f"expected {STEPS} step probabilities, got {len(alphas)}")
        for i, a in enumerate(alphas, start=1):
            if not (0.0 <= a < ALPHA_MAX):
                raise ValueError(f"alpha_{i} = {a} must lie in [0, 0.5) so that alpha < beta")

    @classmethod
    def shared(cls, alpha: float) -> "MarkovParams":
        return cls((alpha,) * STEPS)

    @property
    def betas(self) -> tuple:
        return tuple(1.0 - a for a in self.alphas)


def validate_pmf(pmf: Sequence[float], tol: float = 1e-9) -> tuple:
    pmf = tuple(float(p) for p in pmf)
    if len(pmf) != STEPS + 1:
        raise ValueError(f"a deviation distribution has {STEPS + 1} bins, got {len(pmf)}")
    if any(p < 0 or not math.isfinite(p) for p in pmf):
        raise ValueError("distribution entries must be finite and non-negative")
    if abs(math.fsum(pmf) - 1.0) > tol:
        raise ValueError(f"distribution sums to {math.fsum(pmf)}, not 1")
    return pmf


def deviation_pmf(params: MarkovParams) -> tuple:
    """Exact distribution of the number of deviating steps, by convolving
    the per-step generating polynomials ``beta + alpha * z``."""
    coeffs = [1.0]
    for a, b in zip(params.alphas, params.betas):
        nxt = [0.0] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k] += c * b
            nxt[k + 1] += c * a
        coeffs = nxt
    return tuple(coeffs)


def simulate(params: MarkovParams, n: int, seed: int) -> tuple:
    """Empirical deviation shares over ``n`` simulated reasoners."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    deviations = rng.random((n, STEPS)) < np.asarray(params.alphas)
    counts = np.bincount(deviations.sum(axis=1), minlength=STEPS + 1)
    return tuple(float(c) / n for c in counts)


def _sq_distance(pmf: Sequence[float], observed: Sequence[float]) -> float:
    return math.fsum((p - o) ** 2 for p, o in zip(pmf, observed))


def _normalize(observed: Sequence[float]) -> tuple:
    obs = tuple(float(o) for o in observed)
    if len(obs) != STEPS + 1:
        raise ValueError(f"a deviation distribution has {STEPS + 1} bins, got {len(obs)}")
    if any(o < 0 or not math.isfinite(o) for o in obs):
        raise ValueError("observed shares must be finite and non-negative")
    total = math.fsum(obs)
    if total <= 0:
        raise ValueError("observed shares must not all be zero")
    return tuple(o / total for o in obs)


def fit_alpha(observed: Sequence[float], xatol: float = 1e-9) -> tuple[float, float]:
    """Shared alpha whose Binomial(4, alpha) is closest to ``observed``.

    Observed shares are rescaled to sum to 1 first (published percentages
    are rounded). Returns ``(alpha, squared residual)``.
    """
    obs = _normalize(observed)

    def loss(a: float) -> float:
        return _sq_distance(deviation_pmf(MarkovParams.shared(a)), obs)

    upper = math.nextafter(ALPHA_MAX, 0.0)
    res = minimize_scalar(loss, bounds=(0.0, upper), method="bounded",
                          options={"xatol": xatol})
    best = (float(res.x), float(res.fun))
    # the bounded search never evaluates the end points exactly
    at_zero = loss(0.0)
    if at_zero <= best[1]:
        best = (0.0, at_zero)
    return best


def fit_alphas_per_step(observed: Sequence[float], seed: int = 0) -> dict:
    """Least-squares fit of four separate alphas.

    A 5-bin histogram cannot identify four step probabilities: the pmf is
    symmetric in the alphas and many vectors fit equally well. The result
    carries ``under_determined: True`` to say so; the alphas returned are
    one minimizer, sorted ascending.
    """
    from scipy.optimize import minimize

    obs = _normalize(observed)
    upper = math.nextafter(ALPHA_MAX, 0.0)

    def loss(x) -> float:
        return _sq_distance(deviation_pmf(MarkovParams(tuple(np.clip(x, 0.0, upper)))), obs)

    shared, _ = fit_alpha(obs)
    rng = np.random.default_rng(seed)
    starts = [np.full(STEPS, shared)] + [rng.uniform(0, upper, STEPS) for _ in range(4)]
    best = None
    for x0 in starts:
        res = minimize(loss, x0, method="L-BFGS-B", bounds=[(0.0, upper)] * STEPS)
        if best is None or res.fun < best.fun:
            best = res
    alphas = sorted(float(a) for a in np.clip(best.x, 0.0, upper))
    return {"alphas": alphas, "residual": float(best.fun), "under_determined": True}


def markov_report(
    params: MarkovParams | None = None,
    fit_observed: Sequence[float] | None = None,
    simulate_n: int | None = None,
    seed: int | None = None,
) -> dict:
    out: dict = {}
    if params is not None:
        out["alphas"] = list(params.alphas)
        out["betas"] = list(params.betas)
        out["pmf"] = list(deviation_pmf(params))
        if simulate_n is not None:
            if seed is None:
                raise ValueError("simulation needs a seed")
            out["simulation"] = {"n": simulate_n, "seed": seed,
                                 "pmf": list(simulate(params, simulate_n, seed))}
    if fit_observed is not None:
        alpha, residual = fit_alpha(fit_observed)
        out["fit"] = {"alpha": alpha, "residual": residual,
                      "observed": list(_normalize(fit_observed)),
                      "pmf": list(deviation_pmf(MarkovParams.shared(alpha)))}
    return out
