"""Spectral-measure sampling estimator for the walk-count difference.

Writes Delta(m) as a difference of two adjacency-matrix moments,
Delta(m) = (<psi+|A^m|psi+> - <psi-|A^m|psi->) / sqrt(2), with
|psi+-> = (|s> +- (|t> - |t'>)/sqrt(2)) / sqrt(2). Each moment is an
expectation of lambda^m under the spectral measure of the state, which can
be estimated from noisy eigenvalue samples after clipping the power map.

All moment values are reported in units of c^m. At gap-condition walk lengths
c^m overflows any float, while the normalized quantities (lambda/c)^m stay
inside [-1, 1] by the growth promise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clock import CompiledInstance
from .verifier import ReachableGraph

MAX_DENSE_VERTICES = 4000


class EstimateError(Exception):
    pass


def build_states(instance: CompiledInstance):
    """The two unit states whose moment difference encodes Delta(m)."""
    h = 1.0 / math.sqrt(2.0)
    plus = {instance.s: h, instance.t: 0.5, instance.t_prime: -0.5}
    minus = {instance.s: h, instance.t: -0.5, instance.t_prime: 0.5}
    return plus, minus


@dataclass(frozen=True)
class SpectralMeasure:
    """Point masses p_i at adjacency eigenvalues lam_i for one state."""

    eigenvalues: np.ndarray
    probabilities: np.ndarray

    def clipped_moment(self, m: int, c: float) -> float:
        """E[f(lambda)] with f the clipped power map, in units of c^m."""
        f = np.array([clipped_power(x, m, c) for x in self.eigenvalues])
        return float(self.probabilities @ f)


def reachable_component(
    instance: CompiledInstance, max_vertices: int = MAX_DENSE_VERTICES
) -> ReachableGraph:
    seeds = [instance.s, instance.t, instance.t_prime]
    graph = ReachableGraph(instance.system, seeds, max_vertices=max_vertices)
    if len(graph) > max_vertices:
        raise EstimateError(f"component has {len(graph)} vertices, guard is {max_vertices}")
    return graph


def spectral_measure(graph: ReachableGraph, state: dict) -> SpectralMeasure:
    """Diagonalize the 0/1 adjacency restricted to the component."""
    n = len(graph)
    if n > MAX_DENSE_VERTICES:
        raise EstimateError(f"component has {n} vertices, guard is {MAX_DENSE_VERTICES}")
    a = np.zeros((n, n))
    for i, row in enumerate(graph.adj):
        for j in row:
            a[i, j] = 1.0
    if not np.array_equal(a, a.T):
        raise EstimateError("adjacency restricted to component is not symmetric")
    vals, vecs = np.linalg.eigh(a)
    amp = np.zeros(n)
    for s, coef in state.items():
        idx = graph.index.get(s)
        if idx is None:
            raise EstimateError("state supported outside the reachable component")
        amp[idx] = coef
    probs = (vecs.T @ amp) ** 2
    return SpectralMeasure(vals, probs)


def delta_moment(plus: SpectralMeasure, minus: SpectralMeasure, m: int, c: float) -> float:
    """Delta(m) / c^m from the two spectral measures.

    Raw powers lambda^m overflow and cancel catastrophically because each
    individual moment grows with the component's spectral radius, which can
    exceed c. The signed difference measure carries no mass outside [-c, c]
    (the growth promise bounds all of its moments by c^n), so applying the
    clipped power map to the difference is exact and numerically stable.
    """
    if plus.eigenvalues is not minus.eigenvalues and not np.allclose(
        plus.eigenvalues, minus.eigenvalues
    ):
        raise EstimateError("measures come from different components")
    diff = plus.probabilities - minus.probabilities
    f = np.array([clipped_power(x, m, c) for x in plus.eigenvalues])
    return float(diff @ f) / math.sqrt(2.0)


def clipped_power(x: float, m: int, c: float) -> float:
    """The clipped power map in units of c^m: (x/c)^m saturated to [-1, 1].

    Values above c map to 1, below -c to -1 (to (-1)^m for even m, which the
    power map gives automatically since (x/c)^m is then >= 1).
    """
    r = x / c
    if r > 1.0:
        return 1.0
    if r < -1.0:
        return -1.0 if m % 2 else 1.0
    return r**m


def hoeffding_samples(eps: float, delta: float = 0.05) -> int:
    """Samples per state so the half-width is eps/2 (in units of c^m)."""
    if not (0 < eps and 0 < delta < 1):
        raise EstimateError("need eps > 0 and 0 < delta < 1")
    return math.ceil((8.0 / eps**2) * math.log(2.0 / delta))


def hoeffding_halfwidth(samples: int, delta: float = 0.05) -> float:
    """Half-width of one clipped-moment mean at confidence 1 - delta."""
    return math.sqrt(2.0 * math.log(2.0 / delta) / samples)


def plan_noise(eps: float, m: int, c: float) -> tuple[float, float]:
    """Noise magnitude eta and adversarial rate theta with bias <= eps c^m / 2.

    The bias of the clipped estimator is at most eta m c^(m-1) + 2 c^m theta;
    splitting the budget evenly gives eta = eps c / (4 m), theta = eps / 8.
    """
    return eps * c / (4.0 * m), eps / 8.0


def bias_bound(eta: float, theta: float, m: int, c: float) -> float:
    """Worst-case estimator bias in units of c^m: eta m / c + 2 theta."""
    return eta * m / c + 2.0 * theta


@dataclass(frozen=True)
class NoisyEstimate:
    value: float  # Delta(m) / c^m estimate
    bias_bound: float
    halfwidth: float
    samples: int

    @property
    def error_bound(self) -> float:
        return self.bias_bound + self.halfwidth


def _sample_clipped(
    measure: SpectralMeasure,
    m: int,
    c: float,
    eta: float,
    theta: float,
    samples: int,
    rng: np.random.Generator,
) -> float:
    lam_max = float(np.max(np.abs(measure.eigenvalues)))
    idx = rng.choice(len(measure.eigenvalues), size=samples, p=measure.probabilities)
    lam = measure.eigenvalues[idx]
    noisy = lam + rng.uniform(-eta, eta, size=samples)
    adversarial = rng.random(samples) < theta
    # the adversary reports whichever extreme eigenvalue moves the clipped
    # power map farthest from the true value
    if np.any(adversarial):
        true_f = np.array([clipped_power(x, m, c) for x in lam[adversarial]])
        f_hi = clipped_power(lam_max, m, c)
        f_lo = clipped_power(-lam_max, m, c)
        pick_hi = np.abs(f_hi - true_f) >= np.abs(f_lo - true_f)
        noisy[adversarial] = np.where(pick_hi, lam_max, -lam_max)
    return float(np.mean([clipped_power(x, m, c) for x in noisy]))


def noisy_estimate(
    plus: SpectralMeasure,
    minus: SpectralMeasure,
    m: int,
    c: float,
    eta: float,
    theta: float,
    samples: int,
    seed: int = 0,
    delta: float = 0.05,
) -> NoisyEstimate:
    """Monte Carlo estimate of Delta(m) / c^m from noise-corrupted samples.

    Each eigenvalue sample is shifted by a uniform perturbation in
    [-eta, eta], except with probability theta it is replaced adversarially.
    The returned half-width combines the two per-state Hoeffding widths
    through the 1/sqrt(2) prefactor of the difference.
    """
    rng = np.random.default_rng(seed)
    mean_plus = _sample_clipped(plus, m, c, eta, theta, samples, rng)
    mean_minus = _sample_clipped(minus, m, c, eta, theta, samples, rng)
    value = (mean_plus - mean_minus) / math.sqrt(2.0)
    hw = math.sqrt(2.0) * hoeffding_halfwidth(samples, delta)
    bias = math.sqrt(2.0) * bias_bound(eta, theta, m, c)
    return NoisyEstimate(value=value, bias_bound=bias, halfwidth=hw, samples=samples)


def estimate_instance(
    instance: CompiledInstance,
    m: int | None = None,
    eps: float = 1.0,
    delta: float = 0.05,
    seed: int = 0,
    max_vertices: int = MAX_DENSE_VERTICES,
) -> tuple[NoisyEstimate, float]:
    """Full pipeline on one instance; returns the estimate and exact moment."""
    if m is None:
        m = instance.m
    graph = reachable_component(instance, max_vertices=max_vertices)
    state_plus, state_minus = build_states(instance)
    plus = spectral_measure(graph, state_plus)
    minus = spectral_measure(graph, state_minus)
    exact = delta_moment(plus, minus, m, instance.c)
    eta, theta = plan_noise(eps, m, instance.c)
    n = hoeffding_samples(eps, delta)
    est = noisy_estimate(plus, minus, m, instance.c, eta, theta, n, seed=seed, delta=delta)
    return est, exact
