"""Heavy-tailed noise distributions and the synthetic data generator.

The generator draws X_t = R F_t C' + E_t with scalar AR(1) dynamics in
both the factor and noise processes and a configurable marginal law for
the noise innovations (Gaussian, Student t, skewed t, alpha-stable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import GroundTruth, as_observations

BURN_IN = 100


# ---------------------------------------------------------------------------
# scalar samplers


def sample_alpha_stable(alpha: float, beta: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n alpha-stable variates, S(alpha, beta; 1) with unit scale.

    Chambers-Mallows-Stuck transform of a uniform angle and a unit
    exponential.  At alpha=2 this is Gaussian with variance 2; at
    alpha=1, beta=0 it is standard Cauchy.
    """
    if not (0.0 < alpha <= 2.0):
        raise ValueError("alpha must be in (0, 2]")
    if not (-1.0 <= beta <= 1.0):
        raise ValueError("beta must be in [-1, 1]")
    u = np.pi * (rng.random(n) - 0.5)
    w = rng.exponential(1.0, n)
    if alpha == 1.0:
        half_pi = np.pi / 2.0
        x = ((half_pi + beta * u) * np.tan(u)
             - beta * np.log(half_pi * w * np.cos(u) / (half_pi + beta * u)))
        return (2.0 / np.pi) * x
    b = beta * math.tan(np.pi * alpha / 2.0)
    theta0 = math.atan(b) / alpha
    scale = (1.0 + b * b) ** (1.0 / (2.0 * alpha))
    x = (scale * np.sin(alpha * (u + theta0)) / np.cos(u) ** (1.0 / alpha)
         * (np.cos(u - alpha * (u + theta0)) / w) ** ((1.0 - alpha) / alpha))
    return x


def skewed_t_moments(v: float, skew: float) -> tuple[float, float]:
    """Mean and variance of the unscaled two-piece skewed-t draw.

    Requires v > 2 so the variance exists.  With magnitude |t_v|, sign
    + with probability skew^2/(1+skew^2) and side scalings skew, 1/skew:
    E X = E|t_v| (skew^3 - skew^-1)/(1+skew^2) and
    E X^2 = (v/(v-2)) (skew^4 + skew^-2)/(1+skew^2).
    """
    if v <= 2:
        raise ValueError("moments require v > 2")
    abs_mean = (2.0 * math.sqrt(v) * math.gamma((v + 1) / 2.0)
                / (math.sqrt(math.pi) * (v - 1) * math.gamma(v / 2.0)))
    mean = abs_mean * (skew**3 - 1.0 / skew) / (1.0 + skew**2)
    second = (v / (v - 2.0)) * (skew**4 + skew**-2) / (1.0 + skew**2)
    return mean, second - mean**2


def sample_skewed_t(v: float, sigma: float, skew: float, n: int,
                    rng: np.random.Generator,
                    standardize: bool = True) -> np.ndarray:
    """Draw n skewed-t variates (two-piece scaling of |t_v|).

    The magnitude is |t_v|; the sign is positive with probability
    skew^2 / (1 + skew^2); the positive side is stretched by skew and
    the negative side shrunk by 1/skew.  With standardize=True (the
    default, requires v > 2) the two-piece draw is centered and scaled
    so the output has mean 0 and standard deviation sigma; with
    standardize=False sigma is a plain scale on the raw two-piece draw,
    whose sign mass P(X > 0) is skew^2/(1+skew^2).  skew=1 gives a
    symmetric t_v.
    """
    if v <= 0 or sigma <= 0 or skew <= 0:
        raise ValueError("v, sigma and skew must be positive")
    mag = np.abs(rng.standard_t(v, n))
    pos = rng.random(n) < skew**2 / (1.0 + skew**2)
    out = np.where(pos, mag * skew, -mag / skew)
    if standardize:
        mean, var = skewed_t_moments(v, skew)
        out = (out - mean) / math.sqrt(var)
    return sigma * out


@dataclass(frozen=True)
class Gaussian:
    tag = "gaussian"
    heavy = False

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(n)


@dataclass(frozen=True)
class StudentT:
    v: float

    def __post_init__(self):
        if self.v <= 0:
            raise ValueError("degrees of freedom must be positive")

    @property
    def tag(self) -> str:
        return f"t{self.v:g}"

    @property
    def heavy(self) -> bool:
        # t_1 noise has entries so large that the scaling rule flips
        return self.v <= 1.0

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_t(self.v, n)


@dataclass(frozen=True)
class SkewedT:
    v: float
    sigma: float
    skew: float
    heavy = False

    @property
    def tag(self) -> str:
        return f"skewed_t{self.v:g}"

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return sample_skewed_t(self.v, self.sigma, self.skew, n, rng)


@dataclass(frozen=True)
class AlphaStable:
    alpha: float
    beta: float = 0.0
    heavy = False

    @property
    def tag(self) -> str:
        return "stable"

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return sample_alpha_stable(self.alpha, self.beta, n, rng)


_TAGS = {
    "gaussian": Gaussian(),
    "t3": StudentT(3.0),
    "t1": StudentT(1.0),
    "skewed_t3": SkewedT(3.0, sigma=math.sqrt(3.0), skew=2.0),
    "stable": AlphaStable(1.8, 0.0),
}


def distribution_from_tag(tag: str):
    """Resolve a short distribution tag ("gaussian", "t3", "t1",
    "skewed_t3", "stable") to a distribution object."""
    try:
        return _TAGS[tag]
    except KeyError:
        raise ValueError(f"unknown distribution tag {tag!r}") from None


# ---------------------------------------------------------------------------
# data generating process


def build_noise_covs(p: int, q: int):
    """Row/column noise covariances with unit diagonal and 1/p (1/q)
    off-diagonal, plus their symmetric square roots."""
    if p < 1 or q < 1:
        raise ValueError("dimensions must be positive")

    def equicorr(n):
        return (1.0 - 1.0 / n) * np.eye(n) + np.full((n, n), 1.0 / n)

    def sym_sqrt(M):
        w, V = np.linalg.eigh(M)
        return (V * np.sqrt(np.maximum(w, 0.0))) @ V.T

    omega1, omega2 = equicorr(p), equicorr(q)
    return omega1, omega2, sym_sqrt(omega1), sym_sqrt(omega2)


@dataclass
class SimulationConfig:
    """Full specification of the synthetic data generating process."""

    p: int
    q: int
    p0: int = 3
    q0: int = 3
    T: int | None = None  # default floor(3 sqrt(pq))
    phi: float = 0.1
    psi: float = 0.1
    s_E: float = 1.0
    dist: object = field(default_factory=Gaussian)
    gamma: float | str = "auto"
    seed: int = 0
    noise_cov: str = "equicorrelated"  # or "identity" (spherical)

    def __post_init__(self):
        if isinstance(self.dist, str):
            self.dist = distribution_from_tag(self.dist)
        if not (0.0 <= self.phi < 1.0 and 0.0 <= self.psi < 1.0):
            raise ValueError("AR coefficients must lie in [0, 1)")
        if self.s_E < 0:
            raise ValueError("s_E must be nonnegative")
        if self.noise_cov not in ("equicorrelated", "identity"):
            raise ValueError(
                "noise_cov must be 'equicorrelated' or 'identity'")
        if self.T is None:
            self.T = int(3 * math.sqrt(self.p * self.q))
        if self.T < 1:
            raise ValueError("T must be at least 1")

    def gamma_value(self) -> float:
        """Noise rescaling constant matching signal and noise scales."""
        if self.gamma != "auto":
            return float(self.gamma)
        if getattr(self.dist, "heavy", False):
            return (self.p * self.q) ** -0.5
        return math.sqrt(min(self.p, self.q))


def gen_dataset(cfg: SimulationConfig, rng: np.random.Generator | None = None):
    """Generate (observations, ground truth) from the configured process.

    The factor process is F_t = phi F_{t-1} + sqrt(1 - phi^2) U_t with
    standard Gaussian innovations; the noise is an AR(1) with matrix
    innovations s_E * Omega1^{1/2} (gamma W_t) Omega2^{1/2} where W_t
    has i.i.d. entries from cfg.dist.  Both recursions are burned in
    for 100 steps before t = 1.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    p, q, p0, q0, T = cfg.p, cfg.q, cfg.p0, cfg.q0, cfg.T
    gamma = cfg.gamma_value()
    R = rng.standard_normal((p, p0))
    C = rng.standard_normal((q, q0))

    if cfg.noise_cov == "equicorrelated":
        _, _, sq1, sq2 = build_noise_covs(p, q)
    else:
        sq1, sq2 = np.eye(p), np.eye(q)

    phi, psi, s_E = cfg.phi, cfg.psi, cfg.s_E
    f_innov = math.sqrt(1.0 - phi * phi)
    e_innov = math.sqrt(1.0 - psi * psi)

    F = np.zeros((T, p0, q0))
    E = np.zeros((T, p, q))
    f_cur = np.zeros((p0, q0))
    e_cur = np.zeros((p, q))
    for step in range(BURN_IN + T):
        U = rng.standard_normal((p0, q0))
        f_cur = phi * f_cur + f_innov * U
        W = cfg.dist.sample(p * q, rng).reshape(p, q)
        if s_E > 0:
            e_cur = psi * e_cur + e_innov * s_E * (sq1 @ (gamma * W) @ sq2)
        t = step - BURN_IN
        if t >= 0:
            F[t] = f_cur
            E[t] = e_cur

    S = np.einsum("pi,tij,qj->tpq", R, F, C)
    X = S + E
    return as_observations(X), GroundTruth(R=R, C=C, F=F, S=S, E=E)
