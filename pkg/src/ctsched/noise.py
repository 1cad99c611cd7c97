"""Error models for both prediction settings, with keyed deterministic sampling.

Time setting: the prediction is ``tau = T * (1 + delta)`` with the relative
deviation ``delta`` truncated to ``[-H, H]`` (rejection sampling, so the
endpoints carry no atoms). Query setting: a fraction ``eta`` of the answer
bits is flipped, ``floor(eta * n)`` distinct positions chosen uniformly.

Randomness is organized as value-typed streams: a 64-bit seed plus a
substream key. Identical (seed, key) pairs reproduce identical sample
sequences, so parallel trials simply use disjoint keys.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .predict_query import AnswerBits
from .predict_time import SignedError, TimePrediction

__all__ = [
    "TimeNoiseModel",
    "RngStream",
    "float_key",
    "sample_deltas",
    "sample_tau",
    "error_of",
    "flip_bits",
    "flip_positions",
]

_NOISE_KINDS = ("truncated-normal", "uniform")


@dataclass(frozen=True)
class TimeNoiseModel:
    """Distribution of the prediction's relative deviation from the truth.

    ``sigma`` (truncated-normal only) is in relative units; it defaults to
    ``H / 2`` so roughly 95% of the mass falls inside the truncation window.
    """

    kind: str = "truncated-normal"
    H: float = 0.1
    sigma: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {_NOISE_KINDS}")
        if not 0.0 <= self.H <= 1.0:
            raise ValueError(f"H must lie in [0, 1] (got {self.H!r})")
        if self.sigma is not None and self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive (got {self.sigma!r})")

    @property
    def effective_sigma(self) -> float:
        return self.sigma if self.sigma is not None else self.H / 2.0


@dataclass(frozen=True)
class RngStream:
    """A seed plus a substream key; a value type safe to share and fork."""

    seed: int
    key: tuple[int, ...] = ()

    def at(self, *parts: int) -> "RngStream":
        """Derive the substream with the given key parts appended."""
        return RngStream(self.seed, self.key + tuple(int(p) for p in parts))

    def generator(self) -> np.random.Generator:
        """Fresh generator for this (seed, key); same inputs, same stream."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))


def float_key(x: float) -> int:
    """Stable integer key for a float (its IEEE-754 bit pattern)."""
    return int(np.float64(x).view(np.uint64))


def sample_deltas(
    model: TimeNoiseModel, gen: np.random.Generator, size: int
) -> np.ndarray:
    """Draw ``size`` relative deviations, each confined to ``[-H, H]``."""
    if model.H == 0.0:
        return np.zeros(size)
    if model.kind == "uniform":
        return gen.uniform(-model.H, model.H, size=size)
    sigma = model.effective_sigma
    out = gen.normal(0.0, sigma, size=size)
    bad = np.abs(out) > model.H
    while bad.any():
        out[bad] = gen.normal(0.0, sigma, size=int(bad.sum()))
        bad = np.abs(out) > model.H
    return out


def sample_tau(
    t: float, model: TimeNoiseModel, rng: "RngStream | np.random.Generator"
) -> TimePrediction:
    """One noisy prediction for the true interruption ``t``.

    Requires ``t >= 1 / (1 - H)`` so the prediction itself stays above
    the unit floor.
    """
    if model.H >= 1.0:
        raise ValueError("sampling needs H < 1")
    if t < 1.0 / (1.0 - model.H):
        raise ValueError(
            f"t={t!r} too small for H={model.H!r}: prediction could fall below 1"
        )
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    delta = float(sample_deltas(model, gen, 1)[0])
    return TimePrediction(tau=t * (1.0 + delta), H=model.H)


def error_of(tau: float, t: float) -> SignedError:
    """Signed relative error of prediction ``tau`` against the truth ``t``."""
    if tau < 1.0 or t < 1.0:
        raise ValueError("both times must be at least 1")
    if t == tau:
        return SignedError(0.0, "zero")
    if t > tau:
        return SignedError(t / tau - 1.0, "positive")
    return SignedError(1.0 - t / tau, "negative")


def flip_positions(n: int, k: int, us: np.ndarray) -> list[int]:
    """First ``k`` entries of a partial Fisher-Yates shuffle of ``range(n)``.

    Consumes exactly ``us[0:k]`` (uniforms in [0, 1)); the compiled and
    pure-Python experiment kernels run this same recurrence, so flip sets
    agree bit for bit across all paths.
    """
    if not 0 <= k <= n:
        raise ValueError(f"flip count must lie in [0, {n}] (got {k!r})")
    pos = list(range(n))
    for t in range(k):
        r = t + int(us[t] * (n - t))
        pos[t], pos[r] = pos[r], pos[t]
    return pos[:k]


def flip_bits(
    bits: AnswerBits, eta: float, rng: "RngStream | np.random.Generator"
) -> AnswerBits:
    """Flip exactly ``floor(eta * n)`` distinct uniformly chosen bits."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1] (got {eta!r})")
    n = len(bits)
    k = int(np.floor(eta * n))
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    flips = flip_positions(n, k, gen.random(k)) if k else []
    out = list(bits.bits)
    for idx in flips:
        out[idx] = not out[idx]
    return AnswerBits(tuple(out), eta=k / n)
