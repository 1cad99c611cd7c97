"""Contract schedules and acceleration-ratio evaluation.

A schedule executes a contract algorithm repeatedly with increasing lengths.
Interrupting the schedule at time ``T`` yields the largest contract completed
by ``T``; the acceleration ratio ``T / ell(X, T)`` measures the penalty paid
for not knowing the interruption in advance.

Conventions used throughout the package:

* interruptions happen at ``T >= 1`` (one unit of time always elapses first);
* when nothing has completed by ``T``, ``ell(X, T) := 1`` (same unit-time
  rationale), which also fixes the boundary term ``x_0 := 1`` in the
  worst-case robustness formula;
* a contract finishing exactly at ``T`` counts as completed. Completion
  comparisons carry a small relative tolerance so that constructions which
  place a completion *at* a target time survive float round-off, while
  interruptions placed "just before" a completion (see
  :func:`worst_case_interruption`) remain strictly before it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "COMPLETION_RTOL",
    "WORST_CASE_BACKOFF",
    "ResourceLimitError",
    "ContractSchedule",
    "RobustnessParams",
    "EvalRecord",
    "completes_by",
    "worst_case_interruption",
    "cr_br",
    "exponential_robustness",
    "largest_completed",
    "acceleration_ratio",
    "empirical_robustness",
    "schedule_prefix",
]

# Relative tolerance for completion-time comparisons; ties count as completed.
COMPLETION_RTOL = 1e-12

# Relative backoff used to place an interruption "just before" a completion.
# Must stay well above COMPLETION_RTOL so the backed-off time never rounds
# back onto the completion it is meant to precede.
WORST_CASE_BACKOFF = 1e-9


class ResourceLimitError(RuntimeError):
    """An operation would exceed a configured resource cap."""


def _unit(t: float) -> float:
    return t if t > 1.0 else 1.0


def completes_by(completion: float, t: float) -> bool:
    """Whether a contract finishing at ``completion`` counts as done by ``t``."""
    return completion <= t + COMPLETION_RTOL * _unit(t)


def worst_case_interruption(completion: float) -> float:
    """An interruption placed just before ``completion``.

    The backoff is relative so it stays representable (and effective) at
    completion times far beyond the reciprocal of the double-precision ulp.
    """
    return completion - WORST_CASE_BACKOFF * _unit(completion)


@dataclass(frozen=True)
class ContractSchedule:
    """An increasing sequence of contract lengths.

    Either ``lengths`` is given explicitly, or the schedule is geometric with
    ``x(i) = scale * base**i`` (evaluated in closed form, never accumulated).
    Geometric schedules are unbounded; contracts materialize on demand.
    """

    lengths: tuple[float, ...] | None = None
    base: float | None = None
    scale: float | None = None
    _completions: list[float] = field(
        default_factory=list, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if (self.lengths is None) == (self.base is None):
            raise ValueError("give either explicit lengths or a geometric base")
        if self.lengths is not None:
            if not self.lengths:
                raise ValueError("explicit schedule needs at least one contract")
            prev = 0.0
            for x in self.lengths:
                if x <= prev:
                    raise ValueError(
                        "contract lengths must be positive and strictly increasing"
                    )
                prev = x
        else:
            if self.base is None or self.base <= 1.0:
                raise ValueError("geometric base must exceed 1")
            if self.scale is None or self.scale <= 0.0:
                raise ValueError("geometric scale must be positive")

    @classmethod
    def explicit(cls, lengths) -> "ContractSchedule":
        return cls(lengths=tuple(float(x) for x in lengths))

    @classmethod
    def geometric(cls, base: float, scale: float = 1.0) -> "ContractSchedule":
        return cls(base=float(base), scale=float(scale))

    @property
    def is_geometric(self) -> bool:
        return self.lengths is None

    @property
    def size(self) -> int | None:
        """Number of contracts, or ``None`` for an unbounded schedule."""
        return None if self.lengths is None else len(self.lengths)

    @property
    def label(self) -> str:
        if self.is_geometric:
            return f"geometric(base={self.base:g}, scale={self.scale:g})"
        return f"explicit({len(self.lengths)} contracts)"

    def x(self, i: int) -> float:
        """Length of the ``i``-th contract, ``i >= 1``."""
        if i < 1:
            raise ValueError("contract indices start at 1")
        if self.lengths is not None:
            if i > len(self.lengths):
                raise IndexError(f"schedule has only {len(self.lengths)} contracts")
            return self.lengths[i - 1]
        return self.scale * self.base**i

    def completion(self, i: int) -> float:
        """Completion time of the ``i``-th contract (sum of the first ``i``)."""
        if i < 1:
            raise ValueError("contract indices start at 1")
        memo = self._completions
        while len(memo) < i:
            k = len(memo) + 1
            prev = memo[-1] if memo else 0.0
            memo.append(prev + self.x(k))
        return memo[i - 1]


@dataclass(frozen=True)
class RobustnessParams:
    """Target robustness ``r`` with the derived base-range endpoints.

    ``c_r`` and ``b_r`` are the two roots of ``a**2 / (a - 1) = r``; they
    satisfy ``c_r + b_r == c_r * b_r == r`` and ``1 < c_r <= 2 <= b_r``.
    """

    r: float
    c_r: float
    b_r: float


@dataclass(frozen=True)
class EvalRecord:
    """Pointwise evaluation of a schedule at one interruption time."""

    T: float
    ell: float
    ratio: float
    schedule_id: str


def cr_br(r: float) -> RobustnessParams:
    """Both roots of ``a**2/(a-1) = r``; defined for ``r >= 4``."""
    if r < 4.0:
        raise ValueError(f"r must be at least 4 (got {r!r}); the root pair is real only there")
    root = math.sqrt(r * r - 4.0 * r)
    return RobustnessParams(r=r, c_r=(r - root) / 2.0, b_r=(r + root) / 2.0)


def exponential_robustness(a: float) -> float:
    """Worst-case acceleration ratio of the schedule ``(a**i)``: ``a**2/(a-1)``."""
    if a <= 1.0:
        raise ValueError(f"base must exceed 1 (got {a!r})")
    return a * a / (a - 1.0)


def largest_completed(schedule: ContractSchedule, t: float) -> float:
    """Length of the largest contract completed by time ``t``.

    Completion exactly at ``t`` counts. Returns 1 when nothing has completed
    (unit-time floor).
    """
    if t < 1.0:
        raise ValueError(f"interruptions occur only after unit time (got t={t!r})")
    ell = 1.0
    size = schedule.size
    i = 1
    while size is None or i <= size:
        if not completes_by(schedule.completion(i), t):
            break
        ell = schedule.x(i)
        i += 1
    return ell


def acceleration_ratio(schedule: ContractSchedule, t: float) -> EvalRecord:
    """Pointwise acceleration ratio ``t / largest_completed(schedule, t)``."""
    ell = largest_completed(schedule, t)
    return EvalRecord(T=t, ell=ell, ratio=t / ell, schedule_id=schedule.label)


def empirical_robustness(schedule: ContractSchedule, i_max: int) -> float:
    """Worst-case ratio over interruptions just before the first ``i_max`` completions.

    Evaluates ``max_i completion(i) / x(i-1)`` with the boundary term
    ``x(0) := 1``; monotone nondecreasing in ``i_max``. Explicit schedules
    shorter than ``i_max`` are scanned to their end.
    """
    if i_max < 1:
        raise ValueError("i_max must be at least 1")
    size = schedule.size
    if size is not None:
        i_max = min(i_max, size)
    best = 0.0
    prev_x = 1.0
    for i in range(1, i_max + 1):
        term = schedule.completion(i) / prev_x
        if term > best:
            best = term
        prev_x = schedule.x(i)
    return best


def schedule_prefix(
    schedule: ContractSchedule, t_max: float
) -> list[tuple[float, float]]:
    """All ``(length, completion)`` pairs completing by ``t_max``, plus the
    first pair beyond it (so interruptions near ``t_max`` stay analyzable)."""
    if t_max < 1.0:
        raise ValueError(f"t_max must be at least 1 (got {t_max!r})")
    out: list[tuple[float, float]] = []
    size = schedule.size
    i = 1
    while size is None or i <= size:
        c = schedule.completion(i)
        out.append((schedule.x(i), c))
        if not completes_by(c, t_max):
            break
        i += 1
    return out
