"""Schedules driven by a predicted interruption time.

Given a prediction ``tau`` for the interruption, the Pareto-optimal schedule
here is a scaled geometric schedule arranged so that one contract completes
exactly at ``tau``. Buffered variants target ``tau * (1 - p)`` instead,
trading consistency for tolerance to prediction error; the H-aware variant
is the special case ``p = H`` when an error bound ``H`` is known.

The module also carries the two-way reduction between contract schedules and
online bidding sequences (same worst-case structure, costs scaled by the
consistency), and closed-form calculators for the error-ratio bounds and the
H thresholds below which the buffered schedule cannot be beaten or dominated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    ContractSchedule,
    acceleration_ratio,
    completes_by,
    cr_br,
    largest_completed,
)

__all__ = [
    "TimePrediction",
    "SignedError",
    "BiddingSequence",
    "HThresholds",
    "pareto_schedule",
    "buffered_schedule",
    "buffered_ratio_bound",
    "h_thresholds",
    "bidding_to_schedule",
    "schedule_to_bidding",
    "length_cap_ok",
]

_SIGNS = ("positive", "negative", "zero")


@dataclass(frozen=True)
class TimePrediction:
    """Predicted interruption time, optionally with a known error bound H."""

    tau: float
    H: float | None = None

    def __post_init__(self) -> None:
        if self.tau < 1.0:
            raise ValueError(f"prediction must be at least 1 (got {self.tau!r})")
        if self.H is not None and not 0.0 <= self.H <= 1.0:
            raise ValueError(f"error bound H must lie in [0, 1] (got {self.H!r})")


@dataclass(frozen=True)
class SignedError:
    """Relative prediction error with its sign.

    ``positive`` means the interruption came after the prediction
    (``T = tau * (1 + eta)``); ``negative`` means before
    (``T = tau * (1 - eta)``).
    """

    eta: float
    sign: str

    def __post_init__(self) -> None:
        if self.sign not in _SIGNS:
            raise ValueError(f"sign must be one of {_SIGNS} (got {self.sign!r})")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1] (got {self.eta!r})")
        if self.sign == "zero" and self.eta != 0.0:
            raise ValueError("zero-sign error must have eta == 0")

    def interruption(self, tau: float) -> float:
        """The interruption time this error maps the prediction to."""
        if self.sign == "positive":
            return tau * (1.0 + self.eta)
        if self.sign == "negative":
            return tau * (1.0 - self.eta)
        return tau


@dataclass(frozen=True)
class BiddingSequence:
    """Increasing bid sequence with declared performance (r, s).

    The competitive structure of a bid sequence matches the worst-case
    acceleration-ratio formula of a schedule, so declared robustness and
    consistency carry over through the reductions below.
    """

    bids: tuple[float, ...]
    r: float
    s: float

    def __post_init__(self) -> None:
        if not self.bids:
            raise ValueError("bidding sequence must not be empty")
        prev = 0.0
        for b in self.bids:
            if b <= prev:
                raise ValueError("bids must be positive and strictly increasing")
            prev = b

    @classmethod
    def from_geometric(
        cls, base: float, count: int, r: float, s: float, scale: float = 1.0
    ) -> "BiddingSequence":
        return cls(tuple(scale * base**i for i in range(1, count + 1)), r, s)

    def cost_at(self, u: float) -> float:
        """Total spend until the first bid reaching target ``u``."""
        total = 0.0
        for b in self.bids:
            total += b
            if b >= u:
                return total
        raise ValueError(f"no bid reaches the target {u!r}; extend the sequence")

    def competitive_ratio_at(self, u: float) -> float:
        return self.cost_at(u) / u


@dataclass(frozen=True)
class HThresholds:
    """Ranges of the known error bound H in which the buffered schedule wins.

    Below ``optimality`` no equally robust H-aware schedule achieves a better
    acceleration ratio; below ``dominance`` (a larger threshold) none
    dominates it across all error values.
    """

    optimality: float
    dominance: float


def pareto_schedule(r: float, tau: float) -> ContractSchedule:
    """Scaled geometric schedule completing a contract exactly at ``tau``.

    Uses base ``b_r`` and scale ``gamma = tau / S_m`` where ``S_m`` is the
    first geometric prefix sum reaching ``tau``; hence ``gamma`` lies in
    ``(1/b_r, 1]`` and contract ``m`` completes at ``tau``. The ratio at
    ``T = tau`` is ``c_r * (1 - b_r**-m) < c_r``; robustness stays ``r``.
    """
    if tau < 1.0:
        raise ValueError(f"prediction must be at least 1 (got {tau!r})")
    b = cr_br(r).b_r
    s = 0.0
    x = b
    while s < tau:
        s += x
        x *= b
    gamma = tau / s
    return ContractSchedule.geometric(b, gamma)


def buffered_schedule(r: float, tau: float, p: float) -> ContractSchedule:
    """The schedule targeting ``tau * (1 - p)``; tolerates negative error up to ``p``.

    With a known error bound H, choosing ``p = H`` gives the H-aware variant.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"buffer p must lie in [0, 1) (got {p!r})")
    target = tau * (1.0 - p)
    if target < 1.0:
        raise ValueError(
            f"buffered target tau*(1-p) = {target!r} falls below the unit floor"
        )
    return pareto_schedule(r, target)


def buffered_ratio_bound(r: float, p: float, err: SignedError) -> float:
    """Acceleration-ratio bound of the buffered schedule under a signed error.

    Positive error: ``min{c_r (1+eta) / (1-p), r}``; negative error within the
    buffer: ``min{c_r (1-eta) / (1-p), r}``; a negative error beyond the
    buffer forfeits the target contract, leaving only the robustness ``r``.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"buffer p must lie in [0, 1) (got {p!r})")
    c = cr_br(r).c_r
    if err.sign == "positive":
        return min(c * (1.0 + err.eta) / (1.0 - p), r)
    if err.sign == "negative":
        if err.eta <= p:
            return min(c * (1.0 - err.eta) / (1.0 - p), r)
        return r
    return min(c / (1.0 - p), r)


def h_thresholds(r: float) -> HThresholds:
    """Solve the two H thresholds in closed form.

    ``optimality`` solves ``(1+H)/(1-H) = sqrt((c_r+1)/c_r)`` and
    ``dominance`` solves ``(1+H)/(1-H) = (c_r+1)/c_r``; both via
    ``H = (q-1)/(q+1)``.
    """
    c = cr_br(r).c_r
    q_dom = (c + 1.0) / c
    q_opt = math.sqrt(q_dom)
    return HThresholds(
        optimality=(q_opt - 1.0) / (q_opt + 1.0),
        dominance=(q_dom - 1.0) / (q_dom + 1.0),
    )


def bidding_to_schedule(bidding: BiddingSequence, tau: float) -> ContractSchedule:
    """Turn an (r, s)-competitive bid sequence into a schedule for prediction ``tau``.

    Rescales the bids so the first bid reaching ``tau`` equals it exactly,
    then divides every bid by the consistency ``s``; the result completes a
    contract of length ``tau / s`` no later than ``tau`` and keeps the
    worst-case structure (hence robustness) of the bids.
    """
    if tau < 1.0:
        raise ValueError(f"target must be at least 1 (got {tau!r})")
    m = None
    for idx, b in enumerate(bidding.bids):
        if b >= tau:
            m = idx
            break
    if m is None:
        raise ValueError(
            f"no bid reaches tau={tau!r} within the sequence; extend it first"
        )
    rescale = tau / bidding.bids[m]
    return ContractSchedule.explicit(
        tuple(b * rescale / bidding.s for b in bidding.bids)
    )


def schedule_to_bidding(
    schedule: ContractSchedule, s: float, u: float, r: float | None = None
) -> BiddingSequence:
    """Inverse reduction: scale contract lengths up by ``s`` to obtain bids.

    Materializes enough contracts for the bids to cover the target ``u``.
    The declared performance is ``(r, s)``; when ``r`` is omitted it is the
    schedule's measured worst-case ratio over the materialized prefix.
    """
    if s <= 0.0:
        raise ValueError(f"consistency s must be positive (got {s!r})")
    bids: list[float] = []
    i = 1
    size = schedule.size
    while size is None or i <= size:
        bids.append(schedule.x(i) * s)
        if bids[-1] >= u:
            break
        i += 1
    if not bids or bids[-1] < u:
        raise ValueError(f"schedule too short to cover the target {u!r}")
    if r is None:
        from .core import empirical_robustness

        r = empirical_robustness(schedule, len(bids))
    return BiddingSequence(tuple(bids), r=r, s=s)


def length_cap_ok(schedule: ContractSchedule, t: float, r: float) -> bool:
    """Check ``largest_completed(schedule, t) <= t / c_r`` (small absolute slack).

    For r-robust schedules this holds at worst-case interruptions (just
    before a completion) and in the large-index regime; at a completion
    instant itself the freshly finished contract can exceed the cap by up to
    one time unit, so the check is reported per ``t`` rather than asserted
    universally.
    """
    c = cr_br(r).c_r
    return largest_completed(schedule, t) <= t / c + 1e-9


def ratio_at(schedule: ContractSchedule, t: float) -> float:
    """Convenience wrapper: pointwise acceleration ratio as a bare float."""
    return acceleration_ratio(schedule, t).ratio


def pareto_completion_index(r: float, tau: float) -> int:
    """Index of the contract that completes at ``tau`` in :func:`pareto_schedule`."""
    schedule = pareto_schedule(r, tau)
    i = 1
    while not completes_by(schedule.completion(i), tau):
        i += 1
    return i
