"""Schedule families selected through answers to binary queries.

Two families over a shared geometric base ``d``:

* the *ideal* family holds ``2**n`` schedules, pairwise shifted by
  ``d**(1/2**n)``; the n answer bits spell out the binary index of the best
  member. A single wrong bit can cost the full robustness, so this family is
  a benchmark, not a practical schedule.
* the *robust* family holds ``n`` schedules, pairwise shifted by
  ``d**(1/n)``. Query ``Q_i`` asks whether the best member's index is at most
  ``i``; error-free answers are therefore a run of "no" followed by "yes",
  and the count of "no" answers equals the best index. Decoding subtracts a
  buffer of ``round(p*n)`` so that up to a ``p`` fraction of flipped bits
  moves the chosen index only cyclically downward, never past the buffer.

The floor ``2**(1 + 1/2**n)`` on the consistency of any 4-robust schedule
advised by ``n`` bits is matched by the ideal family at ``r = 4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import (
    ContractSchedule,
    ResourceLimitError,
    cr_br,
    largest_completed,
    worst_case_interruption,
)

__all__ = [
    "QueryFamily",
    "AnswerBits",
    "IDEAL_N_CAP",
    "round_half_up",
    "ideal_base",
    "ideal_family",
    "ideal_select",
    "query_consistency_floor",
    "robust_base",
    "robust_family",
    "best_index",
    "encode_answers",
    "decode_robust",
    "partition_sets",
    "worst_case_best_ratio",
]

# Ideal families materialize 2**n members' metadata; keep n bounded.
IDEAL_N_CAP = 20


def round_half_up(x: float) -> int:
    """Nearest integer, halves rounded up (the fixed rounding for p*n, eta*n)."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class AnswerBits:
    """An n-bit query answer string; ``bits[i]`` answers query ``Q_i``.

    ``eta`` records the corruption fraction the string is declared to carry
    (0 for freshly encoded answers).
    """

    bits: tuple[bool, ...]
    eta: float = 0.0

    def __post_init__(self) -> None:
        if not self.bits:
            raise ValueError("answer string must contain at least one bit")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1] (got {self.eta!r})")

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def no_count(self) -> int:
        return sum(1 for b in self.bits if not b)


@dataclass(frozen=True)
class QueryFamily:
    """Indexed family of r-robust schedules, pairwise shifted by ``d**(1/count)``.

    ``member(i)`` is the geometric schedule with ``x(j) = d**(j + i/count)``.
    """

    n: int
    r: float
    mode: str
    d: float
    count: int
    p: float = 0.0
    _members: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.mode not in ("ideal", "robust"):
            raise ValueError(f"mode must be 'ideal' or 'robust' (got {self.mode!r})")
        if self.n < 1:
            raise ValueError("need at least one query")
        # every member shares base d, so one check covers the family
        if self.d * self.d / (self.d - 1.0) > self.r + 1e-9:
            raise ValueError(
                f"base {self.d!r} is not {self.r!r}-robust; refusing the family"
            )

    def member(self, i: int) -> ContractSchedule:
        if not 0 <= i < self.count:
            raise ValueError(f"member index must lie in [0, {self.count - 1}]")
        cached = self._members.get(i)
        if cached is None:
            cached = ContractSchedule.geometric(self.d, self.d ** (i / self.count))
            self._members[i] = cached
        return cached

    def members(self) -> list[ContractSchedule]:
        return [self.member(i) for i in range(self.count)]


def ideal_base(r: float, n: int) -> float:
    """Best r-robust base for the ideal family: ``b_r`` until the unconstrained
    optimum ``1 + 2**n`` becomes r-robust itself."""
    if n < 1:
        raise ValueError("need at least one query")
    k = float(2**n)
    if r <= (1.0 + k) ** 2 / k:
        return cr_br(r).b_r
    return 1.0 + k


def ideal_family(r: float, n: int, cap: int = IDEAL_N_CAP) -> QueryFamily:
    """The family of ``2**n`` schedules decoded by binary index."""
    if n > cap:
        raise ResourceLimitError(
            f"ideal family with n={n} would hold 2**{n} members (cap: n <= {cap})"
        )
    return QueryFamily(n=n, r=r, mode="ideal", d=ideal_base(r, n), count=2**n)


def ideal_select(family: QueryFamily, bits: AnswerBits) -> int:
    """Interpret the bits as the binary index of the chosen member (MSB first)."""
    if family.mode != "ideal":
        raise ValueError("binary-index selection applies to ideal families only")
    if len(bits) != family.n:
        raise ValueError(f"expected {family.n} bits, got {len(bits)}")
    idx = 0
    for b in bits.bits:
        idx = (idx << 1) | int(b)
    return idx


def query_consistency_floor(n: int) -> float:
    """Least consistency any 4-robust schedule can reach with n advice bits."""
    if n < 1:
        raise ValueError("need at least one query")
    return 2.0 ** (1.0 + 1.0 / 2**n)


def robust_base(r: float, n: int, p: float) -> tuple[float, float]:
    """Base and acceleration-ratio bound for the error-tolerant family.

    ``K = (2*round(p*n) + 1) / n`` plays the role ``1/2**n`` plays for the
    ideal family; the bound is ``d**(1 + 1/n + 2p) / (d - 1)`` and applies
    whenever the corrupted fraction stays at most ``p <= 1/2``.
    """
    if n < 1:
        raise ValueError("need at least one query")
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"buffer fraction p must lie in [0, 1/2] (got {p!r})")
    k = (2.0 * round_half_up(p * n) + 1.0) / n
    if r <= (1.0 + k) ** 2 / k:
        d = cr_br(r).b_r
    else:
        d = 1.0 + k
    bound = d ** (1.0 + 1.0 / n + 2.0 * p) / (d - 1.0)
    return d, bound


def robust_family(r: float, n: int, p: float) -> QueryFamily:
    """The family of ``n`` schedules decoded with an error-absorbing buffer."""
    d, _ = robust_base(r, n, p)
    return QueryFamily(n=n, r=r, mode="robust", d=d, count=n, p=p)


def best_index(family: QueryFamily, t: float) -> int:
    """Index of the member with the largest contract completed by ``t``.

    Ties break toward the smallest index.
    """
    if t < 1.0:
        raise ValueError(f"interruptions occur only after unit time (got {t!r})")
    best_i = 0
    best_ell = -1.0
    for i in range(family.count):
        ell = largest_completed(family.member(i), t)
        if ell > best_ell:
            best_ell = ell
            best_i = i
    return best_i


def encode_answers(l: int, n: int) -> AnswerBits:
    """Error-free answers when the best member has index ``l``.

    Bit ``i`` answers "is the best member among the first ``i + 1``": no for
    ``i < l``, yes from ``i = l`` on, so the number of "no" answers equals
    ``l``.
    """
    if not 0 <= l <= n - 1:
        raise ValueError(f"best index must lie in [0, {n - 1}] (got {l!r})")
    return AnswerBits(tuple(i >= l for i in range(n)))


def decode_robust(bits: AnswerBits, n: int, p: float) -> int:
    """Chosen member index: ``(no_count - round(p*n)) mod n``.

    With error-free answers and ``p = 0`` this is the identity on the best
    index; each flipped bit moves the count by one, and the ``round(p*n)``
    buffer keeps the chosen index within cyclic distance ``2*round(p*n)``
    below the true best index whenever at most a ``p`` fraction flipped.
    """
    if len(bits) != n:
        raise ValueError(f"expected {n} bits, got {len(bits)}")
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"buffer fraction p must lie in [0, 1/2] (got {p!r})")
    return (bits.no_count - round_half_up(p * n)) % n


def partition_sets(
    family: QueryFamily, t_max: float
) -> list[list[tuple[float, float]]]:
    """Timeline subsets behind the queries: ``S_i = {t : best_index(t) <= i}``.

    Returns, for each query ``Q_i``, the "yes" region of ``[1, t_max]`` as a
    list of ``[start, end)`` intervals (the final interval closes at
    ``t_max``). The sets are nested, and the differences ``S_i \\ S_{i-1}``
    together with the complement of the last set partition the timeline.
    """
    if family.mode != "robust":
        raise ValueError("partition queries are defined for robust families")
    if t_max < 1.0:
        raise ValueError(f"t_max must be at least 1 (got {t_max!r})")

    cuts = {1.0, t_max}
    for i in range(family.count):
        member = family.member(i)
        j = 1
        while True:
            c = member.completion(j)
            if c > t_max:
                break
            if c > 1.0:
                cuts.add(c)
            j += 1
    points = sorted(cuts)

    sets: list[list[tuple[float, float]]] = [[] for _ in range(family.n)]
    for start, end in zip(points[:-1], points[1:]):
        l = best_index(family, start)
        for i in range(l, family.n):
            intervals = sets[i]
            if intervals and intervals[-1][1] == start:
                intervals[-1] = (intervals[-1][0], end)
            else:
                intervals.append((start, end))
    return sets


def worst_case_best_ratio(
    members: list[ContractSchedule], max_contracts: int
) -> float:
    """Supremum of the error-free ratio under best-member selection.

    Sweeps interruptions placed just before each member's first
    ``max_contracts`` completions and evaluates the largest contract any
    member has completed there. This is the family's consistency when the
    advice always points to the best member.
    """
    worst = 0.0
    for member in members:
        for j in range(1, max_contracts + 1):
            t = worst_case_interruption(member.completion(j))
            if t < 1.0:
                continue
            ell = max(largest_completed(other, t) for other in members)
            ratio = t / ell
            if ratio > worst:
                worst = ratio
    return worst
