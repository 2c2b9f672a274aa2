"""Quantile coupling of Bin(n, 1/2) with N(n/2, n/4).

The cutpoints beta_1 < ... < beta_n are defined by matching tails,

    P{Bin(n, 1/2) >= k} = P{Y > beta_k},   Y ~ N(n/2, n/4),

with sentinels beta_0 = -inf and beta_{n+1} = +inf.  In standardized units
z_k = 2(beta_k - n/2)/sqrt(n) this is psi(z_k) = -log tail, solved by the
safeguarded Newton inverse of psi.  Only k > n/2 is solved directly; the
lower half follows from the reflection beta_{n-k+1} = n - beta_k, which
makes the symmetry identity exact rather than a second round-off path.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left
from dataclasses import dataclass

from .binom_exact import log_tail_exact_all
from .errors import DomainError, RangeError
from .normal_tail import inverse_psi

__all__ = [
    "CutpointRecord",
    "CutpointTable",
    "epsilon_of",
    "build_table",
    "couple",
    "export_csv",
    "N_MAX_TABLE",
]

N_MAX_TABLE = 4096


@dataclass(frozen=True)
class CutpointRecord:
    n: int
    k: int
    epsilon: float  # (2(k-1) - (n-1)) / (n-1); 0 by convention when n = 1
    z: float        # standardized cutpoint, psi(z) = -log_tail
    beta: float     # n/2 + sqrt(n) z / 2
    log_tail: float


@dataclass(frozen=True)
class CutpointTable:
    n: int
    records: tuple[CutpointRecord, ...]  # k = 1 .. n, strictly increasing beta

    def record(self, k: int) -> CutpointRecord:
        if not (1 <= k <= self.n):
            raise DomainError(f"k must be in [1, {self.n}], got {k}")
        return self.records[k - 1]

    @property
    def betas(self) -> list[float]:
        return [rec.beta for rec in self.records]


def epsilon_of(n: int, k: int) -> float:
    """Standardized index (2K - N)/N with K = k - 1, N = n - 1, for the
    upper half k > n/2 only (the lower half is handled by symmetry)."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not (n / 2 < k <= n):
        raise DomainError(f"k must satisfy n/2 < k <= n, got k = {k}")
    return (2 * (k - 1) - (n - 1)) / (n - 1)


def _epsilon_raw(n: int, k: int) -> float:
    if n == 1:
        return 0.0
    return (2 * (k - 1) - (n - 1)) / (n - 1)


def build_table(n: int) -> CutpointTable:
    """Cutpoints for all k = 1..n from the exact big-integer tails."""
    if not (1 <= n <= N_MAX_TABLE):
        raise RangeError(f"n must be in [1, {N_MAX_TABLE}], got {n}")
    tails = log_tail_exact_all(n)
    sqrt_n = math.sqrt(n)

    upper: dict[int, CutpointRecord] = {}
    for k in range(n // 2 + 1, n + 1):
        lt = tails[k].log_prob
        z = inverse_psi(-lt) if lt < 0.0 else 0.0
        upper[k] = CutpointRecord(n=n, k=k, epsilon=_epsilon_raw(n, k), z=z,
                                  beta=n / 2 + sqrt_n * z / 2, log_tail=lt)

    records: list[CutpointRecord] = []
    for k in range(1, n + 1):
        if k in upper:
            records.append(upper[k])
        else:
            mirror = upper[n - k + 1]
            records.append(CutpointRecord(
                n=n, k=k, epsilon=_epsilon_raw(n, k), z=-mirror.z,
                beta=n - mirror.beta, log_tail=tails[k].log_prob))
    return CutpointTable(n=n, records=tuple(records))


def couple(table: CutpointTable, y: float) -> int:
    """Map a normal draw y to the coupled Binomial value: the unique k with
    beta_k < y <= beta_{k+1} (left-open cells, sentinels at +-inf)."""
    y = float(y)
    if not math.isfinite(y):
        raise DomainError(f"y must be finite, got {y!r}")
    # bisect_left counts the cutpoints strictly below y, which is exactly k;
    # a tie y == beta_j lands in the lower cell (left-open convention)
    return bisect_left(table.betas, y)


def export_csv(table: CutpointTable, path: str) -> None:
    """Write the table as CSV with 17-significant-digit floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "k", "epsilon", "z", "beta", "log_tail"])
        for rec in table.records:
            writer.writerow([
                rec.n, rec.k,
                format(rec.epsilon, ".17g"), format(rec.z, ".17g"),
                format(rec.beta, ".17g"), format(rec.log_tail, ".17g"),
            ])
