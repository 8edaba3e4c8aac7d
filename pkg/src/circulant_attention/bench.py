"""Wall-clock scaling sweep over grid sizes, one CSV row per grid."""

from __future__ import annotations

import csv
import statistics
import time
from typing import IO, Iterable

from .attention import circulant_attention, circulant_attention_naive, self_attention_reference
from .costmodel import attention_flops
from .errors import DomainError
from .rng import SplitMix64
from .spectral import GridShape
from .structured import check_dense_size

CSV_HEADER = ("impl", "N", "H", "W", "d", "heads", "flops_model", "wall_ns_mean", "wall_ns_std")

IMPLS = {
    "ca_fast": circulant_attention,
    "ca_naive": lambda Q, K, V: circulant_attention_naive(Q, K, V, allow_large=True),
    "sa_reference": self_attention_reference,
}


def wallclock_sweep(impl: str, grids: Iterable[GridShape], d: int, heads: int, reps: int,
                    seed: int, allow_large: bool = False) -> list[tuple]:
    """Time ``impl`` on seeded random inputs for each grid.

    One warm-up call, then ``reps`` timed calls, each covering all heads.
    """
    if impl not in IMPLS:
        raise DomainError(f"unknown impl {impl!r}; choose from {sorted(IMPLS)}")
    if reps < 3:
        raise DomainError(f"reps must be >= 3, got {reps}")
    if min(d, heads) < 1:
        raise DomainError("d and heads must be >= 1")
    grids = list(grids)
    if impl != "ca_fast":
        for g in grids:
            check_dense_size(g.N, allow_large)
    fn = IMPLS[impl]
    rng = SplitMix64(seed)
    rows = []
    for g in grids:
        Q, K, V = (rng.uniform((heads, g.H, g.W, d), -1.0, 1.0) for _ in range(3))

        def run():
            for h in range(heads):
                fn(Q[h], K[h], V[h])

        run()
        times = []
        for _ in range(reps):
            t0 = time.perf_counter_ns()
            run()
            times.append(time.perf_counter_ns() - t0)
        rep = attention_flops(g.N, d, heads)
        flops = rep.flops_sa if impl == "sa_reference" else rep.flops_ca
        rows.append((impl, g.N, g.H, g.W, d, heads, flops,
                     statistics.fmean(times), statistics.stdev(times)))
    return rows


def write_csv(rows: Iterable[tuple], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
