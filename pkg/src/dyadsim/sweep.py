"""Full ternary context-space sweep: seeded batches and the results table.

All 3^4 = 81 context matrices are enumerated in a canonical lexicographic
order; each gets ``runs_per_context`` seeded simulations.  Per-run seeds are
derived from the master seed with a splitmix64-style mixing chain, so the
whole 8,100-run batch is reproducible bit for bit on any platform and at any
worker count.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import isnan

import numpy as np

from dyadsim.dynamics import ContextMatrix, ModelParams, simulate_batch
from dyadsim.metrics import pearson_rows

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "SweepTable",
    "TailCounts",
    "InvalidSweepError",
    "enumerate_contexts",
    "derive_run_seed",
    "classify_tail",
    "run_sweep",
    "tail_counts",
    "sweep_csv_text",
    "write_sweep_csv",
    "read_sweep_csv",
]

TAIL_LABELS = ("complementary", "neutral", "synchronous", "undefined")

SWEEP_CSV_HEADER = "context_index,s1,o1,o2,s2,run_index,run_seed,r,finite,tail"

_MASK64 = (1 << 64) - 1


class InvalidSweepError(ValueError):
    """A sweep CSV failed structural or consistency validation."""


@dataclass(frozen=True)
class SweepConfig:
    """Sweep settings: master seed, batch size, dynamics, tail threshold."""

    master_seed: int
    runs_per_context: int = 100
    params: ModelParams = field(default_factory=ModelParams)
    tail_threshold: float = 0.25

    def __post_init__(self):
        if int(self.runs_per_context) < 1:
            raise ValueError("runs_per_context must be >= 1")
        if not 0.0 < self.tail_threshold < 1.0:
            raise ValueError("tail_threshold must be in (0, 1)")


@dataclass(frozen=True)
class SweepRecord:
    """One simulated run: where it came from and how it correlated."""

    context_index: int
    context: ContextMatrix
    run_index: int
    run_seed: int
    r: float  # nan marks an undefined correlation
    finite: bool
    tail: str


@dataclass(frozen=True)
class SweepTable:
    """All sweep records in canonical order plus the generating config."""

    records: list[SweepRecord]
    config: SweepConfig

    def __len__(self) -> int:
        return len(self.records)

    def r_array(self) -> np.ndarray:
        return np.array([rec.r for rec in self.records])

    def finite_records(self) -> list[SweepRecord]:
        return [rec for rec in self.records if rec.finite]


def enumerate_contexts() -> list[ContextMatrix]:
    """All 81 ternary contexts, lexicographic over (s1, o1, o2, s2)."""
    return [
        ContextMatrix(*combo)
        for combo in itertools.product((-1, 0, 1), repeat=4)
    ]


def _mix64(z: int) -> int:
    """splitmix64 finalizer: 64-bit avalanche mixing."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_run_seed(master_seed: int, context_index: int, run_index: int) -> int:
    """Per-run 64-bit seed from (master_seed, context_index, run_index).

    Chains the splitmix64 finalizer over the three inputs; platform
    independent and collision-free over any realistic sweep grid.
    """
    z = _mix64(int(master_seed) & _MASK64)
    z = _mix64(z ^ int(context_index))
    z = _mix64(z ^ int(run_index))
    return z


def classify_tail(r: float, threshold: float) -> str:
    """Tail label for a correlation value (nan -> ``undefined``)."""
    if isnan(r):
        return "undefined"
    if r < -threshold:
        return "complementary"
    if r > threshold:
        return "synchronous"
    return "neutral"


def _context_batch(config: SweepConfig, context_index: int, context: ContextMatrix) -> list[SweepRecord]:
    """Simulate and classify all runs of one context."""
    seeds = [
        derive_run_seed(config.master_seed, context_index, j)
        for j in range(config.runs_per_context)
    ]
    B1, B2 = simulate_batch(context, config.params, seeds)
    finite = np.isfinite(B1).all(axis=1) & np.isfinite(B2).all(axis=1)
    r = np.full(len(seeds), np.nan)
    if finite.any():
        r[finite] = pearson_rows(B1[finite], B2[finite])
    records = []
    for j, seed in enumerate(seeds):
        r_j = float(r[j])
        records.append(
            SweepRecord(
                context_index=context_index,
                context=context,
                run_index=j,
                run_seed=seed,
                r=r_j,
                finite=bool(finite[j]) and not isnan(r_j),
                tail=classify_tail(r_j, config.tail_threshold),
            )
        )
    return records


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepTable:
    """Run the full 81-context sweep.

    Contexts are independent work items; with ``workers > 1`` they are
    simulated concurrently.  Output is assembled in canonical order and is
    byte-identical for any worker count.
    """
    contexts = enumerate_contexts()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1:
        batches = [_context_batch(config, i, ctx) for i, ctx in enumerate(contexts)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(
                pool.map(
                    lambda pair: _context_batch(config, pair[0], pair[1]),
                    enumerate(contexts),
                )
            )
    records = [rec for batch in batches for rec in batch]
    return SweepTable(records=records, config=config)


@dataclass(frozen=True)
class TailCounts:
    """Per-tail record counts plus counts of inhibition-containing records."""

    counts: dict
    with_negative: dict

    def proportion_negative(self, tail: str) -> float:
        n = self.counts.get(tail, 0)
        if n == 0:
            raise ValueError(f"no records in tail {tail!r}")
        return self.with_negative.get(tail, 0) / n


def tail_counts(table: SweepTable) -> TailCounts:
    """Exact per-tail counts and per-tail counts of contexts with a -1."""
    if len(table) == 0:
        raise ValueError("empty sweep table")
    counts = {label: 0 for label in TAIL_LABELS}
    with_negative = {label: 0 for label in TAIL_LABELS}
    for rec in table.records:
        counts[rec.tail] += 1
        if rec.context.has_inhibition:
            with_negative[rec.tail] += 1
    return TailCounts(counts=counts, with_negative=with_negative)


def sweep_csv_text(table: SweepTable) -> str:
    """Sweep table as canonical CSV (float fields round-trip-safe)."""
    lines = [SWEEP_CSV_HEADER]
    for rec in table.records:
        ctx = rec.context
        finite = "true" if rec.finite else "false"
        lines.append(
            f"{rec.context_index},{ctx.s1},{ctx.o1},{ctx.o2},{ctx.s2},"
            f"{rec.run_index},{rec.run_seed},{rec.r!r},{finite},{rec.tail}"
        )
    return "\n".join(lines) + "\n"


def write_sweep_csv(table: SweepTable, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(sweep_csv_text(table))


def _fail(row: int, message: str):
    raise InvalidSweepError(f"sweep CSV row {row}: {message}")


def read_sweep_csv(path, config: SweepConfig) -> SweepTable:
    """Read and validate a sweep CSV against the generating config.

    Checks structure (header, cardinality, canonical order), that contexts
    match the canonical enumeration, that run seeds match
    :func:`derive_run_seed` under ``config.master_seed``, and that the
    finite flag and tail label are consistent with the stored r.  Raises
    :class:`InvalidSweepError` on the first violation.
    """
    with open(path, "r", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != SWEEP_CSV_HEADER:
        raise InvalidSweepError("bad or missing sweep CSV header")
    contexts = enumerate_contexts()
    expected = 81 * config.runs_per_context
    if len(lines) - 1 != expected:
        raise InvalidSweepError(
            f"expected {expected} records (81 x {config.runs_per_context}), "
            f"found {len(lines) - 1}"
        )
    records = []
    for row, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != 10:
            _fail(row, f"expected 10 fields, found {len(parts)}")
        try:
            ci = int(parts[0])
            entries = tuple(int(p) for p in parts[1:5])
            run_index = int(parts[5])
            run_seed = int(parts[6])
            r = float(parts[7])
        except ValueError:
            _fail(row, f"unparseable field in {line!r}")
        expected_ci, expected_run = divmod(row, config.runs_per_context)
        if ci != expected_ci or run_index != expected_run:
            _fail(row, f"canonical order violated: ({ci}, {run_index})")
        context = contexts[ci]
        if entries != context.as_tuple():
            _fail(row, f"context {entries} does not match enumeration index {ci}")
        if run_seed != derive_run_seed(config.master_seed, ci, run_index):
            _fail(row, "run_seed does not match the master seed derivation")
        finite_str, tail = parts[8], parts[9]
        if finite_str not in ("true", "false"):
            _fail(row, f"bad finite flag {finite_str!r}")
        finite = finite_str == "true"
        if finite == isnan(r):
            _fail(row, "finite flag inconsistent with r")
        if tail != classify_tail(r, config.tail_threshold):
            _fail(row, f"tail label {tail!r} inconsistent with r={r!r}")
        records.append(
            SweepRecord(
                context_index=ci,
                context=context,
                run_index=run_index,
                run_seed=run_seed,
                r=r,
                finite=finite,
                tail=tail,
            )
        )
    return SweepTable(records=records, config=config)
