"""Two-agent linear update dynamics with ternary context coupling.

The state is a pair of scalar behaviors (b1, b2).  One turn applies the
affine map

    b1' = influence * (s1 * b1 + o1 * b2) + n1 - alpha * b1
    b2' = influence * (o2 * b1 + s2 * b2) + n2 - alpha * b2

where (s1, o1, o2, s2) are the ternary context coefficients, (n1, n2) are
independent uniform noise draws, and alpha is the decay fraction.  This is
the matrix form B' = (influence * C - alpha * Id) @ B + N; the code computes
exactly those coefficients so that results agree with an independent 2x2
matrix multiply to the last bit.

Reproducibility contract: a trajectory is a pure function of
(context, params, seed).  The seeded stream is consumed in a fixed order --
initial b1, initial b2, then one (n1, n2) pair per turn -- so trajectories
can be regenerated exactly, and the vectorized batch path produces bitwise
identical series to the scalar path.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ContextMatrix",
    "ModelParams",
    "BehaviorState",
    "NoiseSource",
    "NonFiniteStateError",
    "Trajectory",
    "step",
    "simulate",
    "simulate_batch",
    "trajectory_csv_text",
    "trajectory_from_csv",
]

TERNARY = (-1, 0, 1)


class NonFiniteStateError(ValueError):
    """A behavior state left double-precision range upstream."""


@dataclass(frozen=True)
class ContextMatrix:
    """Ternary 2x2 task context (s1, o1; o2, s2).

    Row 1 collects influences on Person 1 (s1 from self, o1 from Person 2);
    row 2 collects influences on Person 2 (o2 from Person 1, s2 from self).
    Entries: +1 active, 0 inactive, -1 inhibitory.
    """

    s1: int
    o1: int
    o2: int
    s2: int

    def __post_init__(self):
        for name in ("s1", "o1", "o2", "s2"):
            value = getattr(self, name)
            if value not in TERNARY:
                raise ValueError(f"context entry {name}={value!r} not in {{-1, 0, 1}}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.s1, self.o1, self.o2, self.s2)

    def swapped(self) -> "ContextMatrix":
        """Context with the two agents relabeled: (s2, o2; o1, s1)."""
        return ContextMatrix(s1=self.s2, o1=self.o2, o2=self.o1, s2=self.s1)

    @property
    def has_inhibition(self) -> bool:
        return min(self.as_tuple()) < 0

    def code(self) -> str:
        """Signed-digit string s1 o1 o2 s2, e.g. ``+10+1-1``."""
        return "".join("+1" if v == 1 else "-1" if v == -1 else "0" for v in self.as_tuple())


@dataclass(frozen=True)
class ModelParams:
    """Scalar dynamics parameters.

    ``influence`` is the per-channel transmission gain applied to every
    context entry.  The default 0.5 corresponds to full receptivity shared
    across the dyad's two channels; pass 1.0 for unit per-channel gain
    (several strongly coupled contexts then grow without bound, which the
    simulator permits and flags rather than clamps).
    """

    alpha: float = 0.1
    influence: float = 0.5
    noise_half_width: float = 0.5
    turns: int = 500

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha!r}")
        if self.influence < 0.0:
            raise ValueError(f"influence must be >= 0, got {self.influence!r}")
        if self.noise_half_width < 0.0:
            raise ValueError(f"noise_half_width must be >= 0, got {self.noise_half_width!r}")
        if int(self.turns) != self.turns or self.turns < 1:
            raise ValueError(f"turns must be a positive integer, got {self.turns!r}")

    def coefficients(self, context: ContextMatrix) -> tuple[float, float, float, float]:
        """Entries (a11, a12, a21, a22) of influence * C - alpha * Id."""
        a11 = self.influence * context.s1 - self.alpha
        a12 = self.influence * context.o1
        a21 = self.influence * context.o2
        a22 = self.influence * context.s2 - self.alpha
        return a11, a12, a21, a22


class BehaviorState(tuple):
    """Immutable (b1, b2) pair."""

    __slots__ = ()

    def __new__(cls, b1: float, b2: float):
        return super().__new__(cls, (float(b1), float(b2)))

    @property
    def b1(self) -> float:
        return self[0]

    @property
    def b2(self) -> float:
        return self[1]


class NoiseSource:
    """Seeded uniform noise stream with a pinned draw order.

    Wraps numpy's PCG64 bit generator; ``ALGORITHM_ID`` names the generator
    and draw discipline so identical (seed, algorithm_id) pairs replay the
    same sequence on every platform.  Draw order: initial b1, initial b2,
    then one (n1, n2) pair per turn, drawn as a single (turns, 2) block.
    """

    ALGORITHM_ID = "numpy-pcg64-uniform/1"

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._rng = np.random.Generator(np.random.PCG64(self.seed))

    def initial_state(self) -> BehaviorState:
        """Initial condition, both components uniform on [-0.5, 0.5]."""
        b1, b2 = self._rng.uniform(-0.5, 0.5, 2)
        return BehaviorState(b1, b2)

    def turn_noise(self, turns: int, half_width: float) -> np.ndarray:
        """(turns, 2) array of per-turn per-agent draws on [-h, +h]."""
        return self._rng.uniform(-half_width, half_width, (int(turns), 2))


def draw_run_inputs(params: ModelParams, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Initial state (2,) and noise block (turns, 2) for one seeded run."""
    source = NoiseSource(seed)
    init = np.asarray(source.initial_state(), dtype=float)
    noise = source.turn_noise(params.turns, params.noise_half_width)
    return init, noise


def step(
    context: ContextMatrix,
    params: ModelParams,
    prev: BehaviorState,
    noise: tuple[float, float],
) -> BehaviorState:
    """Apply one update turn to ``prev`` with the given noise pair.

    Pure function of its arguments.  Raises :class:`NonFiniteStateError` if
    the incoming state is not finite (a diverging run has already left
    double-precision range).
    """
    b1, b2 = float(prev[0]), float(prev[1])
    if not (np.isfinite(b1) and np.isfinite(b2)):
        raise NonFiniteStateError(f"non-finite behavior state ({b1!r}, {b2!r})")
    a11, a12, a21, a22 = params.coefficients(context)
    n1, n2 = float(noise[0]), float(noise[1])
    return BehaviorState(a11 * b1 + a12 * b2 + n1, a21 * b1 + a22 * b2 + n2)


@dataclass(frozen=True)
class Trajectory:
    """One simulated interaction: turn-indexed series for both agents.

    ``b1`` and ``b2`` have length turns + 1; index 0 is the initial
    condition drawn from the seeded stream.
    """

    context: ContextMatrix
    seed: int
    b1: np.ndarray
    b2: np.ndarray

    def __len__(self) -> int:
        return len(self.b1)

    @property
    def turns(self) -> int:
        return len(self.b1) - 1

    def state(self, t: int) -> BehaviorState:
        return BehaviorState(self.b1[t], self.b2[t])

    @property
    def states(self) -> list[BehaviorState]:
        return [BehaviorState(x, y) for x, y in zip(self.b1, self.b2)]


def simulate(context: ContextMatrix, params: ModelParams, seed: int) -> Trajectory:
    """Run one seeded interaction of ``params.turns`` turns.

    Deterministic given (context, params, seed).  Propagates
    :class:`NonFiniteStateError` if a state diverges beyond double range
    before the final turn.
    """
    init, noise = draw_run_inputs(params, seed)
    a11, a12, a21, a22 = params.coefficients(context)
    turns = params.turns
    b1 = np.empty(turns + 1)
    b2 = np.empty(turns + 1)
    x, y = float(init[0]), float(init[1])
    b1[0] = x
    b2[0] = y
    for t in range(1, turns + 1):
        if not (np.isfinite(x) and np.isfinite(y)):
            raise NonFiniteStateError(
                f"behavior state left double-precision range at turn {t - 1}"
            )
        n1 = float(noise[t - 1, 0])
        n2 = float(noise[t - 1, 1])
        x, y = a11 * x + a12 * y + n1, a21 * x + a22 * y + n2
        b1[t] = x
        b2[t] = y
    return Trajectory(context=context, seed=int(seed), b1=b1, b2=b2)


def simulate_batch(
    context: ContextMatrix, params: ModelParams, seeds: list[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate many seeded runs of one context in lockstep.

    Returns (B1, B2), each of shape (len(seeds), turns + 1).  Every row is
    bitwise identical to the corresponding :func:`simulate` output; runs
    that diverge are carried through as inf/nan rather than raised, so the
    caller can flag them.
    """
    runs = len(seeds)
    turns = params.turns
    init = np.empty((runs, 2))
    noise = np.empty((runs, turns, 2))
    for i, seed in enumerate(seeds):
        init[i], noise[i] = draw_run_inputs(params, seed)
    a11, a12, a21, a22 = params.coefficients(context)
    B1 = np.empty((runs, turns + 1))
    B2 = np.empty((runs, turns + 1))
    x = init[:, 0].copy()
    y = init[:, 1].copy()
    B1[:, 0] = x
    B2[:, 0] = y
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, turns + 1):
            x, y = (
                a11 * x + a12 * y + noise[:, t - 1, 0],
                a21 * x + a22 * y + noise[:, t - 1, 1],
            )
            B1[:, t] = x
            B2[:, t] = y
    return B1, B2


def trajectory_csv_text(trajectory: Trajectory) -> str:
    """Trajectory as CSV (`t,b1,b2`), round-trip-safe decimal floats."""
    lines = ["t,b1,b2"]
    for t in range(len(trajectory)):
        lines.append(f"{t},{float(trajectory.b1[t])!r},{float(trajectory.b2[t])!r}")
    return "\n".join(lines) + "\n"


def trajectory_from_csv(text: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse `t,b1,b2` CSV text back into (b1, b2) arrays."""
    lines = text.strip().split("\n")
    if not lines or lines[0] != "t,b1,b2":
        raise ValueError("not a trajectory CSV: bad header")
    b1, b2 = [], []
    for expected_t, line in enumerate(lines[1:]):
        t_str, x, y = line.split(",")
        if int(t_str) != expected_t:
            raise ValueError(f"trajectory CSV out of order at row {expected_t}")
        b1.append(float(x))
        b2.append(float(y))
    return np.asarray(b1), np.asarray(b2)
