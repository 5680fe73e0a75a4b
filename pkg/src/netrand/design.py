"""Sequential pairwise assignment engine with incremental imbalance tracking.

Subjects arrive in pairs and each pair receives opposite treatments.  The
engine maintains the signed row-sum vector S of the revealed adjacency prefix
and its squared norm (the squared imbalance) and evaluates both candidate
assignments of a new pair in O(m) time from the two newly revealed rows.

All state is kept in float64.  For binary graphs every intermediate quantity
is an integer bounded far below 2**53, so the arithmetic is exact and the
incremental squared imbalance equals a from-scratch recomputation, as
integers, at every step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError
from .graph import Graph, RevealedView

ADAPTIVE = "adaptive"
RANDOM = "random"

_RECOMPUTE_CHUNK = 2048


@dataclass(frozen=True)
class DesignConfig:
    """Assignment policy: biased coin with probability ``b`` on the smaller candidate.

    ``b`` must lie in [0.5, 1]; the boundary value 0.5 makes the adaptive
    policy coincide with the random policy (same draws, same assignments).
    The random policy ignores ``b``.
    """

    policy: str = ADAPTIVE
    b: float = 0.95
    seed: object = None

    def __post_init__(self):
        if self.policy not in (ADAPTIVE, RANDOM):
            raise ParameterError(f"unknown policy {self.policy!r}")
        if self.policy == ADAPTIVE and not (0.5 <= self.b <= 1.0):
            raise ParameterError("biasing probability must lie in [0.5, 1]")

    @property
    def effective_b(self) -> float:
        return 0.5 if self.policy == RANDOM else float(self.b)


@dataclass
class DesignState:
    """State after ``pairs`` completed pairs: sign prefix, S prefix, exact I^2.

    Buffers are preallocated to the even part of n; the valid prefix has
    length 2 * pairs.  Confined to a single run; not thread-safe.
    """

    pairs: int
    s_buf: np.ndarray
    tau_buf: np.ndarray
    i2: float
    weighted: bool

    @property
    def s(self) -> np.ndarray:
        return self.s_buf[: 2 * self.pairs]

    @property
    def tau(self) -> np.ndarray:
        return self.tau_buf[: 2 * self.pairs]

    @property
    def i2_exact(self):
        return self.i2 if self.weighted else int(self.i2)


@dataclass(frozen=True)
class PairIncrement:
    """Quantities read from the two newly revealed rows over the current prefix.

    ``y`` is the new-column difference over the prefix, ``z1``/``z2`` the
    inner products of the two new row prefixes with the sign prefix,
    ``corner`` the entry joining the two new subjects and ``diag`` the
    self-weight (1 for generated graphs; scaled copies carry the scale).
    """

    y: np.ndarray
    z1: float
    z2: float
    corner: float
    diag: float = 1.0


def assign_first_pair(view: RevealedView, rng) -> DesignState:
    """Assign opposite treatments to the first two subjects by a fair coin."""
    if view.revealed < 2:
        raise ContractError("first pair needs a revealed 2x2 prefix")
    g = view.graph
    n2 = g.n - (g.n % 2)
    d = float(view.entry(0, 0))
    a = float(view.entry(0, 1))
    tau0 = 1.0 if rng.random() < 0.5 else -1.0
    s_buf = np.zeros(n2, dtype=np.float64)
    tau_buf = np.zeros(n2, dtype=np.float64)
    s_buf[0] = tau0 * (d - a)
    s_buf[1] = -tau0 * (d - a)
    tau_buf[0] = tau0
    tau_buf[1] = -tau0
    return DesignState(
        pairs=1, s_buf=s_buf, tau_buf=tau_buf, i2=2.0 * (d - a) ** 2, weighted=g.weighted
    )


def increment_from_view(view: RevealedView, state: DesignState) -> PairIncrement:
    """Build the increment for the next pair from the revealed prefix."""
    length = 2 * state.pairs
    block = view.pair_block(length).astype(np.float64)
    z = block @ state.tau
    y = block[1] - block[0]
    return PairIncrement(
        y=y,
        z1=float(z[0]),
        z2=float(z[1]),
        corner=float(view.entry(length, length + 1)),
        diag=float(view.entry(length, length)),
    )


def candidate_imbalances(state: DesignState, inc: PairIncrement) -> tuple[float, float]:
    """Exact squared imbalances of the two candidate assignments, in O(m).

    Returns (i2_01, i2_10) for treatments (0,1) and (1,0) on the new pair.
    Equals a full recomputation of the squared imbalance over the extended
    prefix, integer-exactly for binary graphs.
    """
    length = 2 * state.pairs
    if inc.y.shape != (length,):
        raise ContractError(
            f"increment of length {inc.y.shape[0]} does not match prefix {length}"
        )
    sy = float(state.s @ inc.y)
    base = state.i2 + float(inc.y @ inc.y)
    e = inc.diag - inc.corner
    i2_01 = base - 2.0 * sy + (inc.z1 + e) ** 2 + (inc.z2 - e) ** 2
    i2_10 = base + 2.0 * sy + (inc.z1 - e) ** 2 + (inc.z2 + e) ** 2
    return i2_01, i2_10


def step(state: DesignState, inc: PairIncrement, cfg: DesignConfig, rng) -> DesignState:
    """Apply the biased coin to the candidate pair and extend the state.

    The strictly smaller candidate wins with probability b, the larger with
    1 - b, exact ties fall to a fair coin; exactly one uniform draw is
    consumed.  Ties are detected by exact comparison (integer-exact for
    binary graphs; no tolerance for weighted ones, where ties have measure
    zero and an epsilon would change the procedure's law).
    """
    i2_01, i2_10 = candidate_imbalances(state, inc)
    if i2_01 < i2_10:
        p01 = cfg.effective_b
    elif i2_01 > i2_10:
        p01 = 1.0 - cfg.effective_b
    else:
        p01 = 0.5
    choose_01 = rng.random() < p01
    length = 2 * state.pairs
    e = inc.diag - inc.corner
    if choose_01:
        state.s_buf[:length] -= inc.y
        state.s_buf[length] = inc.z1 + e
        state.s_buf[length + 1] = inc.z2 - e
        state.tau_buf[length] = 1.0
        state.tau_buf[length + 1] = -1.0
        state.i2 = i2_01
    else:
        state.s_buf[:length] += inc.y
        state.s_buf[length] = inc.z1 - e
        state.s_buf[length + 1] = inc.z2 + e
        state.tau_buf[length] = -1.0
        state.tau_buf[length + 1] = 1.0
        state.i2 = i2_10
    state.pairs += 1
    return state


@dataclass(frozen=True)
class DesignResult:
    """Outcome of a full sequential run.

    ``i2_trajectory`` holds the squared imbalance after each completed pair
    (int64 for binary graphs, float64 for weighted).  ``final_i2`` follows
    the odd-n convention that the last unpaired subject does not change the
    reported imbalance; ``full_i2`` additionally includes the last row and
    column of the matrix (identical to ``final_i2`` for even n).
    """

    tau: np.ndarray
    i2_trajectory: np.ndarray
    final_i2: int | float
    full_i2: int | float
    weighted: bool

    @property
    def final_i(self) -> float:
        return math.sqrt(self.final_i2)

    @property
    def i_trajectory(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.i2_trajectory, dtype=np.float64))


def run_design(g: Graph, cfg: DesignConfig, *, rng=None) -> DesignResult:
    """Run the sequential pairwise design over subjects in index order.

    Only the revealed principal submatrix is ever read while assigning.  An
    odd trailing subject is assigned by a fair coin.  Randomness budget: one
    uniform for the first pair, one per subsequent pair, one for an odd
    trailing subject, in that order.
    """
    n = g.n
    if n < 2:
        raise ParameterError("design needs at least 2 subjects")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    view = RevealedView(g)
    view.reveal_to(2)
    state = assign_first_pair(view, rng)
    pairs = n // 2
    traj = np.empty(pairs, dtype=np.float64)
    traj[0] = state.i2
    for m in range(1, pairs):
        view.reveal_to(2 * m + 2)
        inc = increment_from_view(view, state)
        step(state, inc, cfg, rng)
        traj[m] = state.i2
    tau = np.empty(n, dtype=np.int8)
    tau[: 2 * pairs] = state.tau_buf.astype(np.int8)
    if n % 2:
        tau[-1] = 1 if rng.random() < 0.5 else -1
        full_i2 = imbalance_recompute(g, tau, n)
    else:
        full_i2 = state.i2_exact
    if g.weighted:
        trajectory = traj
        final_i2 = float(traj[-1])
    else:
        trajectory = np.asarray(np.rint(traj), dtype=np.int64)
        final_i2 = int(trajectory[-1])
    return DesignResult(
        tau=tau,
        i2_trajectory=trajectory,
        final_i2=final_i2,
        full_i2=full_i2,
        weighted=g.weighted,
    )


def imbalance_recompute(g: Graph, tau, upto: int | None = None):
    """Squared imbalance of a sign prefix by direct dense multiplication.

    Reference checker for the incremental path: computes the squared norm of
    A^(upto) tau[:upto] in row chunks.  Returns an int for binary graphs.
    """
    tau = np.asarray(tau, dtype=np.float64)
    if tau.ndim != 1:
        raise ContractError("sign vector must be one-dimensional")
    if upto is None:
        upto = tau.shape[0]
    if upto < 1 or upto > g.n or upto > tau.shape[0]:
        raise ContractError(f"prefix length {upto} invalid for n={g.n}, tau={tau.shape[0]}")
    prefix = tau[:upto]
    total = 0.0
    for i0 in range(0, upto, _RECOMPUTE_CHUNK):
        i1 = min(i0 + _RECOMPUTE_CHUNK, upto)
        rows = g.matrix[i0:i1, :upto].astype(np.float64)
        s = rows @ prefix
        total += float(s @ s)
    return total if g.weighted else int(round(total))


def run_design_many(g: Graph, cfg: DesignConfig, reps: int, *, rng=None) -> np.ndarray:
    """Final squared imbalances of ``reps`` independent runs on a fixed graph.

    Vectorizes the per-step coin across replicates; each replicate consumes
    the same draws it would in :func:`run_design` when fed column r of the
    per-step uniform blocks (property-tested against the scalar engine).
    Returns int64 for binary graphs, float64 for weighted ones.  The odd-n
    convention applies: a trailing unpaired subject never changes the value.
    """
    n = g.n
    if n < 2:
        raise ParameterError("design needs at least 2 subjects")
    if reps < 1:
        raise ParameterError("reps must be at least 1")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    b = cfg.effective_b
    n2 = n - (n % 2)
    pairs = n2 // 2
    mat = g.matrix
    d = float(mat[0, 0])
    a12 = float(mat[0, 1])

    s = np.zeros((reps, n2), dtype=np.float64)
    tau = np.zeros((reps, n2), dtype=np.float64)
    tau0 = np.where(rng.random(reps) < 0.5, 1.0, -1.0)
    tau[:, 0] = tau0
    tau[:, 1] = -tau0
    s[:, 0] = tau0 * (d - a12)
    s[:, 1] = -tau0 * (d - a12)
    i2 = np.full(reps, 2.0 * (d - a12) ** 2)

    for m in range(1, pairs):
        length = 2 * m
        block = mat[length:length + 2, :length].astype(np.float64)
        corner = float(mat[length, length + 1])
        diag = float(mat[length, length])
        e = diag - corner
        z = tau[:, :length] @ block.T
        y = block[1] - block[0]
        sy = s[:, :length] @ y
        base = i2 + float(y @ y)
        i2_01 = base - 2.0 * sy + (z[:, 0] + e) ** 2 + (z[:, 1] - e) ** 2
        i2_10 = base + 2.0 * sy + (z[:, 0] - e) ** 2 + (z[:, 1] + e) ** 2
        p01 = np.where(i2_01 < i2_10, b, np.where(i2_01 > i2_10, 1.0 - b, 0.5))
        pick_01 = rng.random(reps) < p01
        sgn = np.where(pick_01, 1.0, -1.0)
        s[:, :length] -= sgn[:, None] * y
        s[:, length] = z[:, 0] + sgn * e
        s[:, length + 1] = z[:, 1] - sgn * e
        tau[:, length] = sgn
        tau[:, length + 1] = -sgn
        i2 = np.where(pick_01, i2_01, i2_10)

    if g.weighted:
        return i2
    return np.asarray(np.rint(i2), dtype=np.int64)
