"""Binary search over alpha to hit a target feature count.

Raising alpha rewards importance and selects more features; lowering it
weights redundancy and selects fewer. Selected count is usually monotone
in alpha but is not guaranteed to be (approximate solvers, energy ties),
so the search keeps the best probe seen and only uses monotonicity to
steer, never for correctness. Any observed non-monotonicity is flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, KTargetOutOfRangeError
from .qubo import build_qubo
from .solver import SCHEMA_VERSION, SolveResult, backend_solve
from .stats import ScoreSet


@dataclass(frozen=True)
class AlphaSearchConfig:
    k_target: int
    max_iters: int = 32
    backend: str = "exhaustive"
    params: dict = field(default_factory=dict)
    alpha_lo: float = 0.0
    alpha_hi: float = 1.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise DegenerateInputError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (0.0 <= self.alpha_lo < self.alpha_hi <= 1.0):
            raise DegenerateInputError(
                f"need 0 <= alpha_lo < alpha_hi <= 1, got {self.alpha_lo} .. {self.alpha_hi}"
            )


@dataclass(frozen=True)
class AlphaSearchResult:
    """Outcome of one search: the chosen probe plus the full audit trace."""

    alpha: float
    selection: np.ndarray
    k_achieved: int
    exact: bool
    trace: tuple[tuple[float, int], ...]
    non_monotone_observed: bool

    def __post_init__(self):
        bits = np.ascontiguousarray(self.selection, dtype=np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "selection", bits)
        if int(bits.sum()) != self.k_achieved:
            raise DegenerateInputError("k_achieved does not match the selection popcount")

    def selected_indices(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.selection)]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "alpha_search_result",
            "alpha": float(self.alpha),
            "selection": [int(b) for b in self.selection],
            "k_achieved": int(self.k_achieved),
            "exact": bool(self.exact),
            "trace": [[float(a), int(k)] for a, k in self.trace],
            "non_monotone_observed": bool(self.non_monotone_observed),
        }


def probe_seed(base_seed: int, probe_index: int) -> int:
    """Per-probe solver seed derived from one base seed, so the whole
    search replays from a single integer."""
    return int(np.random.SeedSequence([int(base_seed), int(probe_index)]).generate_state(1)[0])


def probe_alpha(
    scores: ScoreSet,
    alpha: float,
    backend: str = "exhaustive",
    params: dict | None = None,
    probe_index: int = 0,
) -> SolveResult:
    """Build the objective at one alpha and solve it."""
    params = dict(params or {})
    if "seed" in params:
        params["seed"] = probe_seed(params["seed"], probe_index)
    return backend_solve(build_qubo(scores, alpha), backend, params)


def _trace_non_monotone(trace) -> bool:
    by_alpha = sorted(trace)
    return any(k_a > k_b for (_, k_a), (_, k_b) in zip(by_alpha, by_alpha[1:]))


def search_alpha(scores: ScoreSet, cfg: AlphaSearchConfig) -> AlphaSearchResult:
    """Bisect [alpha_lo, alpha_hi] on selected-feature count.

    Stops on an exact hit or after max_iters probes; a non-exact run
    returns the probe minimizing |k - k_target| (ties toward smaller k,
    then smaller alpha).
    """
    n = scores.n_features
    if not (1 <= cfg.k_target <= n):
        raise KTargetOutOfRangeError(f"k_target must be in [1, {n}], got {cfg.k_target}")
    lo, hi = cfg.alpha_lo, cfg.alpha_hi
    trace: list[tuple[float, int]] = []
    best_key = None
    best = None
    for it in range(cfg.max_iters):
        alpha = 0.5 * (lo + hi)
        result = probe_alpha(scores, alpha, cfg.backend, cfg.params, probe_index=it)
        k = result.k_selected
        trace.append((alpha, k))
        key = (abs(k - cfg.k_target), k, alpha)
        if best_key is None or key < best_key:
            best_key = key
            best = (alpha, result.bits, k)
        if k == cfg.k_target:
            break
        if k < cfg.k_target:
            lo = alpha
        else:
            hi = alpha
    alpha, bits, k = best
    return AlphaSearchResult(
        alpha=alpha,
        selection=bits,
        k_achieved=k,
        exact=(k == cfg.k_target),
        trace=tuple(trace),
        non_monotone_observed=_trace_non_monotone(trace),
    )
