"""QUBO minimizers behind one backend abstraction.

Exact enumeration handles small instances; simulated annealing handles the
rest. The "remote-annealer-stub" backend documents where a hardware client
would plug in. All solvers are deterministic given their seed, and ties are
broken toward the lexicographically smallest bit vector (index 0 most
significant) so downstream searches stay reproducible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import (
    DegenerateInputError,
    TooLargeError,
    UnknownBackendError,
)
from .qubo import QuboInstance, energy

#: Hard cap for exhaustive enumeration (2^24 states).
EXHAUSTIVE_MAX_N = 24

#: The auto backend enumerates exhaustively up to this size, anneals above.
AUTO_EXHAUSTIVE_CAP = 16

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric beta ladder for simulated annealing restarts."""

    sweeps: int = 1000
    beta_start: float = 0.1
    beta_end: float = 10.0
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.sweeps < 1:
            raise DegenerateInputError(f"sweeps must be >= 1, got {self.sweeps}")
        if self.restarts < 1:
            raise DegenerateInputError(f"restarts must be >= 1, got {self.restarts}")
        # The geometric ladder needs a strictly positive start.
        if not (0.0 < self.beta_start < self.beta_end):
            raise DegenerateInputError(
                f"need 0 < beta_start < beta_end, got {self.beta_start} .. {self.beta_end}"
            )

    def betas(self) -> np.ndarray:
        return np.geomspace(self.beta_start, self.beta_end, self.sweeps)


@dataclass(frozen=True)
class SolveResult:
    """A solver's best bit vector; energy is recomputed from the instance.

    ``wall_time`` is measured, volatile, and excluded from the JSON form so
    artifacts replay byte-identically.
    """

    bits: np.ndarray
    energy: float
    backend: str
    seed: int | None
    sweeps: int
    restarts: int
    wall_time: float = 0.0

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def k_selected(self) -> int:
        return int(self.bits.sum())

    def selected_indices(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.bits)]

    def verify(self, q: QuboInstance, tol: float = 1e-12) -> "SolveResult":
        """Recompute the energy on receipt; reject drifted artifacts."""
        actual = energy(q, self.bits)
        if abs(actual - self.energy) > tol:
            raise DegenerateInputError(
                f"reported energy {self.energy!r} differs from recomputed {actual!r}"
            )
        return replace(self, energy=actual)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "solve_result",
            "bits": [int(b) for b in self.bits],
            "energy": float(self.energy),
            "backend": self.backend,
            "seed": self.seed,
            "sweeps": int(self.sweeps),
            "restarts": int(self.restarts),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SolveResult":
        if d.get("kind") != "solve_result":
            raise DegenerateInputError(f"not a solve_result payload: kind={d.get('kind')!r}")
        return cls(
            bits=np.asarray(d["bits"], dtype=np.uint8),
            energy=float(d["energy"]),
            backend=str(d["backend"]),
            seed=None if d["seed"] is None else int(d["seed"]),
            sweeps=int(d["sweeps"]),
            restarts=int(d["restarts"]),
        )


def _lex_key(bits: np.ndarray) -> tuple:
    return tuple(int(b) for b in bits)


def solve_exhaustive(q: QuboInstance, max_n: int = EXHAUSTIVE_MAX_N) -> SolveResult:
    """Globally minimal energy by scanning all 2^n states."""
    if q.n > max_n:
        raise TooLargeError(f"n={q.n} exceeds the exhaustive cap of {max_n}")
    start = time.perf_counter()
    bits, _ = kernels.exhaustive_scan(q.linear, q.symmetric_quadratic())
    exact = energy(q, bits)
    return SolveResult(
        bits=bits,
        energy=exact,
        backend="exhaustive",
        seed=None,
        sweeps=0,
        restarts=0,
        wall_time=time.perf_counter() - start,
    )


def solve_sa(q: QuboInstance, schedule: AnnealSchedule | None = None) -> SolveResult:
    """Best state over independent Metropolis restarts.

    Each restart draws its start state and full proposal/uniform streams
    from a seed spawned off ``schedule.seed``, so runs are reproducible and
    restart r's chain does not depend on how many restarts follow it.
    """
    schedule = schedule or AnnealSchedule()
    start = time.perf_counter()
    n = q.n
    linear = q.linear
    qsym = q.symmetric_quadratic()
    betas = schedule.betas()
    best_bits = None
    best_key = None
    for child in np.random.SeedSequence(schedule.seed).spawn(schedule.restarts):
        rng = np.random.default_rng(child)
        bits0 = rng.integers(0, 2, size=n, dtype=np.uint8)
        flips = rng.integers(0, n, size=schedule.sweeps * n, dtype=np.int64)
        uniforms = rng.random(schedule.sweeps * n)
        fields0 = linear + qsym @ bits0
        energy0 = energy(q, bits0)
        chain_bits, _ = kernels.sa_chain(
            linear, qsym, bits0, fields0, energy0, flips, uniforms, betas
        )
        key = (energy(q, chain_bits), _lex_key(chain_bits))
        if best_key is None or key < best_key:
            best_key = key
            best_bits = chain_bits
    return SolveResult(
        bits=best_bits,
        energy=best_key[0],
        backend="sa",
        seed=schedule.seed,
        sweeps=schedule.sweeps,
        restarts=schedule.restarts,
        wall_time=time.perf_counter() - start,
    )


def _solve_backend_exhaustive(q: QuboInstance, params: dict) -> SolveResult:
    return solve_exhaustive(q, max_n=int(params.get("max_n", EXHAUSTIVE_MAX_N)))


def _schedule_from_params(params: dict) -> AnnealSchedule:
    return AnnealSchedule(
        sweeps=int(params.get("sweeps", 1000)),
        beta_start=float(params.get("beta_start", 0.1)),
        beta_end=float(params.get("beta_end", 10.0)),
        restarts=int(params.get("restarts", 8)),
        seed=int(params.get("seed", 0)),
    )


def _solve_backend_sa(q: QuboInstance, params: dict) -> SolveResult:
    return solve_sa(q, _schedule_from_params(params))


def _solve_backend_auto(q: QuboInstance, params: dict) -> SolveResult:
    cap = int(params.get("auto_cap", AUTO_EXHAUSTIVE_CAP))
    if q.n <= cap:
        return solve_exhaustive(q)
    return _solve_backend_sa(q, params)


def _solve_backend_stub(q: QuboInstance, params: dict) -> SolveResult:
    raise NotImplementedError(
        "remote annealer connectivity is a documented seam, not an implemented backend"
    )


BACKENDS = {
    "exhaustive": _solve_backend_exhaustive,
    "sa": _solve_backend_sa,
    "auto": _solve_backend_auto,
    "remote-annealer-stub": _solve_backend_stub,
}


def list_backends() -> list[str]:
    return sorted(BACKENDS)


def backend_solve(q: QuboInstance, backend: str, params: dict | None = None) -> SolveResult:
    """Dispatch to a registered backend with a key-value parameter map."""
    try:
        impl = BACKENDS[backend]
    except KeyError:
        raise UnknownBackendError(
            f"unknown backend {backend!r}, have {list_backends()}"
        ) from None
    return impl(q, dict(params or {}))
