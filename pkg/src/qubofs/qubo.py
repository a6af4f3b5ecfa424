"""QUBO objective construction and energy evaluation.

The objective for selection weight alpha is

    E(b) = -alpha * sum_i I_i b_i + (1 - alpha) * sum_{i != j} R_ij b_i b_j

over bit vectors b. The ordered double sum visits each unordered pair
twice, so the stored upper-triangular coefficient for i < j is the
consolidated two-term sum; energies are preserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AlphaOutOfRangeError,
    LengthMismatchError,
    NonBinaryEntryError,
    NonFiniteInputError,
)
from .stats import SCHEMA_VERSION, ScoreSet


@dataclass(frozen=True)
class Provenance:
    """Where an instance's coefficients came from."""

    measure: str
    score_hash: str


@dataclass(frozen=True)
class QuboInstance:
    """Immutable QUBO: linear vector plus strictly upper-triangular matrix."""

    n: int
    linear: np.ndarray
    quadratic: np.ndarray
    alpha: float
    provenance: Provenance | None = None

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise AlphaOutOfRangeError(f"alpha must be in [0, 1], got {self.alpha!r}")
        linear = np.ascontiguousarray(self.linear, dtype=np.float64)
        quadratic = np.ascontiguousarray(self.quadratic, dtype=np.float64)
        linear.setflags(write=False)
        quadratic.setflags(write=False)
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "quadratic", quadratic)
        if linear.shape != (self.n,) or quadratic.shape != (self.n, self.n):
            raise LengthMismatchError("coefficient shapes do not match n")
        if not (np.all(np.isfinite(linear)) and np.all(np.isfinite(quadratic))):
            raise NonFiniteInputError("coefficients must be finite")
        if np.any(np.tril(quadratic) != 0.0):
            raise NonFiniteInputError("quadratic matrix must be strictly upper-triangular")

    def symmetric_quadratic(self) -> np.ndarray:
        """Full symmetric pair matrix (used by the solvers' local fields)."""
        return self.quadratic + self.quadratic.T

    def energy(self, b) -> float:
        return energy(self, b)

    # -------------------------------------------------------- serialization

    def to_json_dict(self) -> dict:
        iu, ju = np.nonzero(self.quadratic)
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "qubo",
            "n": int(self.n),
            "alpha": float(self.alpha),
            "linear": [float(v) for v in self.linear],
            "quadratic": [
                [int(i), int(j), float(self.quadratic[i, j])] for i, j in zip(iu, ju)
            ],
            "provenance": None
            if self.provenance is None
            else {"measure": self.provenance.measure, "score_hash": self.provenance.score_hash},
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "QuboInstance":
        if d.get("kind") != "qubo":
            raise NonFiniteInputError(f"not a qubo payload: kind={d.get('kind')!r}")
        n = int(d["n"])
        quadratic = np.zeros((n, n), dtype=np.float64)
        for i, j, coeff in d["quadratic"]:
            quadratic[int(i), int(j)] = float(coeff)
        prov = d.get("provenance")
        return cls(
            n=n,
            linear=np.asarray(d["linear"], dtype=np.float64),
            quadratic=quadratic,
            alpha=float(d["alpha"]),
            provenance=None if prov is None else Provenance(prov["measure"], prov["score_hash"]),
        )

    def to_sparse_text(self) -> str:
        """Sparse exchange form: one `i j coeff` row per nonzero, with the
        diagonal (i == i) rows holding linear terms. Header comments carry
        n and alpha so all-zero instances stay reconstructible."""
        lines = ["# qubo sparse form: `i j coeff`, diagonal rows are linear terms"]
        lines.append(f"# n {self.n}")
        lines.append(f"# alpha {self.alpha!r}")
        if self.provenance is not None:
            lines.append(f"# measure {self.provenance.measure}")
            lines.append(f"# score_hash {self.provenance.score_hash}")
        for i in range(self.n):
            if self.linear[i] != 0.0:
                lines.append(f"{i} {i} {float(self.linear[i])!r}")
        for i, j in zip(*np.nonzero(self.quadratic)):
            lines.append(f"{i} {j} {float(self.quadratic[i, j])!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_sparse_text(cls, text: str) -> "QuboInstance":
        n = None
        alpha = None
        measure = None
        score_hash = None
        entries = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                fields = line[1:].split()
                if len(fields) >= 2 and fields[0] == "n":
                    n = int(fields[1])
                elif len(fields) >= 2 and fields[0] == "alpha":
                    alpha = float(fields[1])
                elif len(fields) >= 2 and fields[0] == "measure":
                    measure = fields[1]
                elif len(fields) >= 2 and fields[0] == "score_hash":
                    score_hash = fields[1]
                continue
            fields = line.split()
            if len(fields) != 3:
                raise NonFiniteInputError(f"bad sparse row: {raw!r}")
            entries.append((int(fields[0]), int(fields[1]), float(fields[2])))
        if n is None or alpha is None:
            raise NonFiniteInputError("sparse text is missing the `# n` or `# alpha` header")
        linear = np.zeros(n, dtype=np.float64)
        quadratic = np.zeros((n, n), dtype=np.float64)
        for i, j, coeff in entries:
            if not (0 <= i < n and 0 <= j < n):
                raise LengthMismatchError(f"index ({i}, {j}) out of range for n={n}")
            if i == j:
                linear[i] += coeff
            else:
                lo, hi = (i, j) if i < j else (j, i)
                quadratic[lo, hi] += coeff
        prov = None
        if measure is not None and score_hash is not None:
            prov = Provenance(measure, score_hash)
        return cls(n=n, linear=linear, quadratic=quadratic, alpha=alpha, provenance=prov)


def build_qubo(scores: ScoreSet, alpha: float) -> QuboInstance:
    """Instantiate the objective for one alpha from a ScoreSet."""
    if not (0.0 <= alpha <= 1.0):
        raise AlphaOutOfRangeError(f"alpha must be in [0, 1], got {alpha!r}")
    n = scores.n_features
    # `+ 0.0` normalizes -0.0 coefficients at the alpha endpoints.
    linear = -(alpha * scores.importance) + 0.0
    quadratic = np.triu((1.0 - alpha) * (scores.redundancy + scores.redundancy.T), k=1) + 0.0
    return QuboInstance(
        n=n,
        linear=linear,
        quadratic=quadratic,
        alpha=float(alpha),
        provenance=Provenance(measure=scores.measure.value, score_hash=scores.content_hash()),
    )


def check_bits(b, n: int) -> np.ndarray:
    """Validate and canonicalize a bit vector to uint8 {0, 1}."""
    arr = np.asarray(b)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise LengthMismatchError(f"bit vector length {arr.shape} does not match n={n}")
    values = arr.astype(np.float64)
    if np.any((values != 0.0) & (values != 1.0)):
        raise NonBinaryEntryError("bit vector entries must be 0 or 1")
    return arr.astype(np.uint8)


def energy(q: QuboInstance, b) -> float:
    """E(b) = sum_i linear[i] b_i + sum_{i<j} quadratic[i][j] b_i b_j."""
    bits = check_bits(b, q.n).astype(np.float64)
    return float(q.linear @ bits + bits @ q.quadratic @ bits)
