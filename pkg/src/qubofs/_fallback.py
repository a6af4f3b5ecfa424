"""Pure-Python/numpy kernels, used when the compiled extension is absent.

Both implementations consume identical pregenerated random streams and
apply IEEE-754 operations in the same order, so a chain run here and a
chain run in the compiled module visit the same states.
"""

from __future__ import annotations

import math

import numpy as np

IMPL = "fallback"


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    # First differing position decides; index 0 is the most significant bit.
    diff = np.flatnonzero(a != b)
    return diff.size > 0 and a[diff[0]] < b[diff[0]]


def sa_chain(linear, qsym, bits0, fields0, energy0, flips, uniforms, betas):
    """One Metropolis chain over single-bit flips.

    ``fields0`` must hold the local fields of ``bits0`` and ``energy0`` its
    energy; step t proposes flipping ``flips[t]`` against ``uniforms[t]``
    at inverse temperature ``betas[t // n]``. Returns the best-seen bit
    vector (ties to the lexicographically smaller one) and its accumulated
    energy.
    """
    n = int(linear.shape[0])
    bits = np.array(bits0, dtype=np.uint8, copy=True)
    fields = np.array(fields0, dtype=np.float64, copy=True)
    best_bits = bits.copy()
    energy = float(energy0)
    best_energy = energy
    flip_list = np.asarray(flips).tolist()
    uniform_list = np.asarray(uniforms).tolist()
    beta_list = np.asarray(betas).tolist()
    t = 0
    for beta in beta_list:
        for _ in range(n):
            j = flip_list[t]
            f = float(fields[j])
            delta = f if bits[j] == 0 else -f
            if delta <= 0.0 or uniform_list[t] < math.exp(-beta * delta):
                if bits[j] == 0:
                    bits[j] = 1
                    fields += qsym[j]
                else:
                    bits[j] = 0
                    fields -= qsym[j]
                energy += delta
                better = energy < best_energy
                if not better and energy == best_energy:
                    better = _lex_less(bits, best_bits)
                if better:
                    best_energy = energy
                    best_bits[:] = bits
            t += 1
    return best_bits, best_energy


def exhaustive_scan(linear, qsym):
    """Scan all 2^n bit vectors; return the lexicographically smallest
    minimizer (index 0 most significant) and its energy.

    Enumerates codes in lexicographic order in chunks, so the first
    minimum found is the canonical tie-break winner.
    """
    n = int(linear.shape[0])
    upper = np.triu(qsym, k=1)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    total = 1 << n
    chunk = 1 << 16
    best_energy = math.inf
    best_code = 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        B = ((codes[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.float64)
        energies = B @ linear + np.einsum("ij,ij->i", B @ upper, B)
        idx = int(np.argmin(energies))
        if energies[idx] < best_energy:
            best_energy = float(energies[idx])
            best_code = int(codes[idx])
    bits = np.fromiter(
        ((best_code >> (n - 1 - j)) & 1 for j in range(n)), dtype=np.uint8, count=n
    )
    return bits, best_energy
