# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Metropolis sweeps and exhaustive Gray-code scans.

Mirrors _fallback.py operation-for-operation so both implementations
produce identical trajectories from identical random streams.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

IMPL = "native"


cdef inline bint _lex_less(unsigned char* a, unsigned char* b, Py_ssize_t n) nogil:
    cdef Py_ssize_t i
    for i in range(n):
        if a[i] != b[i]:
            return a[i] < b[i]
    return False


cdef inline double _exact_energy(const double[::1] linear, const double[:, ::1] qsym,
                                 unsigned char* bits, Py_ssize_t n) nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i, k
    for i in range(n):
        if bits[i] != 0:
            acc = acc + linear[i]
            for k in range(i + 1, n):
                if bits[k] != 0:
                    acc = acc + qsym[i, k]
    return acc


# Accumulated energies that land this close to the incumbent are re-evaluated
# exactly before comparing, so drift cannot corrupt tie-breaking.
cdef double NEAR_TIE = 1e-9


def sa_chain(const double[::1] linear, const double[:, ::1] qsym,
             const unsigned char[::1] bits0, const double[::1] fields0, double energy0,
             const cnp.int64_t[::1] flips, const double[::1] uniforms, const double[::1] betas):
    """One Metropolis chain; see _fallback.sa_chain for the contract."""
    cdef Py_ssize_t n = linear.shape[0]
    cdef Py_ssize_t n_sweeps = betas.shape[0]
    bits_np = np.empty(n, dtype=np.uint8)
    best_np = np.empty(n, dtype=np.uint8)
    fields_np = np.empty(n, dtype=np.float64)
    cdef unsigned char[::1] bits = bits_np
    cdef unsigned char[::1] best = best_np
    cdef double[::1] fields = fields_np
    cdef Py_ssize_t i, j, s, p
    cdef Py_ssize_t t = 0
    cdef double energy = energy0
    cdef double best_energy = energy0
    cdef double beta, delta, f
    cdef bint better
    for i in range(n):
        bits[i] = bits0[i]
        best[i] = bits0[i]
        fields[i] = fields0[i]
    with nogil:
        for s in range(n_sweeps):
            beta = betas[s]
            for p in range(n):
                j = flips[t]
                f = fields[j]
                if bits[j] == 0:
                    delta = f
                else:
                    delta = -f
                if delta <= 0.0 or uniforms[t] < exp(-beta * delta):
                    if bits[j] == 0:
                        bits[j] = 1
                        for i in range(n):
                            fields[i] = fields[i] + qsym[i, j]
                    else:
                        bits[j] = 0
                        for i in range(n):
                            fields[i] = fields[i] - qsym[i, j]
                    energy = energy + delta
                    better = energy < best_energy
                    if (not better) and energy == best_energy:
                        better = _lex_less(&bits[0], &best[0], n)
                    if better:
                        best_energy = energy
                        for i in range(n):
                            best[i] = bits[i]
                t += 1
    return best_np, best_energy


def exhaustive_scan(const double[::1] linear, const double[:, ::1] qsym):
    """Gray-code walk over all 2^n states with incremental energy updates.

    The accumulated energy is resynced against an exact evaluation every
    4096 steps, and any candidate within NEAR_TIE of the incumbent is
    compared on exactly recomputed energies, so accumulation drift cannot
    corrupt the ordering. Ties go to the lexicographically smaller bit
    vector (index 0 most significant).
    """
    cdef Py_ssize_t n = linear.shape[0]
    bits_np = np.zeros(n, dtype=np.uint8)
    best_np = np.zeros(n, dtype=np.uint8)
    fields_np = np.empty(n, dtype=np.float64)
    cdef unsigned char[::1] bits = bits_np
    cdef unsigned char[::1] best = best_np
    cdef double[::1] fields = fields_np
    cdef Py_ssize_t i, j, k
    cdef unsigned long long step, total
    cdef double energy = 0.0
    cdef double best_energy = 0.0
    cdef double delta, acc, cand_exact, incumbent_exact, new_best_energy
    cdef bint better
    for i in range(n):
        fields[i] = linear[i]
    total = (<unsigned long long>1) << n
    with nogil:
        for step in range(1, total):
            j = 0
            while ((step >> j) & 1) == 0:
                j += 1
            if bits[j] == 0:
                delta = fields[j]
                bits[j] = 1
                for i in range(n):
                    fields[i] = fields[i] + qsym[i, j]
            else:
                delta = -fields[j]
                bits[j] = 0
                for i in range(n):
                    fields[i] = fields[i] - qsym[i, j]
            energy = energy + delta
            if (step & 0xFFF) == 0:
                # Exact resync of the accumulated state.
                energy = _exact_energy(linear, qsym, &bits[0], n)
                for i in range(n):
                    acc = linear[i]
                    for k in range(n):
                        if bits[k] != 0:
                            acc = acc + qsym[i, k]
                    fields[i] = acc
            if energy < best_energy - NEAR_TIE:
                better = True
                new_best_energy = energy
            elif energy <= best_energy + NEAR_TIE:
                cand_exact = _exact_energy(linear, qsym, &bits[0], n)
                incumbent_exact = _exact_energy(linear, qsym, &best[0], n)
                if cand_exact < incumbent_exact:
                    better = True
                elif cand_exact == incumbent_exact:
                    better = _lex_less(&bits[0], &best[0], n)
                else:
                    better = False
                new_best_energy = cand_exact
            else:
                better = False
            if better:
                best_energy = new_best_energy
                for i in range(n):
                    best[i] = bits[i]
    return best_np, best_energy
