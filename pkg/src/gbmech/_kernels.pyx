# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled enumeration kernels; see ``_kernels_py`` for the reference semantics.

Subsets are visited with a counter whose least significant digit is the
highest task index, so prefix folds over the low indices stay valid between
consecutive masks and only a short suffix is recomputed per step.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, sqrt, INFINITY

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

cdef enum:
    KIND_MAKESPAN = 0
    KIND_LP = 1
    KIND_SUM = 2

ctypedef unsigned long long u64


cdef inline bint _prefer(u64 a, u64 b) nogil:
    """a ranks before b: larger set first, then lexicographically smaller."""
    cdef int pa = __builtin_popcountll(a)
    cdef int pb = __builtin_popcountll(b)
    cdef u64 d, low
    if pa != pb:
        return pa > pb
    d = a ^ b
    if d == 0:
        return False
    low = d & (~d + 1)
    return (a & low) != 0


cdef inline double _pw(double x, double e) nogil:
    # exact shortcuts matching numpy's fast paths for these exponents
    if e == 1.0:
        return x
    if e == 2.0:
        return x * x
    if e == 0.5:
        return sqrt(x)
    return pow(x, e)


cdef inline bint _better(double v, double best, bint maximize) nogil:
    if maximize:
        return v > best
    return v < best


def star_best_lp(double[::1] r, double[::1] ell, double p, bint maximize=False,
                 int fix_bit=-1, int fix_val=0):
    cdef Py_ssize_t m = r.shape[0]
    cdef double[::1] lp = np.empty(m)
    cdef double[::1] rs = np.zeros(m + 1)
    cdef double[::1] cs = np.zeros(m + 1)
    cdef unsigned char[::1] bits = np.zeros(m, dtype=np.uint8)
    cdef Py_ssize_t j, t
    cdef u64 mask = 0, best_mask = 0
    cdef double v, best = 0.0, inv = 1.0 / p
    cdef bint have = False
    for j in range(m):
        lp[j] = _pw(ell[j], p)
    with nogil:
        for t in range(m):
            rs[t + 1] = rs[t]
            cs[t + 1] = cs[t] + lp[t]
        while True:
            # the root sum alone bounds a minimisation value from below
            if (fix_bit < 0 or ((mask >> fix_bit) & 1) == <u64>fix_val) and \
                    (maximize or not have or rs[m] <= best):
                v = rs[m] + _pw(cs[m], inv)
                if not have or _better(v, best, maximize) or (v == best and _prefer(mask, best_mask)):
                    best = v
                    best_mask = mask
                    have = True
            j = m - 1
            while j >= 0 and bits[j]:
                bits[j] = 0
                mask ^= (<u64>1) << j
                j -= 1
            if j < 0:
                break
            bits[j] = 1
            mask |= (<u64>1) << j
            for t in range(j, m):
                if bits[t]:
                    rs[t + 1] = rs[t] + r[t]
                    cs[t + 1] = cs[t]
                else:
                    rs[t + 1] = rs[t]
                    cs[t + 1] = cs[t] + lp[t]
    return int(best_mask), float(best)


def star_best_table(double[::1] r, double[::1] g, bint maximize=False,
                    int fix_bit=-1, int fix_val=0):
    cdef Py_ssize_t m = r.shape[0]
    cdef double[::1] rs = np.zeros(m + 1)
    cdef unsigned char[::1] bits = np.zeros(m, dtype=np.uint8)
    cdef Py_ssize_t j, t
    cdef u64 mask = 0, best_mask = 0
    cdef double v, best = 0.0
    cdef bint have = False
    if g.shape[0] != (<Py_ssize_t>1) << m:
        raise ValueError("offset table must have 2**m entries")
    with nogil:
        while True:
            if fix_bit < 0 or ((mask >> fix_bit) & 1) == <u64>fix_val:
                v = rs[m] + g[mask]
                if not have or _better(v, best, maximize) or (v == best and _prefer(mask, best_mask)):
                    best = v
                    best_mask = mask
                    have = True
            j = m - 1
            while j >= 0 and bits[j]:
                bits[j] = 0
                mask ^= (<u64>1) << j
                j -= 1
            if j < 0:
                break
            bits[j] = 1
            mask |= (<u64>1) << j
            for t in range(j, m):
                if bits[t]:
                    rs[t + 1] = rs[t] + r[t]
                else:
                    rs[t + 1] = rs[t]
    return int(best_mask), float(best)


def star_lp_leaf_threshold(double[::1] r_in, double[::1] ell_in, double p, int i,
                           double c, bint maximize=False):
    cdef Py_ssize_t m = r_in.shape[0]
    cdef double[::1] r = np.array(r_in, copy=True)
    cdef double[::1] lp = np.empty(m)
    cdef double[::1] rs = np.zeros(m + 1)
    cdef double[::1] cs = np.zeros(m + 1)
    cdef unsigned char[::1] bits = np.zeros(m, dtype=np.uint8)
    cdef Py_ssize_t j, t
    cdef u64 mask = 0
    cdef double gap, room, cand, inv = 1.0 / p
    cdef double best
    cdef bint found = False
    if c == INFINITY:
        return float("inf")
    r[i] = 0.0
    for j in range(m):
        lp[j] = 0.0 if j == i else _pw(ell_in[j], p)
    best = INFINITY if maximize else 0.0
    with nogil:
        for t in range(m):
            rs[t + 1] = rs[t]
            cs[t + 1] = cs[t] + lp[t]
        while True:
            if ((mask >> i) & 1) == 0:
                gap = c - rs[m]
                if maximize:
                    cand = 0.0
                    if gap > 0:
                        room = _pw(gap, p) - cs[m]
                        if room > 0:
                            cand = _pw(room, inv)
                    if cand < best:
                        best = cand
                elif rs[m] + _pw(cs[m], inv) < c:
                    room = _pw(gap if gap > 0 else 0.0, p) - cs[m]
                    cand = _pw(room if room > 0 else 0.0, inv)
                    if not found or cand > best:
                        best = cand
                        found = True
            j = m - 1
            while j >= 0 and bits[j]:
                bits[j] = 0
                mask ^= (<u64>1) << j
                j -= 1
            if j < 0:
                break
            bits[j] = 1
            mask |= (<u64>1) << j
            for t in range(j, m):
                if bits[t]:
                    rs[t + 1] = rs[t] + r[t]
                    cs[t + 1] = cs[t]
                else:
                    rs[t + 1] = rs[t]
                    cs[t + 1] = cs[t] + lp[t]
    return float(best)


def star_oracle(double[::1] r, double[::1] ell, int kind, double p=1.0, bint maximize=False):
    cdef Py_ssize_t m = r.shape[0]
    cdef double[::1] w = np.empty(m)
    cdef double[::1] rs = np.zeros(m + 1)
    cdef double[::1] cs = np.zeros(m + 1)
    cdef double[::1] cm = np.zeros(m + 1)
    cdef unsigned char[::1] bits = np.zeros(m, dtype=np.uint8)
    cdef Py_ssize_t j, t
    cdef u64 mask = 0, best_mask = 0
    cdef double v, best = 0.0, inv = 1.0 / p
    cdef bint have = False
    for j in range(m):
        w[j] = _pw(ell[j], p) if kind == KIND_LP else ell[j]
    with nogil:
        for t in range(m):
            rs[t + 1] = rs[t]
            cs[t + 1] = cs[t] + w[t]
            cm[t + 1] = cm[t] if cm[t] >= ell[t] else ell[t]
        while True:
            if kind == KIND_MAKESPAN:
                v = rs[m] if rs[m] >= cm[m] else cm[m]
            elif kind == KIND_SUM:
                v = rs[m] + cs[m]
            else:
                v = _pw(_pw(rs[m], p) + cs[m], inv)
            if not have or _better(v, best, maximize) or (v == best and mask < best_mask):
                best = v
                best_mask = mask
                have = True
            j = m - 1
            while j >= 0 and bits[j]:
                bits[j] = 0
                mask ^= (<u64>1) << j
                j -= 1
            if j < 0:
                break
            bits[j] = 1
            mask |= (<u64>1) << j
            for t in range(j, m):
                if bits[t]:
                    rs[t + 1] = rs[t] + r[t]
                    cs[t + 1] = cs[t]
                    cm[t + 1] = cm[t]
                else:
                    rs[t + 1] = rs[t]
                    cs[t + 1] = cs[t] + w[t]
                    cm[t + 1] = cm[t] if cm[t] >= ell[t] else ell[t]
    return int(best_mask), float(best)


def assign_oracle(opt_machine_in, opt_cost_in, n_opts_in, int n_machines, int kind,
                  double p=1.0, bint maximize=False):
    cdef long[:, ::1] opt_machine = np.ascontiguousarray(opt_machine_in, dtype=np.int_)
    cdef double[:, ::1] opt_cost = np.ascontiguousarray(opt_cost_in, dtype=float)
    cdef long[::1] n_opts = np.ascontiguousarray(n_opts_in, dtype=np.int_)
    cdef Py_ssize_t m = n_opts.shape[0]
    cdef Py_ssize_t n = n_machines
    # loads[j] holds machine loads after tasks 0..j-1
    cdef double[:, ::1] loads = np.zeros((m + 1, n))
    cdef long[::1] choice = np.zeros(m, dtype=np.int_)
    cdef long[::1] best_choice = np.zeros(m, dtype=np.int_)
    cdef Py_ssize_t j, t, i
    cdef long mach
    cdef double v, best = 0.0, inv = 1.0 / p, x
    cdef bint have = False
    with nogil:
        j = 0
        while True:
            # rebuild loads for tasks j..m-1 from the current choice
            for t in range(j, m):
                for i in range(n):
                    loads[t + 1, i] = loads[t, i]
                mach = opt_machine[t, choice[t]]
                loads[t + 1, mach] = loads[t, mach] + opt_cost[t, choice[t]]
            if kind == KIND_MAKESPAN:
                v = loads[m, 0]
                for i in range(1, n):
                    if loads[m, i] > v:
                        v = loads[m, i]
            elif kind == KIND_SUM:
                v = 0.0
                for i in range(n):
                    v = v + loads[m, i]
            else:
                x = 0.0
                for i in range(n):
                    x = x + _pw(loads[m, i], p)
                v = _pw(x, inv)
            if not have or _better(v, best, maximize):
                best = v
                have = True
                for t in range(m):
                    best_choice[t] = choice[t]
            j = m - 1
            while j >= 0 and choice[j] == n_opts[j] - 1:
                choice[j] = 0
                j -= 1
            if j < 0:
                break
            choice[j] += 1
    return np.asarray(best_choice, dtype=np.int64), float(best)
