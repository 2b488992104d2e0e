"""Compiled GF(2) kernels over bit-packed rows.

Rows are ``uint64`` arrays. Symplectic rows put the x block in words
``[0, w)`` and the z block in words ``[w, 2w)``; any trailing words are
carried along untouched (used for combination tracking).
"""

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def popcount64(v):
    v = v - ((v >> np.uint64(1)) & _M1)
    v = (v & _M2) + ((v >> np.uint64(2)) & _M2)
    v = (v + (v >> np.uint64(4))) & _M4
    return np.int64((v * _H01) >> np.uint64(56))


@njit(cache=True)
def rref_inplace(mat, w, pivot_words, exps, track_phase):
    """Reduce ``mat`` to reduced row-echelon form; return pivot bit-columns.

    Pivots are searched in the first ``pivot_words`` words, column by column.
    When ``track_phase`` is set, ``exps`` (power of i for each row in the
    X-then-Z ordered form) follows the row products exactly.
    """
    rows, cols = mat.shape
    pivots = np.empty(min(rows, pivot_words * 64), np.int64)
    r = 0
    for wc in range(pivot_words):
        for b in range(64):
            if r == rows:
                return pivots[:r]
            mask = np.uint64(1) << np.uint64(b)
            p = -1
            for i in range(r, rows):
                if mat[i, wc] & mask:
                    p = i
                    break
            if p < 0:
                continue
            if p != r:
                for k in range(cols):
                    t = mat[p, k]
                    mat[p, k] = mat[r, k]
                    mat[r, k] = t
                t2 = exps[p]
                exps[p] = exps[r]
                exps[r] = t2
            for i in range(rows):
                if i != r and (mat[i, wc] & mask):
                    if track_phase:
                        s = 0
                        for k in range(w):
                            s += popcount64(mat[i, w + k] & mat[r, k])
                        exps[i] = (exps[i] + exps[r] + 2 * s) % 4
                    for k in range(cols):
                        mat[i, k] ^= mat[r, k]
            pivots[r] = wc * 64 + b
            r += 1
    return pivots[:r]


@njit(cache=True, nogil=True)
def erasure_sequence(vecs, order, syn_words, k, stop_all, out_sub, out_alg, lost):
    """Insert erased qubits one at a time and record logical losses.

    ``vecs[q, 0]`` and ``vecs[q, 1]`` are the packed syndromes of X_q and
    Z_q against all generators, followed by 2k logical commutation bits
    starting at bit ``syn_words * 64``. After inserting the first m+1
    qubits of ``order``, ``out_sub[m]`` is 1 when every logical qubit keeps
    its whole algebra, and ``out_alg[m]`` is 1 when every logical qubit
    keeps X-bar or Z-bar. ``lost`` (length 2k, zeroed here) ends with
    ``lost[i]`` set when X-bar_i is gone and ``lost[k+i]`` when Z-bar_i is.
    Returns the number of qubits inserted (the insertion stops early once
    every logical is gone when ``stop_all``).
    """
    nq = order.shape[0]
    words = vecs.shape[2]
    cap = min(2 * nq, syn_words * 64) + 1
    basis = np.zeros((cap, words), np.uint64)
    piv_word = np.zeros(cap, np.int64)
    piv_mask = np.zeros(cap, np.uint64)
    nb = 0
    for i in range(2 * k):
        lost[i] = 0
    v = np.empty(words, np.uint64)
    lbase = syn_words * 64
    for m in range(nq):
        q = order[m]
        for t in range(2):
            for j in range(words):
                v[j] = vecs[q, t, j]
            # full RREF basis: coefficient of row r is v at its pivot
            for r in range(nb):
                if vecs[q, t, piv_word[r]] & piv_mask[r]:
                    for j in range(words):
                        v[j] ^= basis[r, j]
            pw = -1
            for j in range(syn_words):
                if v[j] != 0:
                    pw = j
                    break
            if pw < 0:
                for i in range(2 * k):
                    bit = lbase + i
                    if (v[bit >> 6] >> np.uint64(bit & 63)) & np.uint64(1):
                        lost[i] = 1
                continue
            low = v[pw] & (~v[pw] + np.uint64(1))
            for r in range(nb):
                if basis[r, pw] & low:
                    for j in range(words):
                        basis[r, j] ^= v[j]
            for j in range(words):
                basis[nb, j] = v[j]
            piv_word[nb] = pw
            piv_mask[nb] = low
            nb += 1
        sub_ok = 1
        alg_ok = 1
        none_left = 1
        for i in range(k):
            # lost[i] : some logical on E anticommutes with X-bar_i
            # lost[k+i]: some logical on E anticommutes with Z-bar_i
            x_gone = lost[i]
            z_gone = lost[k + i]
            if x_gone or z_gone:
                sub_ok = 0
            if x_gone and z_gone:
                alg_ok = 0
            else:
                none_left = 0
        out_sub[m] = sub_ok
        out_alg[m] = alg_ok
        if stop_all and none_left:
            for j in range(m + 1, nq):
                out_sub[j] = 0
                out_alg[j] = 0
            return m + 1
    return nq
