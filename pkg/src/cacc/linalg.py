"""Matrix rank over prime fields.

For an integer matrix the rank modulo any prime is at most its rational rank,
so the maximum over several primes is a sound lower bound.
"""

from __future__ import annotations

from typing import Iterable

import numba
import numpy as np

from .errors import InvalidInput


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def rank_gf2(a: np.ndarray) -> int:
    """Rank over GF(2) by elimination on bit-packed rows."""
    a = np.asarray(a)
    if a.size == 0:
        return 0
    rows = np.packbits(a.astype(bool), axis=1)
    pad = (-rows.shape[1]) % 8
    if pad:
        rows = np.concatenate([rows, np.zeros((rows.shape[0], pad), np.uint8)], axis=1)
    rows = np.ascontiguousarray(rows).view(">u8").astype(np.uint64)
    n_cols = a.shape[1]
    rank = 0
    for col in range(n_cols):
        word, bit = divmod(col, 64)
        mask = np.uint64(1 << (63 - bit))
        live = rows[rank:]
        hits = np.flatnonzero(live[:, word] & mask)
        if hits.size == 0:
            continue
        pivot = rank + hits[0]
        if pivot != rank:
            rows[[rank, pivot]] = rows[[pivot, rank]]
        below = rank + 1 + np.flatnonzero(rows[rank + 1:, word] & mask)
        rows[below] ^= rows[rank]
        rank += 1
        if rank == rows.shape[0]:
            break
    return rank


def rank_mod_p(a: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over GF(p)."""
    if not _is_prime(int(p)):
        raise InvalidInput(f"{p} is not a prime >= 2")
    p = int(p)
    if p == 2:
        return rank_gf2(np.asarray(a) % 2)
    m = np.ascontiguousarray(np.asarray(a, dtype=np.int64) % p)
    return int(_eliminate_mod_p(m, p))


@numba.njit(cache=True)
def _eliminate_mod_p(m, p):
    n_rows, n_cols = m.shape
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = -1
        for r in range(rank, n_rows):
            if m[r, col] != 0:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for c in range(col, n_cols):
                m[rank, c], m[pivot, c] = m[pivot, c], m[rank, c]
        # inverse by Fermat
        inv, base, e = 1, m[rank, col], p - 2
        while e:
            if e & 1:
                inv = inv * base % p
            base = base * base % p
            e >>= 1
        for c in range(col, n_cols):
            m[rank, c] = m[rank, c] * inv % p
        for r in range(rank + 1, n_rows):
            f = m[r, col]
            if f != 0:
                for c in range(col, n_cols):
                    m[r, c] = (m[r, c] - f * m[rank, c]) % p
        rank += 1
    return rank


def ranks_mod_primes(a: np.ndarray, primes: Iterable[int]) -> dict[int, int]:
    primes = list(primes)
    if not primes:
        raise InvalidInput("need at least one prime")
    return {int(p): rank_mod_p(a, p) for p in primes}
