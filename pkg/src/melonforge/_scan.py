"""Hot kernels for the exhaustive scan over permutation tuples.

A colored graph with matchings[0] fixed to the identity is a D-tuple of
permutations of range(k); the scan classifies every tuple by face count
(hence degree) and connectivity, and can also report which tuples are
melon-free as rooted graphs with root (black 0, color 0).

Everything reduces to table lookups precomputed per k:
  comp_inv[a, b]  index of perm_b^-1 o perm_a   (faces of a color pair)
  cycles[a]       cycle count of perm a
  pid[a]          orbit-partition id of perm a; connectivity is a fold of
                  partition joins reaching the one-block partition
  eq[a, b]        bitmask over positions where perms a and b agree, which
                  detects pairs of vertices joined by D parallel edges

Two interchangeable backends walk the tuple space: a numba kernel and a
vectorized numpy one.  MELONFORGE_BACKEND=numba|numpy|auto picks one; auto
prefers numba when it imports.
"""

from __future__ import annotations

import itertools
import os
from math import factorial

import numpy as np

COLLECT_NONE = 0
COLLECT_MELON_FREE = 1
COLLECT_CONNECTED = 2


def _all_partitions(k: int):
    """All set partitions of range(k) as restricted-growth strings."""
    parts = []

    def rec(prefix, mx):
        if len(prefix) == k:
            parts.append(tuple(prefix))
            return
        for b in range(mx + 2):
            rec(prefix + [b], max(mx, b))

    rec([0], 0) if k else parts.append(())
    return parts


def _rgs_of_blocks(assign):
    """Normalize a block assignment to a restricted-growth string."""
    relabel = {}
    out = []
    for b in assign:
        if b not in relabel:
            relabel[b] = len(relabel)
        out.append(relabel[b])
    return tuple(out)


class ScanTables:
    """Per-k lookup tables shared by both scan backends."""

    def __init__(self, k: int):
        self.k = k
        perms = list(itertools.permutations(range(k)))
        self.perms = perms
        n = len(perms)
        self.n = n
        index = {p: i for i, p in enumerate(perms)}
        if perms[0] != tuple(range(k)):
            raise AssertionError("identity must come first")

        inv = []
        for p in perms:
            q = [0] * k
            for i, v in enumerate(p):
                q[v] = i
            inv.append(tuple(q))

        self.comp_inv = np.empty((n, n), dtype=np.int32)
        for b, q in enumerate(inv):
            for a, p in enumerate(perms):
                self.comp_inv[a, b] = index[tuple(q[x] for x in p)]

        self.cycles = np.empty(n, dtype=np.int64)
        pid_list = []
        partition_index = {rgs: i for i, rgs in enumerate(_all_partitions(k))}
        self.n_partitions = len(partition_index)
        for a, p in enumerate(perms):
            seen = [False] * k
            blocks = [0] * k
            ncyc = 0
            for s in range(k):
                if seen[s]:
                    continue
                v = s
                while not seen[v]:
                    seen[v] = True
                    blocks[v] = ncyc
                    v = p[v]
                ncyc += 1
            self.cycles[a] = ncyc
            pid_list.append(partition_index[_rgs_of_blocks(blocks)])
        self.pid = np.array(pid_list, dtype=np.int32)

        self.eq = np.empty((n, n), dtype=np.int64)
        for a, p in enumerate(perms):
            for b, q in enumerate(perms):
                m = 0
                for i in range(k):
                    if p[i] == q[i]:
                        m |= 1 << i
                self.eq[a, b] = m

        rgs_list = list(partition_index)
        P = len(rgs_list)
        self.join = np.empty((P, P), dtype=np.int32)
        for i, r1 in enumerate(rgs_list):
            for j, r2 in enumerate(rgs_list):
                if j < i:
                    self.join[i, j] = self.join[j, i]
                    continue
                parent = list(range(k))

                def find(x):
                    while parent[x] != x:
                        parent[x] = parent[parent[x]]
                        x = parent[x]
                    return x

                for rgs in (r1, r2):
                    first = {}
                    for pos, blk in enumerate(rgs):
                        if blk in first:
                            ra, rb = find(first[blk]), find(pos)
                            if ra != rb:
                                parent[ra] = rb
                        else:
                            first[blk] = pos
                self.join[i, j] = partition_index[
                    _rgs_of_blocks([find(x) for x in range(k)])]
        self.full_pid = partition_index[tuple([0] * k)]
        self.identity_pid = int(self.pid[0])


_TABLE_CACHE: dict[int, ScanTables] = {}


def tables_for(k: int) -> ScanTables:
    if k not in _TABLE_CACHE:
        _TABLE_CACHE[k] = ScanTables(k)
    return _TABLE_CACHE[k]


# -- backend selection ---------------------------------------------------------------

def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
        return True
    except Exception:
        return False


def active_backend() -> str:
    """Resolve MELONFORGE_BACKEND (numba | numpy | auto) to a concrete backend."""
    choice = os.environ.get("MELONFORGE_BACKEND", "auto").lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        return "numba"
    return "numba" if _numba_available() else "numpy"


# -- numba backend -------------------------------------------------------------------

_NUMBA_KERNEL = None


def _get_numba_kernel():
    global _NUMBA_KERNEL
    if _NUMBA_KERNEL is not None:
        return _NUMBA_KERNEL
    from numba import njit

    @njit(cache=True, nogil=True)
    def kernel(D, k, n, comp_inv, cycles, pid, join, full_pid, eq,
               start1, stop1, collect, target_faces, hist, out_idx):
        digits = np.zeros(D, dtype=np.int64)
        digits[0] = start1
        full_mask = (np.int64(1) << k) - 1
        n_out = 0
        if start1 >= stop1:
            return 0
        while True:
            # face count and connectivity for the current tuple
            faces = 0
            pcur = -1
            for a in range(D):
                sa = digits[a]
                faces += cycles[sa]                    # pair (0, a+1)
                if pcur < 0:
                    pcur = pid[sa]
                else:
                    pcur = join[pcur, pid[sa]]
                for b in range(a + 1, D):
                    faces += cycles[comp_inv[sa, digits[b]]]
            connected = pcur == full_pid
            if connected:
                hist[faces] += 1
                if collect != 0 and (target_faces < 0 or faces == target_faces):
                    keep = True
                    if collect == 1:
                        # melon filter: a violation is a pair sharing exactly
                        # D parallels whose external color setup beats the root
                        for c_out in range(D + 1):
                            pivot = 1 if c_out == 0 else 0
                            s_piv = 0 if pivot == 0 else digits[pivot - 1]
                            mask = full_mask
                            for m in range(D + 1):
                                if m == c_out or m == pivot:
                                    continue
                                sm = 0 if m == 0 else digits[m - 1]
                                mask &= eq[s_piv, sm]
                            if c_out != 0:
                                mask &= ~np.int64(1)
                            if mask != 0:
                                keep = False
                                break
                    if keep:
                        flat = np.int64(0)
                        for a in range(D - 1, -1, -1):
                            flat = flat * n + digits[a]
                        out_idx[n_out] = flat
                        n_out += 1
            # odometer
            level = D - 1
            while level >= 0:
                digits[level] += 1
                limit = stop1 if level == 0 else n
                if digits[level] < limit:
                    break
                digits[level] = 0
                level -= 1
            if level < 0:
                break
        return n_out

    _NUMBA_KERNEL = kernel
    return kernel


def _scan_numba(D, k, t: ScanTables, start1, stop1, collect, cap, target_faces):
    hist = np.zeros(_hist_len(D, k), dtype=np.int64)
    out = np.empty(cap, dtype=np.int64)
    kernel = _get_numba_kernel()
    n_out = kernel(D, k, t.n, t.comp_inv, t.cycles, t.pid, t.join,
                   t.full_pid, t.eq, start1, stop1, collect, target_faces,
                   hist, out)
    return hist, np.sort(out[:n_out])


# -- numpy backend -------------------------------------------------------------------

def _hist_len(D, k):
    return (D + 1) * D // 2 * k + 2


def _scan_numpy(D, k, t: ScanTables, start1, stop1, collect, cap, target_faces):
    n = t.n
    hist = np.zeros(_hist_len(D, k), dtype=np.int64)
    found: list[np.ndarray] = []
    all_pid = t.pid
    all_cycles = t.cycles
    weights = [n ** a for a in range(D)]

    for fixed in itertools.product(range(start1, stop1),
                                   *[range(n)] * (D - 2)):
        # colors: 0 -> identity, 1..D-1 -> fixed digits, D -> vectorized
        s = (0,) + fixed
        const = 0
        pcur = t.identity_pid
        for a in range(1, D):
            const += all_cycles[s[a]]
            pcur = t.join[pcur, all_pid[s[a]]]
            for b in range(a + 1, D):
                const += all_cycles[t.comp_inv[s[a], s[b]]]
        faces = const + all_cycles  # pair (0, D) term, vector over the last digit
        for a in range(1, D):
            faces = faces + all_cycles[t.comp_inv[s[a]]]
        conn = t.join[pcur][all_pid] == t.full_pid

        hist += np.bincount(faces[conn], minlength=len(hist))

        if collect == COLLECT_NONE or not conn.any():
            continue
        if collect == COLLECT_CONNECTED:
            keep = conn.copy()
        else:
            viol = np.zeros(n, dtype=bool)
            full_mask = (1 << k) - 1
            for c_out in range(D + 1):
                subset = [m for m in range(D + 1) if m != c_out]
                pivot = subset[0]
                s_piv = 0 if pivot == 0 else s[pivot]
                mask = np.full(n, full_mask, dtype=np.int64)
                for m in subset[1:]:
                    if m == D:
                        mask &= t.eq[s_piv]
                    else:
                        sm = 0 if m == 0 else s[m]
                        mask &= t.eq[s_piv, sm]
                if c_out != 0:
                    mask = mask & ~np.int64(1)
                viol |= mask != 0
            keep = conn & ~viol
        if target_faces >= 0:
            keep &= faces == target_faces
        idx = np.nonzero(keep)[0]
        if idx.size:
            base = sum(w * d for w, d in zip(weights, fixed))
            found.append(base + idx * weights[D - 1])

    if found:
        out = np.sort(np.concatenate(found))
    else:
        out = np.empty(0, dtype=np.int64)
    if out.size > cap:
        raise AssertionError("collection cap exceeded")
    return hist, out


# -- public entry --------------------------------------------------------------------

def scan(D: int, k: int, collect: int = COLLECT_NONE,
         start1: int | None = None, stop1: int | None = None,
         backend: str | None = None, cap: int | None = None,
         target_faces: int = -1):
    """Scan tuples with matchings[0] = identity and first digit in [start1, stop1).

    Returns (histogram over total face count of connected tuples, sorted flat
    indices of the collected tuples).  With ``target_faces`` >= 0 only tuples
    with that exact face count are collected (the histogram stays complete).
    """
    t = tables_for(k)
    start1 = 0 if start1 is None else start1
    stop1 = t.n if stop1 is None else stop1
    if cap is None:
        cap = t.n ** (D - 1) * max(1, stop1 - start1) if collect else 1
    backend = backend or active_backend()
    if backend == "numba":
        return _scan_numba(D, k, t, start1, stop1, collect, cap, target_faces)
    return _scan_numpy(D, k, t, start1, stop1, collect, cap, target_faces)


def decode_tuple(flat: int, D: int, k: int) -> list[tuple[int, ...]]:
    """Matchings (identity first) for a flat tuple index."""
    t = tables_for(k)
    digits = []
    x = int(flat)
    for _ in range(D):
        digits.append(x % t.n)
        x //= t.n
    return [tuple(range(k))] + [t.perms[d] for d in digits]


def state_count(D: int, k: int) -> int:
    return factorial(k) ** D
