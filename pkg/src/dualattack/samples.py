"""LPN sample construction.

A sample pair is a dual word h with light N-projection together with an
auxiliary codeword c_aux close to h_P.  The auxiliary code is decoded at
exact radius t_aux through a precomputed syndrome table.
"""

import itertools
import struct
from math import comb

import numpy as np

from ._kernels import gray_low_weight, pack_rows, unpack_rows
from .codes import (LinearCode, Partition, as_bits, gf2_matmul, random_code,
                    systematic_form)
from .errors import BudgetExceeded, DomainError

SINGLE = "single-random"
PRODUCT = "product-of-blocks"


def _syndrome_key(bits):
    key = 0
    for i, b in enumerate(bits):
        if b:
            key |= 1 << i
    return key


def build_syndrome_table(code, t_aux, max_patterns=10**7):
    """Bucket every weight-t_aux error pattern by its syndrome.

    Keys are syndrome integers (bit i of the key is syndrome coordinate i),
    values are (m, n) uint8 arrays in lexicographic support order."""
    n = code.n
    if comb(n, t_aux) > max_patterns:
        raise BudgetExceeded("too many weight-%d patterns" % t_aux)
    buckets = {}
    for support in itertools.combinations(range(n), t_aux):
        e = np.zeros(n, np.uint8)
        e[list(support)] = 1
        key = _syndrome_key(code.syndrome(e))
        buckets.setdefault(key, []).append(e)
    return {k: np.array(v, np.uint8) for k, v in buckets.items()}


class AuxCode:
    """An [s, k_aux] code dedicated to re-encoding the P-side.

    structure is "single-random" or "product-of-blocks"; the product form
    concatenates b independent [s/b, k_aux/b] codes and decodes each block
    at radius t_aux/b.
    """

    def __init__(self, s, k_aux, t_aux, code, structure=SINGLE, blocks=None):
        if code.n != s or code.k != k_aux:
            raise DomainError("auxiliary code has the wrong parameters")
        if not (0 <= t_aux <= s):
            raise DomainError("need 0 <= t_aux <= s")
        self.s = s
        self.k_aux = k_aux
        self.t_aux = t_aux
        self.code = code
        self.structure = structure
        if structure == SINGLE:
            if blocks is not None:
                raise DomainError("single structure takes no blocks")
            self.blocks = None
            self.syndrome_table = build_syndrome_table(code, t_aux)
        elif structure == PRODUCT:
            if not blocks:
                raise DomainError("product structure needs blocks")
            self.blocks = list(blocks)
            self.syndrome_table = None
        else:
            raise DomainError("unknown structure %r" % structure)

    @classmethod
    def random(cls, s, k_aux, t_aux, seed):
        return cls(s, k_aux, t_aux, random_code(s, k_aux, seed))

    @classmethod
    def random_product(cls, s, k_aux, t_aux, b, seed):
        """b independent blocks; s, k_aux and t_aux must all divide by b."""
        if s % b or k_aux % b or t_aux % b:
            raise DomainError("block count must divide s, k_aux and t_aux")
        blocks = [cls.random(s // b, k_aux // b, t_aux // b, (seed, i))
                  for i in range(b)]
        gen = np.zeros((k_aux, s), np.uint8)
        for i, blk in enumerate(blocks):
            gen[i * (k_aux // b):(i + 1) * (k_aux // b),
                i * (s // b):(i + 1) * (s // b)] = blk.code.generator
        return cls(s, k_aux, t_aux, LinearCode(gen), PRODUCT, blocks)


def aux_decode(aux, z):
    """All auxiliary codewords at distance exactly t_aux from z, as a
    (m, s) uint8 array (m may be zero)."""
    z = as_bits(z).reshape(-1)
    if z.size != aux.s:
        raise DomainError("word length differs from s")
    if aux.structure == SINGLE:
        key = _syndrome_key(aux.code.syndrome(z))
        pats = aux.syndrome_table.get(key)
        if pats is None:
            return np.zeros((0, aux.s), np.uint8)
        return (z[None, :] ^ pats).astype(np.uint8)
    b = len(aux.blocks)
    step = aux.s // b
    per_block = []
    for i, blk in enumerate(aux.blocks):
        cands = aux_decode(blk, z[i * step:(i + 1) * step])
        if cands.shape[0] == 0:
            return np.zeros((0, aux.s), np.uint8)
        per_block.append(cands)
    rows = []
    for combo in itertools.product(*[range(c.shape[0]) for c in per_block]):
        rows.append(np.concatenate([per_block[i][j]
                                    for i, j in enumerate(combo)]))
    return np.array(rows, np.uint8)


def enumerate_dual_low_weight(code, part, w, strategy="auto",
                              max_hits=1 << 24):
    """All dual words h with |h_N| = w, as (h_n, h_p) uint8 arrays in
    canonical packed order.

    strategy "gray" sweeps the 2^(n-k) dual words (n - k <= 34);
    "mitm" meets in the middle over the weight split of h_N against the
    shortened-code parity condition; "auto" picks gray when it fits."""
    s = part.s
    nn = code.n - s
    if strategy == "auto":
        strategy = "gray" if code.n - code.k <= 34 else "mitm"
    if strategy == "gray":
        if code.n - code.k > 34:
            raise BudgetExceeded("gray sweep capped at 2^34 dual words")
        hn, hp = gray_low_weight(pack_rows(code.parity[:, part.npos]),
                                 pack_rows(code.parity[:, part.ppos]),
                                 w, max_hits=max_hits)
        return unpack_rows(hn, nn), unpack_rows(hp, s)
    if strategy != "mitm":
        raise DomainError("unknown strategy %r" % strategy)
    return _mitm_low_weight(code, part, w, max_hits)


def _mitm_low_weight(code, part, w, max_hits):
    # h_N ranges over the weight-w words orthogonal to Rprime; h_P = h_N R^T
    sf = systematic_form(code, part)
    nn = code.n - part.s
    half = nn // 2
    rp = sf.rprime
    cost = sum(comb(half, wa) + comb(nn - half, w - wa)
               for wa in range(max(0, w - (nn - half)), min(w, half) + 1))
    if cost > 5 * 10**7:
        raise BudgetExceeded("mitm halves too large")
    right_by_weight = {}
    for wb in range(w + 1):
        if wb > nn - half:
            continue
        buckets = {}
        for sup in itertools.combinations(range(half, nn), wb):
            x = np.zeros(nn, np.uint8)
            x[list(sup)] = 1
            key = _syndrome_key(gf2_matmul(x.reshape(1, -1), rp.T)[0])
            buckets.setdefault(key, []).append(x)
        right_by_weight[wb] = buckets
    hits = []
    for wa in range(max(0, w - (nn - half)), min(w, half) + 1):
        buckets = right_by_weight.get(w - wa)
        if buckets is None:
            continue
        for sup in itertools.combinations(range(half), wa):
            xa = np.zeros(nn, np.uint8)
            xa[list(sup)] = 1
            key = _syndrome_key(gf2_matmul(xa.reshape(1, -1), rp.T)[0])
            for xb in buckets.get(key, []):
                hits.append(xa ^ xb)
                if len(hits) > max_hits:
                    raise BudgetExceeded("hit count exceeds max_hits")
    if not hits:
        return np.zeros((0, nn), np.uint8), np.zeros((0, part.s), np.uint8)
    hn = np.array(hits, np.uint8)
    hp = gf2_matmul(hn, sf.r.T)
    # canonical packed order, matching the gray path
    pn, pp = pack_rows(hn), pack_rows(hp)
    keys = tuple(pp[:, c] for c in range(pp.shape[1] - 1, -1, -1)) + tuple(
        pn[:, c] for c in range(pn.shape[1] - 1, -1, -1))
    order = np.lexsort(keys)
    return hn[order], hp[order]


class SampleSet:
    """Pairs (h, c_aux) with |h_N| = w and |h_P + c_aux| = t_aux."""

    def __init__(self, part, w, t_aux, hn, hp, caux, complete, n=None, k=None):
        self.part = part
        self.w = w
        self.t_aux = t_aux
        self.hn = as_bits(hn)
        self.hp = as_bits(hp)
        self.caux = as_bits(caux)
        self.complete = complete
        self.n = part.n if n is None else n
        self.k = k

    @property
    def count(self):
        return int(self.hn.shape[0])

    def h_full(self):
        """Dual words back in original column order, (count, n)."""
        out = np.zeros((self.count, self.n), np.uint8)
        out[:, self.part.ppos] = self.hp
        out[:, self.part.npos] = self.hn
        return out


def _pair_rows_single(hn, hp, aux):
    # one batched syndrome computation instead of a decode per row
    synd = gf2_matmul(hp, aux.code.parity.T)
    weights = np.int64(1) << np.arange(synd.shape[1], dtype=np.int64)
    keys = synd.astype(np.int64) @ weights
    idx, pats = [], []
    for i, key in enumerate(keys.tolist()):
        p = aux.syndrome_table.get(key)
        if p is not None:
            idx.append(np.full(p.shape[0], i, np.int64))
            pats.append(p)
    if not idx:
        return None
    rep = np.concatenate(idx)
    hp2 = hp[rep]
    return hn[rep], hp2, hp2 ^ np.concatenate(pats)


def _pair_rows_generic(hn, hp, aux):
    rows_n, rows_p, rows_c = [], [], []
    for i in range(hn.shape[0]):
        cands = aux_decode(aux, hp[i])
        for j in range(cands.shape[0]):
            rows_n.append(hn[i])
            rows_p.append(hp[i])
            rows_c.append(cands[j])
    if not rows_n:
        return None
    return (np.array(rows_n, np.uint8), np.array(rows_p, np.uint8),
            np.array(rows_c, np.uint8))


def build_sample_set(code, part, w, aux, budget=None, seed=0,
                     max_hits=1 << 24):
    """Enumerate the full pair set; subsample uniformly without
    replacement when budget is smaller than the full count."""
    hn, hp = enumerate_dual_low_weight(code, part, w, max_hits=max_hits)
    if aux.structure == SINGLE and hn.shape[0]:
        got = _pair_rows_single(hn, hp, aux)
    else:
        got = _pair_rows_generic(hn, hp, aux)
    if got is None:
        hn2 = np.zeros((0, code.n - part.s), np.uint8)
        hp2 = np.zeros((0, part.s), np.uint8)
        ca2 = np.zeros((0, part.s), np.uint8)
    else:
        hn2, hp2, ca2 = got
    complete = True
    if budget is not None and budget < hn2.shape[0]:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(hn2.shape[0], size=budget, replace=False))
        hn2, hp2, ca2 = hn2[keep], hp2[keep], ca2[keep]
        complete = False
    return SampleSet(part, w, aux.t_aux, hn2, hp2, ca2, complete,
                     n=code.n, k=code.k)


_HEADER = struct.Struct("<6Q")


def save_sample_set(samples, path):
    """Header (n, k, s, w, t_aux, count) as little-endian u64, then the
    P positions as u32, then one packed row of n + s bits per pair
    (h in original column order, then c_aux)."""
    if samples.k is None:
        raise DomainError("sample set lacks the code dimension")
    n, s = samples.n, samples.part.s
    h = samples.h_full()
    rows = np.concatenate([h, samples.caux], axis=1)
    packed = np.packbits(rows, axis=1, bitorder="little")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(n, samples.k, s, samples.w, samples.t_aux,
                              samples.count))
        fh.write(struct.pack("<B", 1 if samples.complete else 0))
        fh.write(np.asarray(samples.part.ppos, "<u4").tobytes())
        fh.write(packed.tobytes())


def load_sample_set(path):
    with open(path, "rb") as fh:
        n, k, s, w, t_aux, count = _HEADER.unpack(fh.read(_HEADER.size))
        complete = bool(struct.unpack("<B", fh.read(1))[0])
        ppos = np.frombuffer(fh.read(4 * s), "<u4").astype(np.int64)
        row_bytes = (n + s + 7) // 8
        raw = np.frombuffer(fh.read(row_bytes * count), np.uint8)
    part = Partition(n, ppos)
    rows = np.unpackbits(raw.reshape(count, row_bytes), axis=1,
                         bitorder="little")[:, :n + s]
    h = rows[:, :n]
    caux = np.ascontiguousarray(rows[:, n:])
    return SampleSet(part, int(w), int(t_aux),
                     np.ascontiguousarray(h[:, part.npos]),
                     np.ascontiguousarray(h[:, part.ppos]),
                     caux, complete, n=int(n), k=int(k))


def expected_pair_count(n, k, s, w, t_aux, k_aux):
    """Average number of pairs over random codes, as an exact fraction."""
    from fractions import Fraction

    return Fraction(comb(n - s, w) * comb(s, t_aux), 1 << (k - k_aux))
