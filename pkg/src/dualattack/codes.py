"""Binary linear codes as dense 0/1 numpy arrays.

A word is a 1-d uint8 array over {0,1} (BitVec), a matrix a 2-d one
(BitMatrix).  All index sets are 0-based.  Combinatorial quantities are
exact Python integers throughout.
"""

from math import comb

import numpy as np

from ._kernels import coset_weight_hist, pack_rows
from .errors import BudgetExceeded, DomainError, RankDeficient

BitVec = np.ndarray
BitMatrix = np.ndarray


def as_bits(x):
    """Coerce to a uint8 0/1 array, validating the alphabet."""
    a = np.asarray(x, dtype=np.uint8)
    if a.size and a.max() > 1:
        raise DomainError("entries must be 0 or 1")
    return a


def gf2_matmul(a, b):
    """Matrix product over GF(2)."""
    return ((a.astype(np.int64) @ b.astype(np.int64)) & 1).astype(np.uint8)


def gf2_rref(a):
    """Row-reduced echelon form.  Returns (rref, pivot_columns)."""
    r = as_bits(a).copy()
    m, n = r.shape
    pivots = []
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        hit = np.nonzero(r[:, col])[0]
        hit = hit[hit != row]
        r[hit] ^= r[row]
        pivots.append(col)
        row += 1
    return r, pivots


def gf2_rank(a):
    return len(gf2_rref(a)[1])


def gf2_nullspace(a):
    """Basis of {x : a x^T = 0}, one vector per row (may be empty)."""
    a = as_bits(np.atleast_2d(a))
    m, n = a.shape
    r, pivots = gf2_rref(a)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for row, pc in enumerate(pivots):
            if r[row, fc]:
                basis[i, pc] = 1
    return basis


def gf2_inv(a):
    """Inverse of a square matrix over GF(2)."""
    a = as_bits(np.atleast_2d(a))
    m, n = a.shape
    if m != n:
        raise DomainError("matrix is not square")
    aug = np.concatenate([a, np.eye(n, dtype=np.uint8)], axis=1)
    r, pivots = gf2_rref(aug)
    if pivots[:n] != list(range(n)):
        raise RankDeficient("matrix is singular")
    return r[:, n:].copy()


def gf2_solve(a, b):
    """One solution x of x a = b (row-vector convention), or None."""
    a = as_bits(np.atleast_2d(a))
    b = as_bits(b).reshape(-1)
    m, n = a.shape
    aug = np.concatenate([a.T, b.reshape(-1, 1)], axis=1)
    r, pivots = gf2_rref(aug)
    x = np.zeros(m, dtype=np.uint8)
    for row, pc in enumerate(pivots):
        if pc == m:
            return None
        x[pc] = r[row, m]
    if np.any(gf2_matmul(x.reshape(1, -1), a)[0] != b):
        return None
    return x


class LinearCode:
    """An [n, k] binary code given by a full-rank generator matrix."""

    def __init__(self, generator, parity=None):
        g = as_bits(np.atleast_2d(generator))
        self.k, self.n = g.shape
        if gf2_rank(g) != self.k:
            raise RankDeficient("generator rows are dependent")
        self.generator = g
        if parity is None:
            parity = gf2_nullspace(g)
        h = as_bits(np.atleast_2d(parity))
        if h.shape != (self.n - self.k, self.n):
            raise DomainError("parity matrix has the wrong shape")
        if self.k and h.shape[0] and np.any(gf2_matmul(g, h.T)):
            raise DomainError("parity and generator are not orthogonal")
        self.parity = h

    def syndrome(self, y):
        return gf2_matmul(as_bits(y).reshape(1, -1), self.parity.T)[0]

    def contains(self, y):
        return not np.any(self.syndrome(y))

    def encode(self, m):
        return gf2_matmul(as_bits(m).reshape(1, -1), self.generator)[0]

    def dual(self):
        return LinearCode(self.parity, self.generator)

    def __repr__(self):
        return "LinearCode(n=%d, k=%d)" % (self.n, self.k)


class Partition:
    """A split of {0..n-1} into a bet side of size s and its complement."""

    def __init__(self, n, ppos):
        ppos = np.asarray(ppos, dtype=np.int64)
        if ppos.size != np.unique(ppos).size:
            raise DomainError("duplicate positions")
        if ppos.size and (ppos.min() < 0 or ppos.max() >= n):
            raise DomainError("position out of range")
        self.n = n
        self.ppos = np.sort(ppos)
        mask = np.ones(n, dtype=bool)
        mask[self.ppos] = False
        self.npos = np.nonzero(mask)[0]

    @property
    def s(self):
        return int(self.ppos.size)

    @classmethod
    def random(cls, n, s, rng):
        return cls(n, rng.choice(n, size=s, replace=False))

    def split(self, y):
        y = as_bits(y)
        return y[self.ppos], y[self.npos]

    def merge(self, yp, yn):
        y = np.zeros(self.n, dtype=np.uint8)
        y[self.ppos] = yp
        y[self.npos] = yn
        return y


class SystematicForm:
    """Row-reduced generator [[I_s, R], [0, Rprime]] in (P | N) column order.

    R maps N-projections of dual words back to P: h_P = h_N R^T.  Rprime
    generates the shortened code on the N positions.
    """

    def __init__(self, part, r, rprime):
        self.part = part
        self.r = r
        self.rprime = rprime
        self.column_order = np.concatenate([part.ppos, part.npos])


def systematic_form(code, part):
    """Reduce the generator against the partition.  Raises RankDeficient
    when the P-columns of the code do not have full rank s (caller should
    resample the partition)."""
    s = part.s
    gperm = np.concatenate([code.generator[:, part.ppos],
                            code.generator[:, part.npos]], axis=1)
    r, pivots = gf2_rref(gperm)
    if pivots[:s] != list(range(s)):
        raise RankDeficient("P-columns have rank < s")
    return SystematicForm(part, r[:s, s:].copy(), r[s:, s:].copy())


def puncture(code, keep):
    """Restriction of all codewords to the kept positions."""
    keep = np.asarray(keep, dtype=np.int64)
    g = code.generator[:, keep]
    rr, pivots = gf2_rref(g)
    basis = rr[: len(pivots)]
    if len(pivots) == 0:
        raise RankDeficient("punctured code is trivial")
    return LinearCode(basis)


def shorten(code, keep):
    """Codewords vanishing outside keep, restricted to keep."""
    keep = np.asarray(keep, dtype=np.int64)
    mask = np.ones(code.n, dtype=bool)
    mask[keep] = False
    away = np.nonzero(mask)[0]
    coeff = gf2_nullspace(code.generator[:, away].T)
    if coeff.shape[0] == 0:
        raise RankDeficient("shortened code is trivial")
    return LinearCode(gf2_matmul(coeff, code.generator[:, keep]))


def random_code(n, k, seed):
    """Uniform [n, k] code with a full-rank generator, by rejection."""
    if not (0 < k <= n):
        raise DomainError("need 0 < k <= n")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        g = rng.integers(0, 2, size=(k, n), dtype=np.uint8)
        if gf2_rank(g) == k:
            return LinearCode(g)
    raise RankDeficient("no full-rank generator in 100 draws")


class DecodingInstance:
    """A received word at exact distance t from the code."""

    def __init__(self, code, y, t):
        self.code = code
        self.y = as_bits(y)
        self.t = t
        self.planted_e = None

    @classmethod
    def plant(cls, code, t, seed):
        """Random codeword plus a random weight-t error.  The planted error
        is kept on the instance for test harnesses only; the decoder never
        reads it."""
        rng = np.random.default_rng(seed)
        m = rng.integers(0, 2, size=code.k, dtype=np.uint8)
        e = np.zeros(code.n, dtype=np.uint8)
        e[rng.choice(code.n, size=t, replace=False)] = 1
        inst = cls(code, (code.encode(m) + e) % 2, t)
        inst.planted_e = e
        return inst


def coset_weight_enumerator(code, x):
    """Weight histogram of the coset x + C, as a list of n+1 exact ints.

    Enumerates all 2^k codewords; dimensions above 26 are refused."""
    if code.k > 26:
        raise BudgetExceeded("coset enumeration capped at dimension 26")
    x = as_bits(x).reshape(-1)
    if x.size != code.n:
        raise DomainError("coset representative has the wrong length")
    hist = coset_weight_hist(pack_rows(code.generator), pack_rows(x)[0], code.n)
    return [int(v) for v in hist]


def gv_distance(n, k):
    """Largest d with 2^k * |B_d| < 2^n, by exact integer count.

    Returns 0 when no positive radius qualifies (k = n)."""
    if not (0 < k <= n):
        raise DomainError("need 0 < k <= n")
    ball = 1
    if (ball << k) >= (1 << n):
        return 0
    d = 0
    while d < n:
        nxt = ball + comb(n, d + 1)
        if (nxt << k) >= (1 << n):
            break
        ball = nxt
        d += 1
    return d
