"""Sample statistics over the auxiliary message space.

f counts signed label agreements per auxiliary message; its Walsh
transform scores every candidate secret at once.  Tables hold exact
signed integers end to end.
"""

from fractions import Fraction

import numpy as np

from ._kernels import dot_parity, pack_rows, wht_inplace
from .codes import as_bits, gf2_inv, gf2_matmul, gf2_rref
from .errors import DomainError, EmptySamples, InconsistentAux


class FourierTable:
    """Signed integer table over the 2^k_aux auxiliary messages.

    Index bit j is coordinate j of the message vector."""

    def __init__(self, k_aux, values=None):
        self.k_aux = k_aux
        if values is None:
            values = np.zeros(1 << k_aux, np.int64)
        values = np.ascontiguousarray(values, dtype=np.int64)
        if values.shape != (1 << k_aux,):
            raise DomainError("table length must be 2^k_aux")
        self.values = values

    def copy(self):
        return FourierTable(self.k_aux, self.values.copy())


class CandidateSet:
    """Candidates passing a score threshold, scores attached.

    members are (message_index, score), sorted by descending score and
    then by the message bits; threshold is the exact rational cutoff."""

    def __init__(self, k_aux, threshold, members):
        self.k_aux = k_aux
        self.threshold = Fraction(threshold)
        self.members = sorted(
            members, key=lambda ms: (-ms[1], _index_bits(ms[0], k_aux)))

    def __len__(self):
        return len(self.members)

    def indices(self):
        return [m for m, _ in self.members]


def _index_bits(idx, k):
    return tuple((idx >> j) & 1 for j in range(k))


def index_to_bits(idx, k):
    """Message index to its uint8 coordinate vector."""
    return np.array(_index_bits(idx, k), np.uint8)


def bits_to_index(bits):
    idx = 0
    for j, b in enumerate(np.asarray(bits).reshape(-1)):
        if b:
            idx |= 1 << j
    return idx


def message_decompose(caux, g_aux):
    """Solve m g_aux = c_aux for every row; raises InconsistentAux when a
    row is outside the row space."""
    g_aux = as_bits(np.atleast_2d(g_aux))
    caux = as_bits(np.atleast_2d(caux))
    k_aux = g_aux.shape[0]
    _, pivots = gf2_rref(g_aux)
    if len(pivots) != k_aux:
        raise DomainError("auxiliary generator rows are dependent")
    inv = gf2_inv(g_aux[:, pivots])
    msgs = gf2_matmul(caux[:, pivots], inv)
    if np.any(gf2_matmul(msgs, g_aux) != caux):
        raise InconsistentAux("codeword outside the generator row space")
    return msgs


def build_f(y, samples, g_aux):
    """Accumulate the signed label counts of every pair into a table
    indexed by the auxiliary message."""
    y = as_bits(y).reshape(-1)
    if y.size != samples.n:
        raise DomainError("received word length differs from n")
    g_aux = as_bits(np.atleast_2d(g_aux))
    k_aux = g_aux.shape[0]
    table = FourierTable(k_aux)
    if samples.count == 0:
        return table
    yp, yn = samples.part.split(y)
    labels = dot_parity(pack_rows(samples.hn), pack_rows(yn)[0]) \
        ^ dot_parity(pack_rows(samples.hp), pack_rows(yp)[0])
    msgs = message_decompose(samples.caux, g_aux)
    weights = (np.int64(1) << np.arange(k_aux, dtype=np.int64))
    idx = msgs.astype(np.int64) @ weights
    size = 1 << k_aux
    pos = np.bincount(idx[labels == 0], minlength=size)
    neg = np.bincount(idx[labels == 1], minlength=size)
    table.values += pos.astype(np.int64) - neg.astype(np.int64)
    return table


def wht(table):
    """Walsh transform of the table, in place; applying it twice scales
    by 2^k_aux.  Returns the same object."""
    wht_inplace(table.values)
    return table


def bias_from_fhat(fhat, u, count):
    """Exact empirical bias of candidate u from a transformed table."""
    if count == 0:
        raise EmptySamples("no pairs behind the statistic")
    return Fraction(int(fhat.values[u]), count)


def fft_decode(y, samples, g_aux, delta, htilde_expected):
    """Score all candidates and keep those with f_hat strictly above
    (delta / 2) times the expected pair count (full enumeration) or the
    realized pair count (subsampled set)."""
    table = wht(build_f(y, samples, g_aux))
    if samples.complete:
        base = Fraction(htilde_expected)
    else:
        base = Fraction(samples.count)
    thr = Fraction(delta) * base / 2
    members = [(int(u), int(v)) for u, v in enumerate(table.values.tolist())
               if v > thr]
    return CandidateSet(table.k_aux, thr, members)
