"""Brute-force verification of the score identity and the survival
models for wrong-candidate counts.

Everything here enumerates small product sets exactly or simulates the
counting model; nothing is asymptotic.  The score identity equates the
empirical bias of a candidate x over the full pair set with a
Krawtchouk-weighted sum over the joint weight counts N_{i,j}; it holds
with exact rational arithmetic on every instance, which makes it the
strongest oracle in the repository.
"""

import math
from fractions import Fraction
from math import comb

import numpy as np

from ._kernels import pack_rows, popcount_rows, xor_closure
from .codes import (Partition, RankDeficient, as_bits, gf2_matmul,
                    systematic_form)
from .decoder import DoubleRlpnParams
from .errors import BudgetExceeded, DomainError, EmptySamples
from .fourier import bits_to_index, build_f, wht
from .krawtchouk import KrawtchoukTable
from .samples import AuxCode, build_sample_set

CURVE_LABELS = ("experimental", "poisson", "independence", "refined")

_CHUNK = 4096


class ModelParams:
    """Numeric context for the survival models: code dimensions plus the
    decoder parameters the score statistic depends on."""

    def __init__(self, n, k, t, s, u, w, k_aux, t_aux):
        self.n = int(n)
        self.k = int(k)
        self.t = int(t)
        self.s = int(s)
        self.u = int(u)
        self.w = int(w)
        self.k_aux = int(k_aux)
        self.t_aux = int(t_aux)
        if not (0 < self.k <= self.n):
            raise DomainError("need 0 < k <= n")
        if not (0 <= self.t <= self.n):
            raise DomainError("need 0 <= t <= n")
        DoubleRlpnParams(s=self.s, u=self.u, w=self.w, k_aux=self.k_aux,
                         t_aux=self.t_aux).validate(self.n, self.k, self.t)

    def bias(self):
        """Exact signed bias of the candidate-score statistic."""
        from .decoder import delta

        p = DoubleRlpnParams(s=self.s, u=self.u, w=self.w, k_aux=self.k_aux,
                             t_aux=self.t_aux)
        return delta(p, self.n, self.k, self.t).delta

    def expected_pairs(self):
        return Fraction(comb(self.n - self.s, self.w)
                        * comb(self.s, self.t_aux),
                        1 << (self.k - self.k_aux))


class JointWeightCounts:
    """Matrix N_{i,j}: i is the weight on the large side after the
    linear shift, j the weight of the coset word on the small side."""

    def __init__(self, counts):
        self.counts = np.asarray(counts, dtype=np.int64)
        if self.counts.ndim != 2 or (self.counts < 0).any():
            raise DomainError("counts must be a non-negative matrix")

    @property
    def dims(self):
        return self.counts.shape

    def total(self):
        return int(self.counts.sum())

    def n_side_marginal(self):
        """N_i: counts summed over the small-side weight."""
        return self.counts.sum(axis=1)

    def p_side_marginal(self):
        """N_j: counts summed over the large-side weight."""
        return self.counts.sum(axis=0)


def joint_weight_counts(code, aux, part, e, x):
    """Exhaustive N_{i,j} over (x + dual aux code) x (large-side code)."""
    n, k, s = code.n, code.k, part.s
    if s - aux.k_aux > 12 or k - s > 14:
        raise BudgetExceeded("joint weight enumeration limited to "
                             "2^12 coset words and 2^14 codewords")
    e = as_bits(e).reshape(-1)
    x = as_bits(x).reshape(-1)
    if e.size != n or x.size != s:
        raise DomainError("e lives on the full support, x on the P side")
    sf = systematic_form(code, part)
    ep, en = part.split(e)
    coset = xor_closure(aux.code.parity) ^ x
    jw = coset.sum(axis=1).astype(np.int64)
    shifted = gf2_matmul(coset ^ ep, sf.r) ^ en
    cn = xor_closure(sf.rprime)
    cn_words = pack_rows(cn)
    counts = np.zeros((n - s + 1, s + 1), np.int64)
    for row, j in zip(pack_rows(shifted), jw):
        iw = popcount_rows(cn_words ^ row)
        counts[:, j] += np.bincount(iw, minlength=n - s + 1)
    return JointWeightCounts(counts)


def duality_check(code, aux, part, e, y, x, w):
    """Both sides of the score identity as exact rationals.

    The left side averages the sign of <y,h> + <x, c_aux> over every
    pair at weight w; the right side is the Krawtchouk-weighted count
    sum divided by 2^(k - k_aux).  They must agree exactly whenever
    y - e is a codeword.
    """
    n, k, s = code.n, code.k, part.s
    y = as_bits(y).reshape(-1)
    e = as_bits(e).reshape(-1)
    x = as_bits(x).reshape(-1)
    if not code.contains(y ^ e):
        raise DomainError("y - e must be a codeword")
    ss = build_sample_set(code, part, w, aux)
    if ss.count == 0:
        raise EmptySamples("no pairs at this weight")
    yp, yn = part.split(y)
    par = (gf2_matmul(ss.hn, yn.reshape(-1, 1))
           ^ gf2_matmul(ss.hp, yp.reshape(-1, 1))
           ^ gf2_matmul(ss.caux, x.reshape(-1, 1)))[:, 0]
    lhs = Fraction(int(ss.count) - 2 * int(par.sum()), ss.count)
    jwc = joint_weight_counts(code, aux, part, e, x)
    kw = KrawtchoukTable(n - s, w)
    kt = KrawtchoukTable(s, ss.t_aux)
    ksum = 0
    for i in range(n - s + 1):
        row = jwc.counts[i]
        if not row.any():
            continue
        kwi = kw.value(i)
        for j in range(s + 1):
            c = int(row[j])
            if c:
                ksum += c * kwi * kt.value(j)
    rhs = Fraction(ksum, (1 << (k - aux.k_aux)) * ss.count)
    return lhs, rhs


class SurvivalCurve:
    """Threshold grid with expected (or observed) counts of candidates
    scoring at or above each threshold, plus 95% Wilson bands."""

    def __init__(self, label, thresholds, counts, ci_low=None, ci_high=None,
                 meta=None):
        if label not in CURVE_LABELS:
            raise DomainError("unknown curve label %r" % (label,))
        self.label = label
        self.thresholds = [float(t) for t in thresholds]
        self.counts = [float(c) for c in counts]
        self.ci_low = list(self.counts) if ci_low is None else \
            [float(c) for c in ci_low]
        self.ci_high = list(self.counts) if ci_high is None else \
            [float(c) for c in ci_high]
        self.meta = dict(meta or {})
        if sorted(self.thresholds) != self.thresholds:
            raise DomainError("thresholds must ascend")
        for a, b in zip(self.counts, self.counts[1:]):
            if b > a + 1e-9 * max(1.0, abs(a)):
                raise DomainError("survival counts must not increase")

    def __len__(self):
        return len(self.thresholds)

    def rows(self):
        for t, c, lo, hi in zip(self.thresholds, self.counts,
                                self.ci_low, self.ci_high):
            yield self.label, t, c, lo, hi


def wilson_interval(hits, trials, z=1.959963984540054):
    """95% score interval for a binomial proportion."""
    if trials <= 0:
        raise DomainError("need at least one trial")
    p = hits / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials
                                   + z * z / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def _threshold_grid(values, grid, max_points=512):
    if grid is not None:
        g = [float(t) for t in grid]
        if sorted(g) != g:
            raise DomainError("threshold grid must ascend")
        return g
    uniq = np.unique(values)
    if uniq.size <= max_points:
        return uniq.tolist()
    qs = np.linspace(0.0, 1.0, max_points)
    return np.unique(np.quantile(uniq, qs, method="nearest")).tolist()


def _survival_from_draws(label, stats, scale, grid, meta):
    stats = np.sort(np.asarray(stats, dtype=np.float64))
    trials = stats.size
    thresholds = _threshold_grid(stats, grid)
    counts, lo, hi = [], [], []
    for t in thresholds:
        hits = trials - int(np.searchsorted(stats, t, side="left"))
        counts.append(scale * hits / trials)
        a, b = wilson_interval(hits, trials)
        lo.append(scale * a)
        hi.append(scale * b)
    return SurvivalCurve(label, thresholds, counts, lo, hi, meta)


def model_intensities(nparams):
    """Poisson intensities of the counting model: the small-side weight
    classes at C(s,j)/2^k_aux, and the per-coset-word large-side factor
    C(n-s,i)/2^(n-k)."""
    lam_j = np.array([comb(nparams.s, j) for j in range(nparams.s + 1)],
                     dtype=np.float64) / 2.0 ** nparams.k_aux
    lam_i = np.array([comb(nparams.n - nparams.s, i)
                      for i in range(nparams.n - nparams.s + 1)],
                     dtype=np.float64) / 2.0 ** (nparams.n - nparams.k)
    return lam_j, lam_i


def poisson_statistics(nparams, trials, seed=0, n_samples=None):
    """Monte-Carlo draws of the wrong-candidate score under the Poisson
    counting model, on the raw-score axis.

    Cell counts N_{i,j} are Poisson with a Poisson-mixed row intensity;
    the statistic is the Krawtchouk-weighted cell sum over 2^(k-k_aux).
    When n_samples is given the score is rescaled by
    n_samples / E[pairs], putting a subsampled experiment on the same
    axis.
    """
    np_ = nparams
    lam_j, lam_i = model_intensities(nparams)
    kw = np.array(KrawtchoukTable(np_.n - np_.s, np_.w).values,
                  dtype=np.float64)
    kt = np.array(KrawtchoukTable(np_.s, np_.t_aux).values,
                  dtype=np.float64)
    scale = 1.0 / 2.0 ** (np_.k - np_.k_aux)
    if n_samples is not None:
        scale *= float(n_samples) / float(np_.expected_pairs())
    rng = np.random.default_rng(seed)
    out = np.empty(trials, np.float64)
    done = 0
    while done < trials:
        m = min(_CHUNK, trials - done)
        nj = rng.poisson(lam=np.broadcast_to(lam_j, (m, lam_j.size)))
        nij = rng.poisson(lam=nj[:, :, None] * lam_i[None, None, :])
        out[done:done + m] = (nij * kt[None, :, None]
                              * kw[None, None, :]).sum(axis=(1, 2)) * scale
        done += m
    return out


def poisson_survival(nparams, trials=10 ** 5, seed=0, n_samples=None,
                     grid=None):
    """Survival curve of the Poisson counting model, scaled to the
    expected number of candidates out of 2^k_aux."""
    if trials < 10 ** 4:
        raise DomainError("need at least 10^4 trials")
    stats = poisson_statistics(nparams, trials, seed=seed,
                               n_samples=n_samples)
    meta = {
        "axis": "score",
        "pair_expectation": float(nparams.expected_pairs()),
        "samples": (float(nparams.expected_pairs())
                    if n_samples is None else float(n_samples)),
        "trials": int(trials),
    }
    return _survival_from_draws("poisson", stats, 2.0 ** nparams.k_aux,
                                grid, meta)


def independence_survival(nparams, n_samples, grid=None):
    """Survival curve when scores are sums of n_samples fair signs.

    The binomial tail is evaluated through the regularized incomplete
    beta up to n_samples = 10^5; past that a normal tail with
    continuity correction stands in, which undershoots the extreme tail
    (that deviation is exactly the effect the counting model corrects).
    """
    from scipy.stats import binom, norm

    n_samples = int(n_samples)
    if n_samples < 1:
        raise DomainError("need n_samples >= 1")
    if grid is None:
        top = min(float(n_samples), 12.0 * math.sqrt(n_samples))
        grid = np.linspace(0.0, top, 257)
    thresholds = [float(t) for t in grid]
    scale = 2.0 ** nparams.k_aux
    counts = []
    for t in thresholds:
        if t > n_samples:
            counts.append(0.0)
            continue
        kmin = math.ceil((t + n_samples) / 2.0)
        if kmin <= 0:
            counts.append(scale)
            continue
        if n_samples <= 10 ** 5:
            p = float(binom.sf(kmin - 1, n_samples, 0.5))
        else:
            zval = (kmin - 0.5 - n_samples / 2.0) / math.sqrt(n_samples / 4.0)
            p = float(norm.sf(zval))
        counts.append(scale * p)
    meta = {"axis": "score", "samples": float(n_samples),
            "exact": n_samples <= 10 ** 5}
    return SurvivalCurve("independence", thresholds, counts, meta=meta)


def experimental_survival(instance, params, num_x="all", seed=0, grid=None):
    """Observed wrong-candidate survival on one planted instance.

    Draws partitions until the planted split matches the bet, builds one
    auxiliary code and sample set (honouring params.sample_budget), runs
    the transform, and counts candidates at or above each threshold with
    the planted secret excluded.
    """
    code, y, t = instance.code, instance.y, instance.t
    if instance.planted_e is None:
        raise DomainError("experimental curve needs the planted error")
    params.validate(code.n, code.k, t)
    e = as_bits(instance.planted_e).reshape(-1)
    part = None
    sf = None
    for tries in range(10000):
        rng = np.random.default_rng([seed, tries])
        cand = Partition.random(code.n, params.s, rng)
        _, en = cand.split(e)
        if int(en.sum()) != params.u:
            continue
        try:
            sf = systematic_form(code, cand)
        except RankDeficient:
            continue
        part = cand
        break
    if part is None:
        raise DomainError("no partition matches the planted split")
    aux = AuxCode.random(params.s, params.k_aux, params.t_aux, [seed, 1])
    ss = build_sample_set(code, part, params.w, aux,
                          budget=params.sample_budget, seed=[seed, 2])
    meta = {
        "axis": "score",
        "samples": float(ss.count),
        "complete": bool(ss.complete),
        "pair_expectation": float(Fraction(
            comb(code.n - params.s, params.w) * comb(params.s, params.t_aux),
            1 << (code.k - params.k_aux))),
    }
    if ss.count == 0:
        thresholds = [0.0] if grid is None else [float(g) for g in grid]
        return SurvivalCurve("experimental", thresholds,
                             [0.0] * len(thresholds), meta=meta)
    table = build_f(y, ss, aux.code.generator)
    scores = np.asarray(wht(table).values, dtype=np.int64)
    ep, _ = part.split(e)
    true_idx = bits_to_index(gf2_matmul(ep.reshape(1, -1),
                                        aux.code.generator.T)[0])
    wrong = np.delete(scores, true_idx)
    if num_x != "all":
        num_x = int(num_x)
        if not (1 <= num_x <= wrong.size):
            raise DomainError("num_x out of range")
        sub = np.random.default_rng([seed, 3]).choice(
            wrong.size, size=num_x, replace=False)
        sample = np.sort(wrong[np.sort(sub)])
        scale = wrong.size / num_x
    else:
        sample = np.sort(wrong)
        scale = 1.0
    thresholds = _threshold_grid(sample, grid)
    counts, lo, hi = [], [], []
    for thr in thresholds:
        hits = sample.size - int(np.searchsorted(sample, thr, side="left"))
        counts.append(scale * hits)
        if scale == 1.0:
            # exhaustive scan: the count is exact, not an estimate
            lo.append(float(hits))
            hi.append(float(hits))
        else:
            a, b = wilson_interval(hits, sample.size)
            lo.append(scale * sample.size * a)
            hi.append(scale * sample.size * b)
    meta["num_x"] = "all" if scale == 1.0 else int(sample.size)
    return SurvivalCurve("experimental", thresholds, counts, lo, hi, meta)


class AdmissibleRegion:
    """Weight pairs whose Krawtchouk magnitude stays within a polynomial
    factor of the planted pair's."""

    def __init__(self, pairs, exponent, anchor):
        self.pairs = frozenset((int(i), int(j)) for i, j in pairs)
        self.exponent = float(exponent)
        self.anchor = (int(anchor[0]), int(anchor[1]))
        if self.anchor not in self.pairs:
            raise DomainError("the planted weight pair must be admissible")

    def __contains__(self, pair):
        return (int(pair[0]), int(pair[1])) in self.pairs

    def __len__(self):
        return len(self.pairs)


def admissible_region(nparams, exponent=3.2):
    """All (i, j) with |K_w(u) K_taux(t-u)| <= n^exponent |K_w(i) K_taux(j)|."""
    np_ = nparams
    kw = KrawtchoukTable(np_.n - np_.s, np_.w)
    kt = KrawtchoukTable(np_.s, np_.t_aux)
    anchor_val = kw.value(np_.u) * kt.value(np_.t - np_.u)
    if anchor_val == 0:
        raise DomainError("bias vanishes at the planted weights")
    log_anchor = math.log(abs(anchor_val))
    budget = exponent * math.log(np_.n)
    pairs = []
    for i in range(np_.n - np_.s + 1):
        kwi = kw.value(i)
        if kwi == 0:
            continue
        for j in range(np_.s + 1):
            ktj = kt.value(j)
            if ktj == 0:
                continue
            if log_anchor - math.log(abs(kwi * ktj)) <= budget + 1e-12:
                pairs.append((i, j))
    return AdmissibleRegion(pairs, exponent, (np_.u, np_.t - np_.u))


def candidate_bound(nparams, exponent=3.2):
    """Expected-candidate ceiling: the largest admissible cell mean of
    the pair counts, plus one for the planted candidate."""
    np_ = nparams
    region = admissible_region(nparams, exponent=exponent)
    log2_best = None
    for i, j in region.pairs:
        v = (math.log2(comb(np_.s, j)) + math.log2(comb(np_.n - np_.s, i))
             - (np_.n - np_.k))
        if log2_best is None or v > log2_best:
            log2_best = v
    return 2.0 ** log2_best + 1.0
