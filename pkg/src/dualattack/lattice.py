"""Score-distribution model for lattice dual attacks.

The score of a target point is a sum of N cosines over short dual
vectors of norm about w.  Its bulk is Gaussian, but targets unusually
close to the lattice add a heavy-tailed term driven by the closest
lattice distance through a Bessel transform.  Everything here is
predicted from sieve statistics (N, w) and the lattice volume alone;
no sieve is ever run.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammaincc, jv

from .errors import DomainError

MODELS = ("refined", "floor", "independence")
PRESETS = ("fig3-left", "fig3-right")


def log_ball_volume(n):
    """log Vol of the unit Euclidean ball in dimension n, exact Gamma form."""
    if n < 1:
        raise DomainError("dimension must be >= 1")
    return 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0)


@dataclass(frozen=True)
class LatticeScoreParams:
    """Sieve statistics and lattice metadata driving the score model.

    log_volume is the natural log of the lattice covolume; T is the
    number of score samples taken in the experiment (metadata only)."""

    n: int
    q: int
    log_volume: float
    N: int
    w: float
    T: float = 0.0

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise DomainError("dimension must be even and >= 2")
        if self.N < 1:
            raise DomainError("need at least one dual vector")
        if not self.w > 0:
            raise DomainError("dual norm scale must be positive")
        if not math.isfinite(self.log_volume):
            raise DomainError("log-volume must be finite")


def preset_params(name):
    """Published sieve statistics for the two reference experiments.

    The lattice volume is not printed alongside them, so it is inferred
    from (N, w) through the Gaussian heuristic on the dual: the volume
    is set so that exactly N dual vectors are expected at norm w."""
    if name == "fig3-left":
        n, q, N, w, T = 60, 3329, 5040, 0.0320, 2.0 ** 45
    elif name == "fig3-right":
        n, q, N, w, T = 80, 3329, 89494, 0.0376, 2.0 ** 48
    else:
        raise DomainError("unknown preset " + repr(name))
    log_dual_volume = log_ball_volume(n) + n * math.log(w) - math.log(N)
    return LatticeScoreParams(n, q, -log_dual_volume, N, w, T)


def log_gamma_rate(params):
    # rate of the shortest-length law: |Λ ∩ B_z| has mean theta z^n with
    # theta = Vol(B_1)/V, kept in log form
    return log_ball_volume(params.n) - params.log_volume


def _bessel_series(nu, x):
    # ascending series summed exactly; the alternating terms stay small
    # enough relative to the result only below x ≈ 0.85 nu
    half = 0.5 * x
    hh = half * half
    terms = []
    c = 1.0
    biggest = 1.0
    m = 0
    while m < 1000:
        terms.append(c)
        c *= -hh / ((m + 1.0) * (m + 1.0 + nu))
        m += 1
        ac = abs(c)
        if ac > biggest:
            biggest = ac
        elif ac < 1e-22 * biggest:
            break
    s = math.fsum(terms)
    if s == 0.0:
        return 0.0, -math.inf
    lead = nu * math.log(half) - math.lgamma(nu + 1.0)
    return math.copysign(1.0, s), lead + math.log(abs(s))


def _bessel_miller(k, x):
    # downward three-term recurrence from above the turning point,
    # normalized by J_0(x) + 2 J_2(x) + 2 J_4(x) + ... = 1
    top = max(k, int(x)) + int(math.sqrt(40.0 * max(k, int(x), 1))) + 2
    if top % 2:
        top += 1
    fp = 0.0
    f = 1e-290
    norm = 2.0 * f if top % 2 == 0 else 0.0
    val = f if top == k else None
    for m in range(top, 0, -1):
        fm = (2.0 * m / x) * f - fp
        fp, f = f, fm
        idx = m - 1
        if idx == k:
            val = fm
        if idx % 2 == 0:
            norm += fm if idx == 0 else 2.0 * fm
        if abs(f) > 1e250:
            fp *= 1e-250
            f *= 1e-250
            norm *= 1e-250
            if val is not None:
                val *= 1e-250
    if val == 0.0 or val is None:
        return 0.0, -math.inf
    return math.copysign(1.0, val / norm), math.log(abs(val)) - math.log(abs(norm))


def _bessel_hankel(nu, x):
    # large-argument cosine expansion; only entered when x >> nu^2 so a
    # handful of terms reach full precision
    mu = 4.0 * nu * nu
    p = 1.0
    q = (mu - 1.0) / (8.0 * x)
    term = q
    for j in (2, 3, 4, 5, 6, 7):
        term *= (mu - (2 * j - 1) ** 2) / (j * 8.0 * x)
        if j % 2 == 0:
            p += term if j % 4 == 0 else -term
        else:
            q += term if (j - 1) % 4 == 0 else -term
    chi = x - (0.5 * nu + 0.25) * math.pi
    v = p * math.cos(chi) - q * math.sin(chi)
    if v == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, v), 0.5 * math.log(2.0 / (math.pi * x)) + math.log(abs(v))


def log_bessel_j(nu, x):
    """Bessel function of the first kind as (sign, log of magnitude).

    Ascending series where cancellation is provably mild, downward
    recurrence with sum normalization otherwise, cosine asymptotics far
    out on the axis.  The log form survives orders where the value
    itself under- or overflows a float."""
    if nu < 0 or x < 0:
        raise DomainError("need nu >= 0 and x >= 0")
    if x == 0:
        return (1.0, 0.0) if nu == 0 else (0.0, -math.inf)
    if x <= max(0.85 * nu, 2.0):
        return _bessel_series(nu, x)
    if x > max(1e4, 50.0 * nu * nu):
        return _bessel_hankel(nu, x)
    k = round(nu)
    if abs(nu - k) < 1e-12:
        return _bessel_miller(int(k), x)
    # non-integer order past the series band: the model itself only
    # needs integer orders, so the library routine covers stragglers
    v = float(jv(nu, x))
    if v == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, v), math.log(abs(v))


def _bessel_log_many(k, xs):
    # vectorized (sign, log) of J_k over an array, single integer order;
    # same series/recurrence split as the scalar path
    xs = np.asarray(xs, dtype=np.float64)
    sign = np.zeros(xs.shape)
    logm = np.full(xs.shape, -np.inf)
    cut = max(0.85 * k, 2.0)
    ser = (xs > 0) & (xs <= cut)
    if ser.any():
        x = xs[ser]
        hh = 0.25 * x * x
        s = np.zeros_like(x)
        c = np.ones_like(x)
        for m in range(160):
            s += c
            c *= -hh / ((m + 1.0) * (m + 1.0 + k))
        nz = s != 0.0
        sg = np.where(s > 0, 1.0, np.where(s < 0, -1.0, 0.0))
        lg = np.where(nz, k * np.log(0.5 * x) - math.lgamma(k + 1.0)
                      + np.log(np.abs(np.where(nz, s, 1.0))), -np.inf)
        sign[ser] = sg
        logm[ser] = lg
    rec = xs > cut
    if rec.any():
        x = xs[rec]
        xm = float(np.max(x))
        top = max(k, int(xm)) + int(math.sqrt(40.0 * max(k, int(xm), 1))) + 2
        if top % 2:
            top += 1
        fp = np.zeros_like(x)
        f = np.full_like(x, 1e-290)
        norm = 2.0 * f if top % 2 == 0 else np.zeros_like(x)
        val = np.zeros_like(x)
        for m in range(top, 0, -1):
            fm = (2.0 * m / x) * f - fp
            fp, f = f, fm
            idx = m - 1
            if idx == k:
                val = fm.copy()
            if idx % 2 == 0:
                norm = norm + (fm if idx == 0 else 2.0 * fm)
            if m % 16 == 0:
                big = np.abs(f) > 1e250
                if big.any():
                    sc = np.where(big, 1e-250, 1.0)
                    fp *= sc
                    f *= sc
                    norm *= sc
                    val *= sc
        nz = val != 0.0
        sign[rec] = np.where(nz, np.sign(val / norm), 0.0)
        logm[rec] = np.where(nz, np.log(np.abs(np.where(nz, val, 1.0)))
                             - np.log(np.abs(norm)), -np.inf)
    return sign, logm


def floor_value(params, j):
    """Dominant-term score G(j) when the closest lattice point sits at
    distance j, as (sign, log of magnitude): N sqrt(n pi)/e times
    (n/(2 pi e w j))^{n/2-1} J_{n/2-1}(2 pi w j)."""
    if not j > 0:
        raise DomainError("distance must be positive")
    n, w = params.n, params.w
    nu = 0.5 * n - 1.0
    sign, lj = log_bessel_j(nu, 2.0 * math.pi * w * j)
    lead = (math.log(params.N) + 0.5 * math.log(n * math.pi) - 1.0
            + nu * (math.log(n) - math.log(2.0 * math.pi * math.e * w * j)))
    return sign, lead + lj


def _floor_scores(params, log_j):
    # plain-float G over an array of log-distances; magnitudes are at
    # most about N here so the exp cannot overflow, and underflow to 0
    # is the right reading of a vanishing Bessel tail
    n, w = params.n, params.w
    k = n // 2 - 1
    x = np.exp(math.log(2.0 * math.pi * w) + log_j)
    sign, lj = _bessel_log_many(k, x)
    lead = (math.log(params.N) + 0.5 * math.log(n * math.pi) - 1.0
            + k * (math.log(n) - math.log(2.0 * math.pi * math.e * w) - log_j))
    return sign * np.exp(np.minimum(lead + lj, 700.0))


def gamma_survival(k, theta, alpha):
    """Survival P[Z >= alpha] of the (k+1)-th arrival of a rate-theta
    point process in volume scale, which is the chance a Poisson(theta
    alpha) count stays at or below k."""
    if k < 0 or int(k) != k:
        raise DomainError("k must be a nonnegative integer")
    if not theta > 0:
        raise DomainError("theta must be positive")
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")
    ta = theta * alpha
    if math.isinf(ta):
        return 0.0
    return float(gammaincc(int(k) + 1, ta))


def sample_vector_lengths(params, count, seed=0, terms=1):
    """iid draws of the first `terms` nonzero vector lengths (j_0, ...)
    under the ball-count model; rows are sorted by construction."""
    if count < 1 or terms < 1:
        raise DomainError("count and terms must be >= 1")
    rng = np.random.default_rng([seed, params.n, terms])
    arrivals = np.cumsum(rng.exponential(1.0, (count, terms)), axis=1)
    return np.exp((np.log(arrivals) - log_gamma_rate(params)) / params.n)


def gaussian_heuristic_expect(n, log_volume, x):
    """log expected lattice-point count in a radius-x ball, in the
    Stirling convention (x / (sqrt(n/2 pi e) (pi n)^{1/n} V^{1/n}))^n.

    The exact Gamma-form count is log_ball_volume(n) + n log x - log V.
    This convention carries (pi n)^{1/n} inside the n-th power where
    Stirling only produces its square root, so it sits below the exact
    count by 0.5 log(pi n) - c_n with c_n in (1/(6n+1), 1/(6n)).  The
    shortest-length rate always uses the exact form."""
    if n < 1:
        raise DomainError("dimension must be >= 1")
    if not x > 0:
        raise DomainError("radius must be positive")
    return (n * math.log(x) - 0.5 * n * math.log(n / (2.0 * math.pi * math.e))
            - math.log(math.pi * n) - log_volume)


@dataclass(frozen=True)
class SurvivalCurve:
    thresholds: np.ndarray
    survival: dict
    ci_low: dict
    ci_high: dict
    meta: dict


def _strata():
    # u = theta j_0^n is a unit exponential; half-decade strata down to
    # 1e-18 resolve floor probabilities far below plain MC reach
    edges = np.concatenate(([0.0], 10.0 ** np.arange(-18.0, 2.001, 0.5)))
    pairs = list(zip(edges[:-1], edges[1:]))
    pairs.append((float(edges[-1]), math.inf))
    return pairs


def survival_refined(params, grid, mc_trials=200000, seed=0, shortest_terms=1,
                     fall_scale=1.0):
    """Monte-Carlo survival curves of the dual-attack score.

    Draws the closest-vector contribution by stratified sampling of the
    exponential arrival variable, adds the Gaussian bulk of N cosines in
    closed form per sample, and reports three curves: the convolution
    ("refined"), the closest-vector part alone ("floor"), and the
    independence-assumption Gaussian alone ("independence"), each with a
    95% band.  shortest_terms > 1 adds later arrivals to the floor sum;
    fall_scale = 0 switches the bulk off, collapsing refined onto floor."""
    if mc_trials < 10 ** 5:
        raise DomainError("need at least 1e5 trials")
    if shortest_terms < 1:
        raise DomainError("shortest_terms must be >= 1")
    if fall_scale < 0:
        raise DomainError("fall_scale must be nonnegative")
    t = np.asarray(grid, dtype=np.float64)
    if t.ndim != 1 or len(t) == 0 or not np.all(np.isfinite(t)):
        raise DomainError("threshold grid must be 1-d and finite")
    if len(t) > 1 and not np.all(np.diff(t) > 0):
        raise DomainError("threshold grid must be strictly increasing")

    rng = np.random.default_rng([seed, params.n, params.N, shortest_terms])
    log_theta = log_gamma_rate(params)
    sigma = math.sqrt(0.5 * params.N) * fall_scale
    pairs = _strata()
    base = mc_trials // len(pairs)

    ref = np.zeros(len(t))
    ref_var = np.zeros(len(t))
    flo = np.zeros(len(t))
    flo_var = np.zeros(len(t))
    for a, b in pairs:
        if math.isinf(b):
            u = a + rng.exponential(1.0, base)
            scale = math.exp(-a)
        else:
            # exact stratum mass with inverse-CDF conditional draws, so
            # the stratum weights sum to one with no sampling noise
            span = -math.expm1(a - b)
            u = a - np.log1p(-rng.uniform(0.0, 1.0, base) * span)
            scale = math.exp(-a) * span
        u = np.maximum(u, 1e-300)
        x_floor = _floor_scores(params, (np.log(u) - log_theta) / params.n)
        for _ in range(shortest_terms - 1):
            u = u + rng.exponential(1.0, base)
            x_floor = x_floor + _floor_scores(params, (np.log(u) - log_theta) / params.n)

        hit = x_floor[:, None] >= t[None, :]
        if sigma > 0:
            q = 0.5 * erfc((t[None, :] - x_floor[:, None]) / (sigma * math.sqrt(2.0)))
        else:
            q = hit.astype(np.float64)
        ref += scale * q.mean(axis=0)
        ref_var += scale * scale * q.var(axis=0) / base
        flo += scale * hit.mean(axis=0)
        flo_var += scale * scale * np.asarray(hit, dtype=np.float64).var(axis=0) / base

    ind = 0.5 * erfc(t / math.sqrt(params.N)) if params.N > 0 else np.zeros(len(t))
    if fall_scale != 1.0:
        ind = (0.5 * erfc(t / (sigma * math.sqrt(2.0))) if sigma > 0
               else (0.0 >= t).astype(np.float64))
    curves = {
        "refined": np.clip(ref, 0.0, 1.0),
        "floor": np.clip(flo, 0.0, 1.0),
        "independence": ind,
    }
    half = {
        "refined": 1.96 * np.sqrt(ref_var),
        "floor": 1.96 * np.sqrt(flo_var),
        "independence": np.zeros(len(t)),
    }
    lo = {m: np.clip(curves[m] - half[m], 0.0, 1.0) for m in MODELS}
    hi = {m: np.clip(curves[m] + half[m], 0.0, 1.0) for m in MODELS}
    meta = {
        "seed": seed,
        "mc_trials": base * len(pairs),
        "shortest_terms": shortest_terms,
        "fall_scale": fall_scale,
        "threshold_units": "raw score",
        "log_theta": log_theta,
        "sigma": math.sqrt(0.5 * params.N),
    }
    return SurvivalCurve(t, curves, lo, hi, meta)
