"""Binary Krawtchouk polynomials, exact and in the exponent.

K_w over length n evaluated at t is the signed count
sum_j (-1)^j C(t, j) C(n - t, w - j), an integer.  Its normalized
log-magnitude converges to kappa_tilde of the ratio pair (t/n, w/n).
"""

import math
from math import comb

import numpy as np

from .errors import BudgetExceeded, DomainError


def krawtchouk_exact(n, w, t):
    """Exact integer value of K_w over length n at point t."""
    if n < 0 or n > 4096:
        raise DomainError("length capped at 4096")
    if not (0 <= w <= n and 0 <= t <= n):
        raise DomainError("need 0 <= w, t <= n")
    acc = 0
    for j in range(w + 1):
        term = comb(t, j) * comb(n - t, w - j)
        acc += -term if j & 1 else term
    return acc


class KrawtchoukTable:
    """All values K_w(t), t = 0..n, for one (n, w), exact ints."""

    def __init__(self, n, w):
        self.n = n
        self.w = w
        self.values = tuple(krawtchouk_exact(n, w, t) for t in range(n + 1))

    def value(self, t):
        return self.values[t]

    def as_float(self):
        return np.array(self.values, dtype=np.float64)


def character_sum_oracle(x, w):
    """sum over |y| = w of (-1)^<x, y>, by brute enumeration.

    Independent of the polynomial formula; equals K_w(|x|).  Words longer
    than 18 bits are refused."""
    x = np.asarray(x, dtype=np.uint8).reshape(-1)
    m = x.size
    if m > 18:
        raise BudgetExceeded("character sum capped at 18 bits")
    if not (0 <= w <= m):
        raise DomainError("need 0 <= w <= len(x)")
    import itertools

    xmask = 0
    for i in range(m):
        if x[i]:
            xmask |= 1 << i
    acc = 0
    for support in itertools.combinations(range(m), w):
        ymask = 0
        for i in support:
            ymask |= 1 << i
        acc += -1 if bin(xmask & ymask).count("1") & 1 else 1
    return acc


def h2(p):
    """Binary entropy, log base 2, with h2(0) = h2(1) = 0."""
    if p < 0 or p > 1:
        raise DomainError("entropy argument outside [0, 1]")
    if p == 0 or p == 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def h2_inv(v):
    """Inverse of h2 on [0, 1/2], by bisection to 1e-12."""
    if v < 0 or v > 1:
        raise DomainError("entropy value outside [0, 1]")
    if v == 0:
        return 0.0
    if v == 1:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > 1e-12:
        mid = (lo + hi) / 2
        if h2(mid) < v:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class KappaPoint:
    """kappa_tilde at one ratio pair, with the active branch recorded."""

    def __init__(self, tau, omega, value, branch):
        self.tau = tau
        self.omega = omega
        self.value = value
        self.branch = branch


def _omega_perp(omega):
    return 0.5 - math.sqrt(omega * (1 - omega))


def kappa_point(tau, omega):
    """Normalized exponent of |K_{omega n}(tau n)| for large n.

    Monotone branch on tau <= omega_perp = 1/2 - sqrt(omega (1 - omega))
    (closed on the left); oscillatory envelope (1 - h2(tau) + h2(omega)) / 2
    beyond.  Both branches meet continuously at omega_perp.  Points past 1/2
    are mirrored: the magnitude at n - t equals the magnitude at t."""
    if not (0 <= tau <= 1):
        raise DomainError("tau outside [0, 1]")
    if not (0 <= omega <= 0.5):
        raise DomainError("omega outside [0, 1/2]")
    if tau > 0.5:
        tau = 1.0 - tau
    if omega == 0:
        return KappaPoint(tau, omega, 0.0, "monotone")
    wp = _omega_perp(omega)
    if tau <= wp:
        disc = (1 - 2 * tau) ** 2 - 4 * omega * (1 - omega)
        disc = max(disc, 0.0)
        z = (1 - 2 * tau - math.sqrt(disc)) / (2 * (1 - omega))
        val = (1 - tau) * math.log2(1 + z) - omega * math.log2(z)
        if tau > 0:
            val += tau * math.log2(1 - z)
        return KappaPoint(tau, omega, val, "monotone")
    val = (1 - h2(tau) + h2(omega)) / 2
    return KappaPoint(tau, omega, val, "oscillatory")


def kappa_tilde(tau, omega):
    """Value of the Krawtchouk exponent at the ratio pair (tau, omega)."""
    return kappa_point(tau, omega).value


def kappa_tilde_many(taus, omega):
    """Vectorized kappa_tilde over an array of evaluation points.

    Same branch structure as kappa_point with a fixed omega; used by the
    asymptotic optimizer where per-call scalar dispatch is too slow."""
    if not (0 <= omega <= 0.5):
        raise DomainError("omega outside [0, 1/2]")
    t = np.asarray(taus, dtype=np.float64)
    if t.size and (t.min() < 0 or t.max() > 1):
        raise DomainError("tau outside [0, 1]")
    t = np.minimum(t, 1.0 - t)
    if omega == 0:
        return np.zeros_like(t)
    out = np.empty_like(t)
    wp = _omega_perp(omega)
    mono = t <= wp
    tm = t[mono]
    disc = np.maximum((1 - 2 * tm) ** 2 - 4 * omega * (1 - omega), 0.0)
    z = (1 - 2 * tm - np.sqrt(disc)) / (2 * (1 - omega))
    val = (1 - tm) * np.log2(1 + z) - omega * np.log2(z)
    pos = tm > 0
    val[pos] += tm[pos] * np.log2(1 - z[pos])
    out[mono] = val
    to = t[~mono]
    hv = np.zeros_like(to)
    inner = (to > 0) & (to < 1)
    ti = to[inner]
    hv[inner] = -ti * np.log2(ti) - (1 - ti) * np.log2(1 - ti)
    out[~mono] = (1 - hv + h2(omega)) / 2
    return out
