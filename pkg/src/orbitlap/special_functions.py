"""
Modified Bessel function of the third kind, K_nu(x), for real order.

The Laplace densities need K_nu at orders (2 - p)/2 and (2 - pq)/2, i.e. at
arbitrary integer and half-integer orders, and at arguments that range from
nearly zero (samples close to the origin) to several thousand (large
Mahalanobis distances).  Everything is therefore computed in the log domain.

Method
------
The order is reduced with K_{-nu} = K_nu and split as ``|nu| = mu + n`` with
``mu`` in [-1/2, 1/2).  Two seed values K_mu and K_{mu+1} are obtained by

* Temme's series for ``x <= 2`` (with the final ``2/x`` factor applied in
  log space, so the seeds never overflow, however small ``x`` is), or
* Steed's continued fraction (CF2) for ``x > 2``, which yields the
  exponentially scaled values ``K * e^x``.

The order is then raised with the forward recurrence

    K_{v+1}(x) = K_{v-1}(x) + (2 v / x) K_v(x),

which is stable for K.  The recurrence is run on log-ratios
``log(K_{v+1} / K_v)`` so no intermediate value can overflow.
"""

import math

from .errors import DomainError, OutOfRangeError

__all__ = ["BesselPoint", "bessel_k", "log_bessel_k"]

_EPS = 1.0e-16
_MAXIT = 100000
_TEMME_XMAX = 2.0
_LOG_DBL_MAX = math.log(1.7976931348623157e308)

# Taylor coefficients of 1/Gamma(z) about z = 0; entry k multiplies z**(k + 1).
_RGAMMA_TAYLOR = (
    1.0,
    0.57721566490153286,
    -0.65587807152025388,
    -0.042002635034095236,
    0.16653861138229149,
    -0.042197734555544337,
    -0.0096219715278769736,
    0.0072189432466630995,
    -0.0011651675918590651,
    -0.00021524167411495097,
    0.00012805028238811619,
    -2.0134854780788239e-5,
    -1.2504934821426707e-6,
    1.1330272319816959e-6,
    -2.0563384169776071e-7,
    6.1160951044814158e-9,
    5.0020076444692229e-9,
    -1.1812745704870201e-9,
    1.0434267116911005e-10,
    7.7822634399050713e-12,
    -3.6968056186422057e-12,
    5.100370287454476e-13,
    -2.0583260535665068e-14,
    -5.348122539423018e-15,
    1.2267786282382608e-15,
    -1.1812593016974588e-16,
)


class BesselPoint:
    """A validated (order, argument) pair.

    ``nu`` must be finite and ``x`` strictly positive and finite.
    """

    __slots__ = ("nu", "x")

    def __init__(self, nu, x):
        nu = float(nu)
        x = float(x)
        if not math.isfinite(nu):
            raise DomainError(f"Bessel order must be finite, got {nu!r}")
        if not (x > 0.0) or not math.isfinite(x):
            raise DomainError(f"Bessel argument must be finite and > 0, got {x!r}")
        self.nu = nu
        self.x = x

    def __repr__(self):
        return f"BesselPoint(nu={self.nu!r}, x={self.x!r})"

    def __eq__(self, other):
        if not isinstance(other, BesselPoint):
            return NotImplemented
        return (self.nu, self.x) == (other.nu, other.x)

    def __hash__(self):
        return hash((self.nu, self.x))


def _as_point(nu, x):
    if isinstance(nu, BesselPoint):
        if x is not None:
            raise TypeError("pass either a BesselPoint or (nu, x), not both")
        return nu
    if x is None:
        raise TypeError("missing Bessel argument x")
    return BesselPoint(nu, x)


def _gam1(mu):
    # (1/Gamma(1 - mu) - 1/Gamma(1 + mu)) / (2 mu) without cancellation:
    # only the even-index Taylor terms of 1/Gamma survive the difference.
    mu2 = mu * mu
    acc = 0.0
    for coef in reversed(_RGAMMA_TAYLOR[1::2]):
        acc = acc * mu2 + coef
    return -acc


def _temme_seeds(mu, x):
    """log K_mu(x) and log K_{mu+1}(x) for |mu| <= 1/2 and 0 < x <= 2."""
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if pimu == 0.0 else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if e == 0.0 else math.sinh(e) / e
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    gam1 = _gam1(mu)
    gam2 = 0.5 * (gammi + gampl)

    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    d = x2 * x2
    total1 = p
    mu2 = mu * mu
    for i in range(1, _MAXIT):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= d / i
        p /= i - mu
        q /= i + mu
        term = c * ff
        total += term
        total1 += c * (p - i * ff)
        if abs(term) < abs(total) * _EPS:
            break
    else:  # pragma: no cover - the series converges in < 30 terms on (0, 2]
        raise ArithmeticError("Temme series failed to converge")
    return math.log(total), math.log(total1) + math.log(2.0 / x)


def _steed_seeds(mu, x):
    """log K_mu(x) and log K_{mu+1}(x) for |mu| <= 1/2 and x > 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu * mu
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, _MAXIT):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:  # pragma: no cover
        raise ArithmeticError("Steed continued fraction failed to converge")
    h = a1 * h
    log_kmu = 0.5 * math.log(math.pi / (2.0 * x)) - math.log(s) - x
    log_kmu1 = log_kmu + math.log((mu + x + 0.5 - h) / x)
    return log_kmu, log_kmu1


def log_bessel_k(nu, x=None):
    """Natural log of K_nu(x).

    Parameters
    ----------
    nu : float or BesselPoint
        Real order.  A :class:`BesselPoint` may be passed instead of the pair.
    x : float
        Strictly positive argument.

    Returns
    -------
    float
        ``log K_nu(x)``.  Finite for every finite order and every positive
        double ``x``, including where ``K_nu(x)`` itself would overflow or
        underflow.

    Raises
    ------
    DomainError
        If ``x <= 0`` or either argument is not finite.
    """
    pt = _as_point(nu, x)
    order = abs(pt.nu)
    x = pt.x
    n = int(math.floor(order + 0.5))
    mu = order - n
    if x <= _TEMME_XMAX:
        log_k, log_k1 = _temme_seeds(mu, x)
    else:
        log_k, log_k1 = _steed_seeds(mu, x)
    if n == 0:
        return log_k

    log_ratio = log_k1 - log_k
    total = log_k1
    log_x = math.log(x)
    for k in range(1, n):
        v = mu + k
        # log(2v/x + K_{v-1}/K_v); the ratio K_v/K_{v-1} >= 1 for v >= 1/2.
        log_ratio = (
            math.log(2.0 * v) - log_x + math.log1p(math.exp(-log_ratio) * x / (2.0 * v))
        )
        total += log_ratio
    return total


def bessel_k(nu, x=None):
    """K_nu(x) for real order and positive argument.

    Raises :class:`OutOfRangeError` when the value overflows a double (tiny
    ``x`` with large ``|nu|``); :func:`log_bessel_k` is always finite.
    """
    value = log_bessel_k(nu, x)
    if value > _LOG_DBL_MAX:
        pt = _as_point(nu, x)
        raise OutOfRangeError(
            f"K_{pt.nu}({pt.x}) overflows (log value {value:.6g}); use log_bessel_k"
        )
    return math.exp(value)
