"""Special functions: error function, Hermite polynomials, generalized E_nu."""
from __future__ import annotations

import numpy as np
from scipy import special


class DomainError(ValueError):
    pass


def erf(x):
    """Error function (double precision, vectorized)."""
    return special.erf(x)


def hermite(k: int, x):
    """Physicists' Hermite polynomial H_k(x) by the three-term recurrence."""
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise DomainError(f"Hermite index must be a nonnegative integer, got {k!r}")
    k = int(k)
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if k == 0:
        return h_prev if x.ndim else float(h_prev)
    h = 2.0 * x
    for j in range(1, k):
        h_prev, h = h, 2.0 * x * h - 2.0 * j * h_prev
    return h if x.ndim else float(h)


def expint(nu: float, z):
    """Generalized exponential integral E_nu(z) = int_1^inf exp(-z t) t^-nu dt, z > 0.

    Uses E_nu(z) = z^(nu-1) Gamma(1-nu, z).  When 1-nu <= 0 and nu is not an
    integer, Gamma(a, z) is raised to positive a with
    Gamma(a, z) = (Gamma(a+1, z) - z^a e^-z) / a.
    """
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0)):
        raise DomainError("expint is restricted to real z > 0")
    nu = float(nu)
    if nu == round(nu) and nu >= 0:
        out = special.expn(int(nu), z)
    else:
        out = z ** (nu - 1.0) * _upper_gamma(1.0 - nu, z)
    return out if z.ndim else float(out)


def _upper_gamma(a: float, z: np.ndarray) -> np.ndarray:
    if a > 0:
        return special.gamma(a) * special.gammaincc(a, z)
    return (_upper_gamma(a + 1.0, z) - z ** a * np.exp(-z)) / a
