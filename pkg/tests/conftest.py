import warnings

import numpy as np
import pytest

from susy_forge.confluent import SingularGammaWarning


def adaptive_simpson(f, a, b, tol=1e-13, depth=60):
    """Recursive adaptive Simpson with Richardson correction; independent of the grid code."""
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return rec(a, m, fa, flm, fm, left, tol / 2, depth - 1) + rec(m, b, fm, frm, fb, right, tol / 2, depth - 1)

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)


@pytest.fixture
def quiet_singular():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingularGammaWarning)
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
