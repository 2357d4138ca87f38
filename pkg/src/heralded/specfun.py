"""Special functions used by the closed forms.

Sums are accumulated from coefficients built by term ratios and H_n by
its three-term recurrence, so no factorial is ever formed explicitly. Every function accepts numpy arrays
for its continuous arguments and broadcasts them.
"""

import numpy as np

MAX_ORDER = 60


def _check_order(n, name="n"):
    if int(n) != n or n < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {n!r}")
    if n > MAX_ORDER:
        raise ValueError(f"{name}={n} exceeds the supported order {MAX_ORDER}")
    return int(n)


def hermite_coefficients(n):
    """Coefficients n! / ((n-2k)! k!) for k = 0..n//2, as floats."""
    n = _check_order(n)
    coeffs = [1.0]
    for k in range(n // 2):
        coeffs.append(coeffs[-1] * (n - 2 * k) * (n - 2 * k - 1) / (k + 1))
    return coeffs


def gen_hermite(n, x, y):
    """Two-variable Hermite polynomial H_n(x, y).

    H_n(x, y) = n! sum_k x^(n-2k) y^k / ((n-2k)! k!). The physicists'
    polynomial is recovered as H_n(2x, -1). Evaluated by the recurrence
    H_{k+1} = x H_k + 2 k y H_{k-1}; the explicit series cancels badly
    in the oscillatory region (y/x^2 < 0).
    """
    n = _check_order(n)
    x = np.asarray(x)
    y = np.asarray(y)
    dtype = np.result_type(x, y, float)
    prev = np.ones(np.broadcast(x, y).shape, dtype=dtype)
    cur = prev * x
    if n == 0:
        cur = prev
    for k in range(1, n):
        prev, cur = cur, x * cur + (2 * k) * y * prev
    return cur[()] if cur.ndim == 0 else cur


def two_index_hermite(m, n, x, y, w, z, t):
    """Two-index Hermite polynomial H_{m,n}(x, y, w, z | t)."""
    m = _check_order(m, "m")
    n = _check_order(n, "n")
    coeff = 1.0
    total = 0
    for k in range(min(m, n) + 1):
        total = total + coeff * np.asarray(t) ** k * gen_hermite(m - k, x, y) * gen_hermite(n - k, w, z)
        coeff *= (m - k) * (n - k) / (k + 1)
    return total


def gauss_hermite_integral(m, n, d1, e1, f1, d2, e2, f2, alpha, beta):
    """Closed form of the integral

        I_{m,n} = int H_m(d1 x + e1, f1) H_n(d2 x + e2, f2) exp(-alpha x^2 + beta x) dx

    Requires Re(alpha) > 0. Principal branch for the square root.
    """
    alpha = np.asarray(alpha, dtype=complex)
    if np.any(alpha.real <= 0):
        raise ValueError("gauss_hermite_integral diverges unless Re(alpha) > 0")
    beta = np.asarray(beta, dtype=complex)
    pref = np.sqrt(np.pi / alpha) * np.exp(beta ** 2 / (4 * alpha))
    h = two_index_hermite(
        m,
        n,
        e1 + d1 * beta / (2 * alpha),
        f1 + d1 ** 2 / (4 * alpha),
        e2 + d2 * beta / (2 * alpha),
        f2 + d2 ** 2 / (4 * alpha),
        d1 * d2 / (2 * alpha),
    )
    return pref * h


def hyp2f1_coefficients(n):
    """Series coefficients of 2F1((1-n)/2, -n/2; 1; z), up to the terminating index."""
    n = _check_order(n)
    a, b = (1 - n) / 2, -n / 2
    coeffs = [1.0]
    k = 0
    while True:
        nxt = coeffs[-1] * (a + k) * (b + k) / ((1 + k) * (k + 1))
        if nxt == 0.0:
            return coeffs
        coeffs.append(nxt)
        k += 1


def hyp2f1_terminating(n, z):
    """Gauss hypergeometric 2F1((1-n)/2, -n/2; 1; z) as a finite polynomial in z."""
    z = np.asarray(z)
    total = 0
    for k, ck in enumerate(hyp2f1_coefficients(n)):
        total = total + ck * z ** k
    return total
