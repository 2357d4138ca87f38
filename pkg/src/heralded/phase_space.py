"""Wigner function of the heralded state and its negativity."""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .scheme import (
    _check_possible,
    _degenerate_output_phase,
    _output_kernel,
    _svs_exponent,
    normalization,
)
from .specfun import gen_hermite, two_index_hermite

IMAG_TOL = 1e-10


class NegativityConvergenceError(RuntimeError):
    def __init__(self, message, estimates):
        super().__init__(f"{message}; last estimates {estimates}")
        self.estimates = estimates


@dataclass(frozen=True)
class WignerKernel:
    """Pieces of the Wigner transform integral of the output state.

    W(x,p) = pref * exp(-alpha_w x^2) * int H_n(delta (x+y), chi) H_n(conj(delta) (x-y), conj(chi))
             * exp(-alpha_w y^2 + beta(x,p) y) dy
    with beta(x,p) = -2i (kernel_imag x + p).
    """

    alpha_w: float
    kernel_imag: float
    delta: complex
    chi: complex
    n: int
    prefactor: float

    def beta(self, x, mom):
        return -2j * (self.kernel_imag * np.asarray(x) + np.asarray(mom))

    def __call__(self, x, mom):
        x = np.asarray(x, dtype=float)
        mom = np.asarray(mom, dtype=float)
        al = self.alpha_w
        beta = self.beta(x, mom)
        d, dc = self.delta, np.conj(self.delta)
        h = two_index_hermite(
            self.n,
            self.n,
            d * x + d * beta / (2 * al),
            self.chi + d ** 2 / (4 * al),
            dc * x - dc * beta / (2 * al),
            np.conj(self.chi) + dc ** 2 / (4 * al),
            -abs(d) ** 2 / (2 * al),
        )
        w = self.prefactor * np.exp(-al * x ** 2) * np.sqrt(np.pi / al) * np.exp(beta ** 2 / (4 * al)) * h
        return _real_part(w)


def _real_part(w):
    w = np.asarray(w)
    if np.iscomplexobj(w):
        scale = max(1.0, float(np.max(np.abs(w.real), initial=0.0)))
        if np.max(np.abs(w.imag), initial=0.0) > IMAG_TOL * scale:
            raise ArithmeticError("Wigner function acquired an imaginary part")
        w = w.real
    return w[()] if w.ndim == 0 else w


def wigner_kernel(p):
    """Two-index Hermite representation of the Wigner transform (non-degenerate case)."""
    _check_possible(p)
    if p.degenerate:
        raise ValueError("wigner_kernel needs gamma > 0; use the Gaussian form")
    r, phi, t = p.r, p.phi, p.t
    k = _output_kernel(p)
    xi = p.xi
    cot = math.cos(phi / 2) / math.sin(phi / 2)
    amp2 = abs(math.exp(r) * complex(math.exp(2 * r), cot) / xi)
    return WignerKernel(
        alpha_w=k.real,
        kernel_imag=k.imag,
        delta=complex(-2 * math.exp(r) * p.gamma / xi),
        chi=complex(math.tanh(r) * (2 * (1 - t * t) * math.sin(phi / 2) / xi - 1)),
        n=p.n,
        prefactor=amp2 / (math.pi * normalization(p)),
    )


def _gaussian_envelope(p):
    """(A_xx, A_pp, A_xp) with W ~ exp(-(A_xx x^2 + A_pp p^2 + 2 A_xp x p))."""
    if p.degenerate:
        kappa, _ = _svs_exponent(p.r, _degenerate_output_phase(p))
        u, v = kappa.real, kappa.imag
        return u + v * v / u, 1 / u, v / u
    g2 = p.gamma ** 2
    xi2 = abs(p.xi) ** 2
    e2r = math.exp(2 * p.r)
    return (
        ((g2 + 1) ** 2 + p.eta ** 2) * e2r / (xi2 * (g2 + 1)),
        xi2 / (e2r * (g2 + 1)),
        p.eta / (g2 + 1),
    )


def wigner_gaussian(p, x, mom):
    """Wigner function for the separable (gamma == 0) configuration."""
    kappa, _ = _svs_exponent(p.r, _degenerate_output_phase(p))
    u, v = kappa.real, kappa.imag
    x = np.asarray(x, dtype=float)
    mom = np.asarray(mom, dtype=float)
    return np.exp(-u * x ** 2 - (mom + v * x) ** 2 / u) / np.pi


def wigner_at(p, x, mom):
    """Closed-form Wigner function W_n(x, p); broadcasts over x and mom."""
    _check_possible(p)
    if p.degenerate:
        return wigner_gaussian(p, x, mom)
    r, phi, t, n = p.r, p.phi, p.t, p.n
    x = np.asarray(x, dtype=float)
    mom = np.asarray(mom, dtype=float)
    g = p.gamma
    g2 = g * g
    xi = p.xi
    s2 = math.sin(phi / 2)
    cot2 = (math.cos(phi / 2) / s2) ** 2
    pref = math.sqrt((cot2 + math.exp(4 * r)) / (math.pi * (g2 + 1))) / normalization(p)
    axx, app, axp = _gaussian_envelope(p)
    env = np.exp(-(axx * x ** 2 + app * mom ** 2 + 2 * axp * x * mom))
    u = -2 * g / (g2 + 1) * (
        (xi - 2 * t * t * s2 * math.sinh(2 * r)) * math.exp(r) * x + 1j * xi * math.exp(-r) * mom
    )
    # conj of the offset that pairs with u; the e^{+i phi} form only agrees for n <= 1
    v = -(t * t + np.exp(-1j * phi) * (1 - t * t)) * math.tanh(r) / (g2 + 1)
    total = np.zeros(np.broadcast(x, mom).shape)
    coeff = 1.0  # C(n,k)^2 k!
    ratio = -2 * g2 / (g2 + 1)
    for k in range(n + 1):
        total = total + coeff * ratio ** k * np.abs(gen_hermite(n - k, u, v)) ** 2
        coeff *= (n - k) ** 2 / (k + 1)
    w = pref * env * total
    return w[()] if w.ndim == 0 else w


def envelope_covariance(p):
    """Covariance of the Gaussian envelope of W (a 2x2 array in (x, p))."""
    axx, app, axp = _gaussian_envelope(p)
    m = np.array([[axx, axp], [axp, app]])
    return np.linalg.inv(2 * m)


@dataclass
class WignerGrid:
    x_min: float
    x_max: float
    p_min: float
    p_max: float
    nx: int
    np: int
    values: np.ndarray  # shape (nx, np), values[i, j] = W(x_i, p_j)
    params: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dp(self):
        return (self.p_max - self.p_min) / (self.np - 1)

    @property
    def xs(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ps(self):
        return np.linspace(self.p_min, self.p_max, self.np)

    @property
    def normalization(self):
        return float(np.sum(self.values) * self.dx * self.dp)

    @property
    def negativity(self):
        return float(np.sum(np.abs(self.values)) * self.dx * self.dp - 1.0)

    def header(self):
        return {
            "bounds": {"x_min": self.x_min, "x_max": self.x_max, "p_min": self.p_min, "p_max": self.p_max},
            "resolution": {"nx": self.nx, "np": self.np, "dx": self.dx, "dp": self.dp},
            "params": self.params,
            "normalization": self.normalization,
            "warnings": list(self.warnings),
        }

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "p", "W"])
        for i, x in enumerate(self.xs):
            for j, mom in enumerate(self.ps):
                writer.writerow([f"{x:.17g}", f"{mom:.17g}", f"{self.values[i, j]:.17g}"])

    def write_header(self, fh):
        json.dump(self.header(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def make_grid(func, bounds, nx, np_, params=None, norm_tol=1e-4):
    """Evaluate func(X, P) on a rectangular grid and package it."""
    if nx < 2 or np_ < 2:
        raise ValueError("grid needs at least 2 points per axis")
    x_min, x_max, p_min, p_max = (float(b) for b in bounds)
    if not all(math.isfinite(b) for b in (x_min, x_max, p_min, p_max)):
        raise ValueError("grid bounds must be finite")
    if x_max <= x_min or p_max <= p_min:
        raise ValueError("grid bounds must satisfy min < max")
    xs = np.linspace(x_min, x_max, nx)
    ps = np.linspace(p_min, p_max, np_)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    grid = WignerGrid(x_min, x_max, p_min, p_max, nx, np_, np.asarray(func(X, P), dtype=float), dict(params or {}))
    if abs(grid.normalization - 1) > norm_tol:
        grid.warnings.append(
            f"grid normalization {grid.normalization:.9g} deviates from 1 by more than {norm_tol:g}"
        )
    return grid


def wigner_grid(p, bounds, nx, np_):
    """Dense closed-form Wigner grid over bounds = (x_min, x_max, p_min, p_max)."""
    params = {"r": p.r, "phi": p.phi, "t": p.t, "n": p.n}
    return make_grid(lambda X, P: wigner_at(p, X, P), bounds, nx, np_, params)


def _whitened_axes(cov, half_width, step):
    chol = np.linalg.cholesky(cov)
    npts = 2 * int(math.ceil(half_width / step)) + 1
    u = np.linspace(-half_width, half_width, npts)
    return chol, u


BLOCK_SAMPLES = 1 << 20
MAX_AXIS_POINTS = 4001


def row_blocks(n):
    """Slices covering n grid rows in chunks of about BLOCK_SAMPLES samples."""
    rows = max(1, BLOCK_SAMPLES // n)
    return (slice(i, min(i + rows, n)) for i in range(0, n, rows))


def _pointwise(func):
    def evaluate(chol, u):
        for rows in row_blocks(len(u)):
            U, V = np.meshgrid(u[rows], u, indexing="ij")
            yield func(chol[0, 0] * U, chol[1, 0] * U + chol[1, 1] * V)

    return evaluate


def _abs_integral(blocks, chol, h):
    """(int |W|, int W) from row blocks of samples on the whitened square with spacing h.

    Along v the trapezoid rule is applied to |W| with each sign-changing
    segment replaced by the exact integral of the linear interpolant, which
    leaves a clean O(h^2) error suitable for Richardson extrapolation.
    """
    abs_total = total = 0.0
    for w in blocks:
        a = np.abs(w)
        lo, hi = w[:, :-1], w[:, 1:]
        pair = a[:, :-1] + a[:, 1:]
        cross = lo * hi < 0
        seg = np.where(cross, (lo ** 2 + hi ** 2) / np.where(cross, pair, 1.0), pair) * 0.5
        abs_total += float(np.sum(seg))
        total += float(np.sum(w))
    jac = abs(np.linalg.det(chol)) * h * h
    return abs_total * jac, total * jac


def negativity_of(func, cov, n_hint, tol=1e-5, max_refinements=5, initial_step=0.08, evaluate=None):
    """int |W| - 1 for a Wigner function whose Gaussian envelope has covariance cov.

    Integration runs over ±(6 + sqrt(2 n_hint + 1)) envelope standard
    deviations in whitened coordinates. Each round halves the step, widens
    the box by 10% and Richardson-extrapolates the step pair; rounds stop
    once successive extrapolations agree to tol. ``evaluate(chol, u)`` may
    replace pointwise evaluation of ``func``; it yields the whitened grid
    as consecutive row blocks.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    evaluate = evaluate or _pointwise(func)
    half = 6.0 + math.sqrt(2 * n_hint + 1)
    step = initial_step
    history = []
    for _ in range(max_refinements):
        if 2 * half / step > MAX_AXIS_POINTS:
            break
        chol, u = _whitened_axes(cov, half, step)
        coarse, _ = _abs_integral(evaluate(chol, u), chol, u[1] - u[0])
        chol, u = _whitened_axes(cov, half, step / 2)
        fine, mass = _abs_integral(evaluate(chol, u), chol, u[1] - u[0])
        history.append(fine + (fine - coarse) / 3 - 1.0)
        if len(history) > 1 and abs(history[-1] - history[-2]) < tol and abs(mass - 1) < max(tol, 1e-6):
            return history[-1]
        half *= 1.1
        step /= 2
    raise NegativityConvergenceError("Wigner negativity did not converge", history[-2:])


def wigner_negativity(p, tol=1e-5):
    """Wigner negativity int |W| dx dp - 1 of the heralded state."""
    _check_possible(p)
    if p.degenerate:
        return 0.0
    return negativity_of(lambda X, P: wigner_at(p, X, P), envelope_covariance(p), p.n, tol)
