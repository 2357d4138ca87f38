"""Brute-force truncated Fock-basis simulation of the heralding scheme.

Independent of the closed forms: states are built from photon-number
amplitudes, the splitter is a per-block matrix exponential and position
data come from Hermite-function synthesis.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.linalg import expm
from scipy.special import eval_hermite

from .phase_space import make_grid, negativity_of, row_blocks
from .scheme import ImpossibleOutcome, SchemeParams, derived_coefficients, herald_probability, output_wavefunction

PROBABILITY_FLOOR = 1e-14


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class FockVector:
    """Photon-number amplitudes; 1-D for one mode, 2-D [k1, k2] for two modes."""

    amplitudes: np.ndarray
    cutoff: int
    truncation_loss: float = 0.0

    @property
    def norm(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def trimmed(self, weight=1e-16):
        """Drop trailing amplitudes whose cumulative weight is below weight."""
        a = self.amplitudes
        tail = np.cumsum(np.abs(a[::-1]) ** 2)[::-1]
        keep = int(np.count_nonzero(tail >= weight)) or 1
        return FockVector(a[:keep].copy(), keep - 1, self.truncation_loss)


def default_cutoff(r):
    """max(60, ceil(10 e^{2r})) rounded up to even."""
    c = max(60, math.ceil(10 * math.exp(2 * r)))
    return c + (c % 2)


def squeezed_vacuum_fock(r, phi, cutoff, loss_tol=1e-8):
    """Squeezed vacuum of the position-space convention, up to a global phase."""
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    amps = np.zeros(cutoff + 1, dtype=complex)
    z = -np.exp(1j * phi) * math.tanh(r)
    term = 1 / math.sqrt(math.cosh(r))
    for m in range(cutoff // 2 + 1):
        amps[2 * m] = term
        # ratio c_{2m+2}/c_{2m} = z sqrt((2m+1)(2m+2)) / (2 (m+1))
        term = term * z * math.sqrt((2 * m + 1) * (2 * m + 2)) / (2 * (m + 1))
    loss = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if loss > loss_tol:
        raise TruncationError(
            f"truncation loss {loss:.3g} exceeds {loss_tol:g}; cutoff >= {required_cutoff(r, loss_tol)} is needed"
        )
    return FockVector(amps, cutoff, loss)


def required_cutoff(r, loss_tol):
    """Smallest even cutoff keeping the squeezed-vacuum truncation loss below loss_tol."""
    t2 = math.tanh(r) ** 2
    weight = 1 / math.cosh(r)
    total = weight
    m = 0
    while 1 - total > loss_tol:
        weight *= t2 * (2 * m + 1) / (2 * m + 2)
        total += weight
        m += 1
        if m > 10_000:
            break
    return 2 * m


def _block_generator(total):
    # a1^dag a2 - a1 a2^dag on |k, total-k>, k = 0..total
    g = np.zeros((total + 1, total + 1))
    k = np.arange(total)
    g[k + 1, k] = np.sqrt((k + 1) * (total - k))
    return g - g.T


def beam_splitter_block(total, t):
    """Unitary of the splitter on the block with fixed total photon number."""
    theta = math.acos(min(1.0, max(0.0, t)))
    return expm(-theta * _block_generator(total))


def beam_splitter_apply(v1, v2, t):
    """Mix two single-mode states; position arguments map to (t x1 + rho x2, -rho x1 + t x2)."""
    if v1.cutoff != v2.cutoff:
        raise ValueError("both inputs need the same cutoff")
    c = v1.cutoff
    size = 2 * c + 1
    out = np.zeros((size, size), dtype=complex)
    a1, a2 = v1.amplitudes, v2.amplitudes
    for total in range(size):
        k = np.arange(max(0, total - c), min(total, c) + 1)
        vin = np.zeros(total + 1, dtype=complex)
        vin[k] = a1[k] * a2[total - k]
        if not np.any(vin):
            continue
        vout = beam_splitter_block(total, t) @ vin
        idx = np.arange(total + 1)
        out[idx, total - idx] = vout
    return FockVector(out, 2 * c, v1.truncation_loss + v2.truncation_loss)


def project_pnrd(state, n):
    """Condition mode 1 on n photons; returns (normalized mode-2 state, probability)."""
    if n > state.cutoff:
        raise ValueError(f"n={n} exceeds the cutoff {state.cutoff}")
    row = state.amplitudes[n, :]
    prob = float(np.sum(np.abs(row) ** 2))
    if prob < PROBABILITY_FLOOR:
        raise ImpossibleOutcome(f"impossible outcome: probability {prob:.3g} for n={n}")
    return FockVector(row / math.sqrt(prob), state.cutoff, state.truncation_loss), prob


def scheme_state(p, cutoff=None, loss_tol=1e-8):
    """Two-mode state after the splitter for the given scheme parameters."""
    cutoff = default_cutoff(p.r) if cutoff is None else cutoff
    v1 = squeezed_vacuum_fock(p.r, 0.0, cutoff, loss_tol)
    v2 = squeezed_vacuum_fock(p.r, p.phi, cutoff, loss_tol)
    return beam_splitter_apply(v1, v2, p.t)


def simulate(p, cutoff=None, loss_tol=1e-8):
    """(conditional mode-2 state, herald probability) for p.n detected photons."""
    return project_pnrd(scheme_state(p, cutoff, loss_tol), p.n)


def photon_distribution(state):
    """Probabilities of every detector outcome n for a two-mode state."""
    return np.sum(np.abs(state.amplitudes) ** 2, axis=1)


def hermite_functions(kmax, x):
    """Normalized Hermite functions psi_0..psi_kmax at x, by the stable recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((kmax + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-x * x / 2)
    if kmax > 0:
        out[1] = math.sqrt(2) * x * out[0]
    for k in range(2, kmax + 1):
        out[k] = math.sqrt(2 / k) * x * out[k - 1] - math.sqrt((k - 1) / k) * out[k - 2]
    return out


def fock_wavefunction(v, x):
    """Position wavefunction of a single-mode Fock vector."""
    amps = v.amplitudes
    return np.tensordot(amps, hermite_functions(len(amps) - 1, x), axes=1)


def two_mode_wavefunction(v, x1, x2):
    a = v.amplitudes
    h1 = hermite_functions(a.shape[0] - 1, x1)
    h2 = hermite_functions(a.shape[1] - 1, x2)
    return np.einsum("ij,i...,j...->...", a, h1, h2)


def direct_projection_integral(p, x_grid):
    """Un-normalized output samples exp(-c x^2) int exp(-a y^2 + b x y) H_n(y) dy by quadrature."""
    co = derived_coefficients(p)
    a, b, c = co.a, co.b, co.c
    if a.real <= 0:
        raise ValueError("projection integral diverges unless Re(a) > 0")
    width = 12 / math.sqrt(a.real)
    out = []
    for x in np.atleast_1d(np.asarray(x_grid, dtype=float)):
        def f(y):
            return np.exp(-a * y * y + b * x * y) * eval_hermite(p.n, y)

        center = (b * x / (2 * a)).real
        lo, hi = center - width - abs(center), center + width + abs(center)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            re, err_re = integrate.quad(lambda y: f(y).real, lo, hi, limit=400, epsabs=1e-15, epsrel=1e-12)
            im, err_im = integrate.quad(lambda y: f(y).imag, lo, hi, limit=400, epsabs=1e-15, epsrel=1e-12)
            scale = integrate.quad(lambda y: abs(f(y)), lo, hi, limit=400)[0]
        if max(err_re, err_im) > 1e-9 * max(abs(re), abs(im)) + 1e-12 * scale:
            raise RuntimeError(f"projection quadrature failed at x={x}: estimate {complex(re, im)}")
        out.append(np.exp(-c * x * x) * complex(re, im))
    return np.array(out)


def moments(v):
    """(<x^2>, <p^2>, <(xp+px)/2>) minus means, for a single-mode Fock vector."""
    c = v.amplitudes
    k = np.arange(len(c))
    a_mean = np.sum(np.conj(c[:-1]) * c[1:] * np.sqrt(k[1:]))
    a2 = np.sum(np.conj(c[:-2]) * c[2:] * np.sqrt(k[2:] * k[1:-1]))
    nbar = float(np.sum(k * np.abs(c) ** 2))
    x_mean = math.sqrt(2) * a_mean.real
    p_mean = math.sqrt(2) * a_mean.imag
    xx = (2 * a2.real + 2 * nbar + 1) / 2 - x_mean ** 2
    pp = (-2 * a2.real + 2 * nbar + 1) / 2 - p_mean ** 2
    xp = a2.imag - x_mean * p_mean
    return xx, pp, xp, nbar


def _wigner_rows(v, xs, ps):
    """W(x_i, p_j) = (1/pi) int psi(x+y) psi*(x-y) exp(-2iyp) dy on a uniform y lattice.

    The wavefunction is synthesized from the amplitudes, so the transform
    is exact up to the lattice sum, which converges spectrally here.
    """
    v = v.trimmed()
    kmax = len(v.amplitudes) - 1
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    support = math.sqrt(2 * kmax + 1) + 10
    pmax = max(1.0, float(np.max(np.abs(ps))))
    dy = min(0.25 / math.sqrt(2 * kmax + 1), math.pi / (4 * pmax))
    half = support + float(np.max(np.abs(xs)))
    y = np.arange(-math.ceil(half / dy), math.ceil(half / dy) + 1) * dy
    phase = np.exp(-2j * np.outer(y, ps)) * (dy / np.pi)
    rows = np.empty((len(xs), len(ps)))
    for i, x in enumerate(xs):
        prod = fock_wavefunction(v, x + y) * np.conj(fock_wavefunction(v, x - y))
        rows[i] = np.real(prod @ phase)
    return rows


def fock_wigner_values(v, x, mom):
    """Wigner function of a pure Fock-basis state at broadcast points (x, mom)."""
    x, mom = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(mom, dtype=float))
    ux, inv = np.unique(x, return_inverse=True)
    up, jnv = np.unique(mom, return_inverse=True)
    table = _wigner_rows(v, ux, up)
    out = table[inv.ravel(), jnv.ravel()].reshape(x.shape)
    return out[()] if out.ndim == 0 else out


def fock_wigner(v, bounds, nx, np_):
    x_min, x_max, p_min, p_max = (float(b) for b in bounds)
    xs = np.linspace(x_min, x_max, nx)
    ps = np.linspace(p_min, p_max, np_)
    rows = _wigner_rows(v, xs, ps)
    return make_grid(lambda X, P: rows, bounds, nx, np_, {"cutoff": v.cutoff})


def _transform_rows(v):
    """Whitened-grid evaluator: direct Wigner transform of the synthesized wavefunction.

    Row i of the whitened grid has fixed x_i = L00 u_i and p linear in v, so
    with y sampled on the x lattice the transform is one matrix product.
    """

    def evaluate(chol, u):
        k = (len(u) - 1) // 2
        d = chol[0, 0] * (u[1] - u[0])
        lattice = np.arange(-2 * k, 2 * k + 1) * d
        psi = fock_wavefunction(v, lattice)
        j = np.arange(-k, k + 1)[None, :]
        y = j[0] * d
        e = np.exp(-2j * np.outer(y, chol[1, 1] * u))
        for rows in row_blocks(len(u)):
            i = np.arange(2 * k + 1)[rows, None]
            prod = psi[i + j + k] * np.conj(psi[i - j + k])
            g = prod * np.exp(-2j * np.outer(chol[1, 0] * u[rows], y)) * (d / np.pi)
            yield np.real(g @ e)

    return evaluate


def fock_negativity(v, tol=1e-5):
    """Wigner negativity of a Fock-basis state, via its position wavefunction."""
    v = v.trimmed()
    xx, pp, xp, nbar = moments(v)
    cov = np.array([[xx, xp], [xp, pp]]) / (2 * nbar + 1)
    return negativity_of(None, cov, math.ceil(nbar), tol, evaluate=_transform_rows(v))


def fock_state(n, cutoff=None):
    cutoff = max(n, 1) if cutoff is None else cutoff
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[n] = 1
    return FockVector(amps, cutoff)


@dataclass(frozen=True)
class Comparison:
    """Closed form versus truncated Fock simulation at one grid point."""

    r: float
    phi: float
    t: float
    n: int
    cutoff: int
    infidelity: float
    probability_error: float
    distribution_deficit: float


_OVERLAP_X = np.linspace(-25.0, 25.0, 8001)


def compare_point(r, phi, t, n_max=4, cutoff=None):
    """Compare output_wavefunction and herald_probability with the Fock simulation for n = 0..n_max."""
    cutoff = default_cutoff(r) if cutoff is None else cutoff
    state = scheme_state(SchemeParams(r, phi, t), cutoff, loss_tol=1.0)
    deficit = 1.0 - float(photon_distribution(state).sum())
    x = _OVERLAP_X
    dx = x[1] - x[0]
    out = []
    for n in range(n_max + 1):
        p = SchemeParams(r, phi, t, n)
        v, prob = project_pnrd(state, n)
        overlap = np.sum(np.conj(output_wavefunction(p)(x)) * fock_wavefunction(v, x)) * dx
        out.append(
            Comparison(r, phi, t, n, cutoff, float(1.0 - abs(overlap) ** 2), prob - herald_probability(p), deficit)
        )
    return out
