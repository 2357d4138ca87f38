"""Two squeezed vacua on a beam splitter, photon counting on one arm.

Quadrature convention: the vacuum wavefunction is pi^(-1/4) exp(-x^2/2).
"""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import gen_hermite, hyp2f1_coefficients


class ImpossibleOutcome(ValueError):
    """The requested photon count has zero heralding probability."""


def db_to_nepers(db):
    return db * math.log(10) / 20


def nepers_to_db(r):
    return 20 * r / math.log(10)


@dataclass(frozen=True)
class SchemeParams:
    r: float
    phi: float
    t: float
    n: int = 0

    def __post_init__(self):
        for name in ("r", "phi", "t"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.r < 0:
            raise ValueError(f"squeezing r must be >= 0, got {self.r}")
        if not 0 <= self.phi <= math.pi:
            raise ValueError(f"phase phi must lie in [0, pi], got {self.phi}")
        if not 0 <= self.t <= 1:
            raise ValueError(f"transmission t must lie in [0, 1], got {self.t}")
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"photon count n must be a non-negative integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def rho(self):
        return math.sqrt(1 - self.t * self.t)

    @property
    def gamma(self):
        return 2 * self.t * self.rho * math.sin(self.phi / 2) * math.sinh(self.r)

    @property
    def eta(self):
        return self.t ** 2 * math.sin(self.phi) * math.sinh(2 * self.r)

    @property
    def xi(self):
        s, c = math.sin(self.phi / 2), math.cos(self.phi / 2)
        return complex((1 + (math.exp(2 * self.r) - 1) * self.t ** 2) * s, c)

    @property
    def degenerate(self):
        """True when the two output arms are separable (gamma == 0)."""
        return self.gamma == 0.0

    def with_n(self, n):
        return SchemeParams(self.r, self.phi, self.t, n)


@dataclass(frozen=True)
class DerivedCoefficients:
    a: complex
    b: complex
    c: complex
    xi: complex
    gamma: float
    eta: float


def _svs_exponent(r, phi):
    # Psi_svs ~ exp(-kappa x^2 / 2)
    d = math.cosh(2 * r) - math.cos(phi) * math.sinh(2 * r)
    return complex(1, math.sin(phi) * math.sinh(2 * r)) / d, d


def squeezed_vacuum_wavefunction(r, phi, x):
    kappa, d = _svs_exponent(r, phi)
    x = np.asarray(x, dtype=float)
    return np.pi ** -0.25 * d ** -0.25 * np.exp(-0.5 * kappa * x ** 2)


def derived_coefficients(p):
    """Gaussian-integral parameters a, b, c together with xi, gamma and eta.

    The output is exp(-c x^2) * int exp(-a y^2 + b x y) H_n(y) dy up to
    normalization. With this sign of b the integrand is the direct
    beam-splitter construction after y -> -y, i.e. a global (-1)^n.
    """
    r, phi, t = p.r, p.phi, p.t
    kappa, _ = _svs_exponent(r, phi)
    e2r = math.exp(2 * r)
    a = 0.5 * (1 + e2r * t ** 2 - (t ** 2 - 1) * kappa)
    s2, c2 = math.sin(phi / 2), math.cos(phi / 2)
    b = (math.exp(4 * r) - 1) * t * p.rho * s2 / complex(e2r * s2, c2)
    c = 0.5 * (t ** 2 * kappa - e2r * (t ** 2 - 1))
    return DerivedCoefficients(a=a, b=b, c=c, xi=p.xi, gamma=p.gamma, eta=p.eta)


@dataclass(frozen=True)
class ClosedFormWavefunction:
    """psi(x) = norm_factor * exp(envelope_coeff x^2) * H_n(hermite_linear x, hermite_offset)."""

    norm_factor: complex
    envelope_coeff: complex
    hermite_linear: complex
    hermite_offset: complex
    n: int

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return (
            self.norm_factor
            * np.exp(self.envelope_coeff * x ** 2)
            * gen_hermite(self.n, self.hermite_linear * x, self.hermite_offset)
        )


def _output_kernel(p):
    """Complex K with envelope exp(-K x^2 / 2) for the non-degenerate output."""
    q = (1 - np.exp(1j * p.phi)) * p.t ** 2 * math.sinh(p.r)
    return (math.exp(p.r) - q) / (math.exp(-p.r) + q)


def _degenerate_output_phase(p):
    # gamma == 0: the surviving arm carries the input it would see without mixing
    return p.phi if p.t == 1.0 else 0.0


def _check_possible(p):
    if p.degenerate and (p.n % 2 == 1 or (p.r == 0 and p.n > 0)):
        raise ImpossibleOutcome(
            f"impossible outcome: n={p.n} cannot be heralded at r={p.r}, phi={p.phi}, t={p.t}"
        )


def output_wavefunction(p):
    """Normalized heralded state of the unmeasured arm (global phase unspecified)."""
    _check_possible(p)
    if p.degenerate:
        kappa, d = _svs_exponent(p.r, _degenerate_output_phase(p))
        return ClosedFormWavefunction(
            norm_factor=complex(np.pi ** -0.25 * d ** -0.25),
            envelope_coeff=-0.5 * kappa,
            hermite_linear=0j,
            hermite_offset=0j,
            n=0,
        )
    r, phi, t = p.r, p.phi, p.t
    xi = p.xi
    cot = math.cos(phi / 2) / math.sin(phi / 2)
    pref = np.sqrt(math.exp(r) * complex(math.exp(2 * r), cot) / xi)
    chi = math.tanh(r) * (2 * (1 - t * t) * math.sin(phi / 2) / xi - 1)
    return ClosedFormWavefunction(
        norm_factor=complex(pref / math.sqrt(normalization(p))),
        envelope_coeff=complex(-0.5 * _output_kernel(p)),
        hermite_linear=complex(-2 * math.exp(r) * p.gamma / xi),
        hermite_offset=complex(chi),
        n=p.n,
    )


def normalization(p):
    """Squared norm of the un-normalized closed-form output wavefunction.

    The (2 gamma^2/(gamma^2+1))^n prefactor is folded into the terminating
    2F1 so that each term carries gamma^(2n-4k) >= 0 and gamma -> 0 is finite.
    """
    if math.sin(p.phi / 2) == 0:
        raise ValueError("normalization is undefined at phi = 0 (prefactor diverges)")
    r, n = p.r, p.n
    g2 = p.gamma ** 2
    cot2 = (math.cos(p.phi / 2) / math.sin(p.phi / 2)) ** 2
    w = (math.sinh(r) ** 2 - g2) / math.cosh(r) ** 2
    series = sum(ck * g2 ** (n - 2 * k) * w ** k for k, ck in enumerate(hyp2f1_coefficients(n)))
    return (
        math.sqrt(math.pi)
        * math.factorial(n)
        * (2 / (g2 + 1)) ** n
        * math.sqrt((cot2 + math.exp(4 * r)) / (g2 + 1))
        * series
    )


def svs_photon_probability(r, n):
    """|<n|SVS(r)>|^2, independent of the squeezing phase."""
    if n % 2:
        return 0.0
    m = n // 2
    # (2m)! / (4^m m!^2) by ratios
    coeff = 1.0
    for j in range(m):
        coeff *= (2 * j + 1) / (2 * j + 2)
    return coeff * math.tanh(r) ** n / math.cosh(r)


def herald_probability(p):
    """Probability that the detector reports exactly n photons."""
    if p.degenerate:
        return svs_photon_probability(p.r, p.n)
    r, phi, n = p.r, p.phi, p.n
    denom = (
        2 ** n
        * math.factorial(n)
        * math.exp(r)
        * math.cosh(r)
        * math.sqrt(math.pi * (math.cosh(2 * r) - math.cos(phi) * math.sinh(2 * r)))
    )
    return math.sin(phi / 2) * normalization(p) / denom
