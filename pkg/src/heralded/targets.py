"""Cat, squeezed-cat and Fock targets; overlap fidelities with the heralded state."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import eval_hermite

from .scheme import output_wavefunction

KINDS = ("cat", "squeezed_cat", "fock")
PARITIES = ("even", "odd")


@dataclass(frozen=True)
class TargetState:
    """(|alpha,R> +/- |-alpha,R>)/sqrt(N) with |alpha,R> = D(alpha) S(R)|0>, or a Fock state.

    Convention: coherent centre x0 = sqrt(2) alpha; S(R) narrows the
    x-quadrature by e^{-R}.
    """

    kind: str
    alpha: float = 0.0
    R: float = 0.0
    parity: str = "even"
    n: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.parity not in PARITIES:
            raise ValueError(f"parity must be one of {PARITIES}")
        if self.kind == "cat" and self.R != 0:
            raise ValueError("plain cat has R = 0; use kind='squeezed_cat'")
        if self.kind == "fock" and (int(self.n) != self.n or self.n < 0):
            raise ValueError("fock target needs a non-negative integer n")
        if self.kind != "fock" and self.parity == "odd" and self.alpha == 0:
            raise ValueError("odd cat with alpha = 0 is not normalizable")

    @classmethod
    def cat(cls, alpha, parity="odd"):
        return cls("cat", float(alpha), 0.0, parity)

    @classmethod
    def squeezed_cat(cls, alpha, R, parity="odd"):
        return cls("squeezed_cat", float(alpha), float(R), parity)

    @classmethod
    def fock(cls, n):
        return cls("fock", n=int(n), parity="odd" if n % 2 else "even")

    @property
    def sign(self):
        return 1.0 if self.parity == "even" else -1.0

    @property
    def normalization(self):
        """N_{cat+-} = 2(1 +- <alpha,R|-alpha,R>), overlap exp(-2 alpha^2 e^{2R})."""
        if self.kind == "fock":
            return 1.0
        return 2 * (1 + self.sign * math.exp(-2 * self.alpha ** 2 * math.exp(2 * self.R)))

    @property
    def width(self):
        """Rough half-extent of the wavefunction support."""
        if self.kind == "fock":
            return math.sqrt(2 * self.n + 1)
        return math.sqrt(2) * abs(self.alpha) + math.exp(-self.R)


def target_wavefunction(ts, x):
    x = np.asarray(x, dtype=float)
    if ts.kind == "fock":
        n = ts.n
        return (
            np.pi ** -0.25 / math.sqrt(2.0 ** n * math.factorial(n)) * np.exp(-x * x / 2) * eval_hermite(n, x)
        ).astype(complex)
    s2 = math.exp(2 * ts.R)
    x0 = math.sqrt(2) * ts.alpha

    def lobe(center):
        return (s2 / math.pi) ** 0.25 * np.exp(-s2 * (x - center) ** 2 / 2)

    return ((lobe(x0) + ts.sign * lobe(-x0)) / math.sqrt(ts.normalization)).astype(complex)


class QuadratureError(RuntimeError):
    pass


def _overlap(f, g, half_width):
    def part(fn):
        val, err = integrate.quad(fn, -half_width, half_width, limit=500, epsabs=1e-14, epsrel=1e-12)
        if not math.isfinite(val) or err > 1e-9:
            raise QuadratureError(f"overlap quadrature did not converge (estimate {val}, error {err})")
        return val

    re = part(lambda x: np.real(np.conj(f(x)) * g(x)))
    im = part(lambda x: np.imag(np.conj(f(x)) * g(x)))
    return complex(re, im)


def _state_width(psi):
    k = psi.envelope_coeff.real  # exp(k x^2), k < 0
    return math.sqrt(-1 / (2 * k)) * math.sqrt(2 * psi.n + 1)


def fidelity_numeric(p, ts):
    """|<target|psi_out>|^2 by adaptive quadrature."""
    psi = output_wavefunction(p)
    half = 14 * max(_state_width(psi), 1.0) + 2 * ts.width + 8
    ov = _overlap(lambda x: target_wavefunction(ts, x), psi, half)
    return min(1.0, abs(ov) ** 2)


def fidelity_cat_closed(r, t, phi):
    """Fidelity of the n = 1 output with the odd cat of amplitude 2."""
    g2 = (2 * t * math.sqrt(1 - t * t) * math.sin(phi / 2) * math.sinh(r)) ** 2
    return (
        4
        * (g2 + 1) ** 1.5
        * math.exp(-4 * math.tanh(r) * (1 - 2 * t * t * math.sin(phi / 2) ** 2))
        / (math.sinh(4) * math.cosh(r) ** 3)
    )


def _scat_g(r, t, phi):
    e = math.e
    q = (1 - np.exp(1j * phi)) * t * t * math.sinh(r)
    ratio = abs((1 + math.exp(r) * q) / (math.exp(r) * (e ** 2 - 1) * q + math.exp(2 * r) + e ** 2))
    s = math.sin(phi / 2)
    cot2 = (math.cos(phi / 2) / s) ** 2
    root = math.sqrt(
        (1 + 4 * t * t * (1 - t * t) * math.sinh(r) ** 2 * s * s)
        / (cot2 + ((math.exp(2 * r) - 1) * t * t + 1) ** 2)
    )
    return math.exp(r) * ratio * root


def fidelity_scat_closed(r, t, phi):
    """Fidelity of the n = 1 output with the odd squeezed cat alpha = 1/2, R = 1."""
    s = math.sin(phi / 2)
    if s == 0:
        raise ValueError("squeezed-cat fidelity is singular at phi = 0")
    e = math.e
    q = (1 - np.exp(1j * phi)) * t * t * math.sinh(r)
    denom = 1 - 2 * math.exp(r) * math.cosh(r) / (1 + math.exp(r) * q) - e ** 2
    if abs(denom) == 0:
        raise ValueError("singular denominator; perturb the parameters")
    g = _scat_g(r, t, phi)
    coth = 1 / math.tanh(e ** 2 / 4)
    # g^3 / sin^3(phi/2): the envelope width of the output is e^{2r} g^2-ish / sin^2(phi/2)
    return 2 * g ** 3 * e ** 5 * (coth - 1) / s ** 3 * math.exp(-(e ** 4) / 2 * (1 / denom).real)
