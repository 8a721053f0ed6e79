"""P1, Q1 and their z-derivatives.

Two representations are provided: truncated Laurent series in z whose
coefficients are q-series, and numeric evaluators.  The Lambert evaluators
converge in the strip ``|Re z| < 2 pi Im(tau)``; the theta evaluator is valid
everywhere off the pole lattice and is used for global periodicity checks.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import comb, factorial

import mpmath

from .modforms import eisenstein_E, eisenstein_F
from .qseries import FracQSeries, MIN_EVAL_IM, qs_add, qs_eval, qs_rescale, qs_scale

__all__ = [
    "ZLaurentSeries",
    "StripError",
    "p1_series",
    "q1_series",
    "zl_add",
    "zl_scale",
    "zl_rescale_tau",
    "zl_eval",
    "p1_lambert_eval",
    "q1_lambert_eval",
    "p1_theta_eval",
    "q1_theta_eval",
]


class StripError(ValueError):
    pass


@dataclass(frozen=True)
class ZLaurentSeries:
    """``sum_d terms[d] z^d`` for ``-max_pole <= d <= z_order``."""

    terms: dict
    z_order: int
    max_pole: int

    def coeff(self, d: int) -> FracQSeries:
        return self.terms.get(d, FracQSeries.zero())

    def exponents(self) -> list[int]:
        return sorted(d for d, s in self.terms.items() if not s.is_zero)

    def __eq__(self, other):
        if not isinstance(other, ZLaurentSeries):
            return NotImplemented
        return self.z_order == other.z_order and self.exponents() == other.exponents() and all(
            self.coeff(d) == other.coeff(d) for d in self.exponents()
        )


def _laurent(m: int, z_order: int, q_order: int, series) -> ZLaurentSeries:
    if m < 0:
        raise ValueError("derivative order must be non-negative")
    # the pole of the m-th derivative of -1/z carries a factor m!
    terms = {-(m + 1): FracQSeries.constant((-1) ** (m + 1) * factorial(m), q_order)}
    k = 1
    while 2 * k - m - 1 <= z_order:
        if 2 * k - 1 >= m:
            c = factorial(m) * comb(2 * k - 1, m)
            terms[2 * k - m - 1] = qs_scale(series(2 * k, q_order), c)
        k += 1
    return ZLaurentSeries({d: s for d, s in terms.items() if d <= z_order}, z_order, m + 1)


def p1_series(m: int, z_order: int, q_order: int) -> ZLaurentSeries:
    return _laurent(m, z_order, q_order, eisenstein_E)


def q1_series(m: int, z_order: int, q_order: int) -> ZLaurentSeries:
    return _laurent(m, z_order, q_order, eisenstein_F)


def zl_add(a: ZLaurentSeries, b: ZLaurentSeries) -> ZLaurentSeries:
    z_order = min(a.z_order, b.z_order)
    keys = set(a.terms) | set(b.terms)
    terms = {d: qs_add(a.coeff(d), b.coeff(d)) for d in keys if d <= z_order}
    return ZLaurentSeries(terms, z_order, max(a.max_pole, b.max_pole))


def zl_scale(a: ZLaurentSeries, c) -> ZLaurentSeries:
    return ZLaurentSeries({d: qs_scale(s, c) for d, s in a.terms.items()}, a.z_order, a.max_pole)


def zl_rescale_tau(a: ZLaurentSeries, m: int, q_order: int) -> ZLaurentSeries:
    """Substitute tau -> m tau in every coefficient, keeping ``q_order`` terms."""
    return ZLaurentSeries(
        {d: qs_rescale(s, m).truncate(q_order) for d, s in a.terms.items()}, a.z_order, a.max_pole
    )


def zl_eval(a: ZLaurentSeries, z: complex, tau: complex, min_im: float = MIN_EVAL_IM) -> complex:
    total = 0j
    for d, s in a.terms.items():
        val, _ = qs_eval(s, tau, min_im)
        total += val * complex(z) ** d
    return total


def _check(z: complex, tau: complex) -> tuple[complex, complex]:
    z, tau = complex(z), complex(tau)
    if tau.imag < MIN_EVAL_IM:
        raise StripError("evaluation region too close to real axis for truncation guarantee")
    if abs(z.real) >= 2 * cmath.pi * tau.imag:
        raise StripError("outside Lambert convergence strip")
    return z, tau


def _pole_part(m: int, z: complex) -> complex:
    # sum_{n>=1} n^m e^{nz}, continued analytically as a rational function of e^z
    return complex(mpmath.polylog(-m, mpmath.exp(z)))


def p1_lambert_eval(z: complex, tau: complex, m: int = 0, n_max: int = 60) -> tuple[complex, float]:
    """Returns ``(value, |last term|)`` of the m-th z-derivative of P1."""
    z, tau = _check(z, tau)
    q = cmath.exp(2j * cmath.pi * tau)
    total = (0.5 if m == 0 else 0) + _pole_part(m, z)
    last = 0.0
    for n in range(1, n_max + 1):
        qn = q ** n
        term = (n ** m * cmath.exp(n * z) - (-n) ** m * cmath.exp(-n * z)) * qn / (1 - qn)
        total += term
        last = abs(term)
    return total, last


def q1_lambert_eval(z: complex, tau: complex, m: int = 0, n_max: int = 60) -> tuple[complex, float]:
    z, tau = _check(z, tau)
    q = cmath.exp(2j * cmath.pi * tau)
    total = (0.5 if m == 0 else 0) + _pole_part(m, z)
    last = 0.0
    for n in range(1, n_max + 1):
        qn = q ** n
        term = ((-n) ** m * cmath.exp(-n * z) - n ** m * cmath.exp(n * z)) * qn / (1 + qn)
        total += term
        last = abs(term)
    return total, last


def _p1_theta(z, tau):
    nome = mpmath.exp(1j * mpmath.pi * tau)
    u = z / 2j
    return 0.5j * mpmath.jtheta(1, u, nome, 1) / mpmath.jtheta(1, u, nome)


def p1_theta_eval(z: complex, tau: complex, m: int = 0) -> complex:
    """P1^{(m)} via the logarithmic derivative of the Jacobi theta function."""
    z, tau = mpmath.mpc(z), mpmath.mpc(tau)
    if m == 0:
        return complex(_p1_theta(z, tau))
    return complex(mpmath.diff(lambda w: _p1_theta(w, tau), z, m))


def q1_theta_eval(z: complex, tau: complex, m: int = 0) -> complex:
    f = lambda w, t: _p1_theta(w, t)
    z, tau = mpmath.mpc(z), mpmath.mpc(tau)
    if m == 0:
        return complex(2 * f(z, 2 * tau) - f(z, tau))
    return complex(mpmath.diff(lambda w: 2 * f(w, 2 * tau) - f(w, tau), z, m))
