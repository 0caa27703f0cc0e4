"""Roots of the characteristic cubic and the frequency-domain building blocks.

lambda^3 + lambda + i*tau = 0 governs the spatial exponents of the linear
equation at time frequency tau.  This module solves the cubic (companion
matrix plus Newton polish), tracks the classical large-tau asymptotics

    lambda_j = mu_j tau^{1/3} - tau^{-1/3}/(3 mu_j) + ...,
    mu_j = e^{-i pi/6 - 2 i j pi/3},

and evaluates the boundary functions

    Q = sum (lambda_{j+1}-lambda_j) e^{(lambda_j+lambda_{j+1}) L},
    P = sum lambda_j (e^{lambda_{j+2} L} - e^{lambda_{j+1} L}),
    Xi = -(lambda_2-lambda_1)(lambda_3-lambda_2)(lambda_1-lambda_3),
    G = P/Xi, H = Q/Xi,

plus the control-to-state transfer y_hat = (u_hat/Q) sum (e^{lambda_{j+2}L} -
e^{lambda_{j+1}L}) e^{lambda_j x}.  Because sum lambda_j = 0, the Q above
equals sum (lambda_{j+1}-lambda_j) e^{-lambda_{j+2} L}; all exponentials are
evaluated in a scaled form (common factor e^{lambda_1 L}) whose exponents
have nonpositive real part on the real tau axis, so nothing overflows up to
the supported |tau| <= 1e8.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

MAX_TAU = 1e8
POLE_REL_TOL = 1e-10


class PoleError(ArithmeticError):
    """tau sits (numerically) on the discrete pole set where Q cancels."""


@dataclass(frozen=True)
class RootTriple:
    """Ordered roots (ascending real part, ties by imaginary part)."""

    tau: complex
    roots: tuple[complex, complex, complex]

    def residuals(self) -> tuple[float, float, float]:
        return tuple(abs(r**3 + r + 1j * self.tau) for r in self.roots)

    def vieta_residuals(self) -> tuple[float, float, float]:
        r1, r2, r3 = self.roots
        return (
            abs(r1 + r2 + r3),
            abs(r1 * r2 + r1 * r3 + r2 * r3 - 1.0),
            abs(r1 * r2 * r3 + 1j * self.tau),
        )


def _polished_roots(c0: complex) -> tuple[complex, complex, complex]:
    """Ordered roots of z^3 + z + c0, companion solve plus two Newton steps."""
    r = np.roots([1.0, 0.0, 1.0, c0])
    for _ in range(2):
        f = r**3 + r + c0
        df = 3.0 * r**2 + 1.0
        step = np.where(np.abs(df) > 0, f / np.where(df == 0, 1.0, df), 0.0)
        r = r - step
    ordered = sorted(r, key=lambda z: (z.real, z.imag))
    return (complex(ordered[0]), complex(ordered[1]), complex(ordered[2]))


def solve_cubic(tau: complex) -> RootTriple:
    """Roots of lambda^3 + lambda + i*tau = 0."""
    if abs(tau) > MAX_TAU:
        raise ValueError(f"|tau| = {abs(tau):.3g} exceeds the supported bound {MAX_TAU:.0e}")
    return RootTriple(tau=tau, roots=_polished_roots(1j * tau))


def solve_cubic_shifted(tau: complex, p: float) -> RootTriple:
    """Roots of lambda~^3 + lambda~ - i*(conj(tau) - p) = 0, same ordering."""
    if abs(tau) > MAX_TAU:
        raise ValueError(f"|tau| = {abs(tau):.3g} exceeds the supported bound {MAX_TAU:.0e}")
    shifted = RootTriple(tau=tau, roots=_polished_roots(-1j * (np.conj(tau) - p)))
    return shifted


def mu(j: int) -> complex:
    """mu_j = e^{-i pi/6 - 2 i j pi/3}, the cube-root directions of -i."""
    if j not in (1, 2, 3):
        raise ValueError(f"j must be 1, 2 or 3, got {j}")
    return cmath.exp(-1j * math.pi / 6 - 2j * j * math.pi / 3)


def mu_tilde(j: int) -> complex:
    """mu~_j = e^{i pi/6 + 2 i j pi/3} = conj(mu_j)."""
    if j not in (1, 2, 3):
        raise ValueError(f"j must be 1, 2 or 3, got {j}")
    return cmath.exp(1j * math.pi / 6 + 2j * j * math.pi / 3)


def _principal_cbrt(tau: complex) -> complex:
    """Cube root with positive real part (tau near the positive real axis)."""
    return complex(tau) ** (1.0 / 3.0)


def asymptotic_root(j: int, tau: complex) -> complex:
    """Two-term expansion mu_j tau^{1/3} - tau^{-1/3}/(3 mu_j)."""
    m = mu(j)
    c = _principal_cbrt(tau)
    return m * c - 1.0 / (3.0 * m * c)


def asymptotic_root_shifted(j: int, tau: complex, p: float) -> complex:
    """Two-term expansion for the shifted triple, in powers of (conj(tau)-p)."""
    m = mu_tilde(j)
    c = _principal_cbrt(np.conj(tau) - p)
    return m * c - 1.0 / (3.0 * m * c)


def _scaled_q_terms(roots, L: float) -> np.ndarray:
    """Terms of Q * e^{lambda_1 L}; real parts of all exponents are <= 0."""
    l1, l2, l3 = roots
    return np.array(
        [
            (l2 - l1) * np.exp((2 * l1 + l2) * L),
            (l3 - l2) * np.exp((l1 + l2 + l3) * L),
            (l1 - l3) * np.exp((2 * l1 + l3) * L),
        ]
    )


def _scaled_p_terms(roots, L: float) -> np.ndarray:
    """Terms of P * e^{lambda_1 L}."""
    l1, l2, l3 = roots
    return np.array(
        [
            l1 * (np.exp((l1 + l3) * L) - np.exp((l1 + l2) * L)),
            l2 * (np.exp(2 * l1 * L) - np.exp((l1 + l3) * L)),
            l3 * (np.exp((l1 + l2) * L) - np.exp(2 * l1 * L)),
        ]
    )


def _scaled_numerator(roots, L: float, x) -> np.ndarray:
    """f(tau, x) * e^{lambda_1 L} with f = sum (e^{l_{j+2}L}-e^{l_{j+1}L}) e^{l_j x}."""
    l1, l2, l3 = roots
    x = np.asarray(x, dtype=float)
    return (
        np.exp((l1 + l3) * L + l1 * x)
        - np.exp((l1 + l2) * L + l1 * x)
        + np.exp(2 * l1 * L + l2 * x)
        - np.exp((l1 + l3) * L + l2 * x)
        + np.exp((l1 + l2) * L + l3 * x)
        - np.exp(2 * l1 * L + l3 * x)
    )


def scaled_fraction(roots, L: float, x):
    """(f/Q)(x) from the scaled pieces; also return the Q-cancellation level.

    The second value is |sum of scaled Q terms| / max |term|; Q is treated
    as numerically at a pole when it drops below POLE_REL_TOL.
    """
    qt = _scaled_q_terms(roots, L)
    qs = qt.sum()
    level = abs(qs) / max(np.abs(qt).max(), 1e-300)
    return _scaled_numerator(roots, L, x) / qs, level


@dataclass(frozen=True)
class SpectralFns:
    tau: complex
    Q: complex
    P: complex
    Xi: complex
    G: complex
    H: complex
    near_collision: bool
    # overflow-safe pieces: Q = q_scaled * e^{log_scale}, P likewise
    q_scaled: complex
    p_scaled: complex
    log_scale: complex


def spectral_fns(tau: complex, L: float) -> SpectralFns:
    """Q, P, Xi, G, H at tau for interval length L.

    Near a root collision (|Xi| < 1e-10) the G, H values are taken from a
    slightly perturbed tau and the record is flagged; Q, P, Xi stay at the
    requested point.
    """
    triple = solve_cubic(tau)
    r1, r2, r3 = triple.roots
    xi = -(r2 - r1) * (r3 - r2) * (r1 - r3)
    qt = _scaled_q_terms(triple.roots, L)
    pt = _scaled_p_terms(triple.roots, L)
    qs, ps = qt.sum(), pt.sum()
    log_scale = -r1 * L
    scale = np.exp(log_scale) if abs(log_scale.real) < 700 else complex(np.inf)
    q = qs * scale
    p = ps * scale
    near = abs(xi) < 1e-10
    if near:
        delta = 1e-8 * (1.0 + abs(tau))
        pert = spectral_fns(tau + delta, L)
        g, h = pert.G, pert.H
    else:
        g = ps * scale / xi
        h = qs * scale / xi
    return SpectralFns(
        tau=tau, Q=q, P=p, Xi=xi, G=g, H=h,
        near_collision=near, q_scaled=qs, p_scaled=ps, log_scale=log_scale,
    )


def transfer(tau: complex, x, u_hat: complex, L: float):
    """y_hat(tau, x) for Neumann boundary data u_hat; PoleError on the pole set."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -1e-12) or np.any(x > L + 1e-12):
        raise ValueError("x must lie in [0, L]")
    triple = solve_cubic(tau)
    frac, level = scaled_fraction(triple.roots, L, x)
    if level < POLE_REL_TOL:
        raise PoleError(f"Q(tau) cancels to {level:.2e} at tau = {tau}")
    return u_hat * frac


def transfer_boundary_slope(tau: complex, u_hat: complex, L: float) -> complex:
    """d/dx y_hat(tau, 0) = u_hat * P/Q."""
    triple = solve_cubic(tau)
    qt = _scaled_q_terms(triple.roots, L)
    pt = _scaled_p_terms(triple.roots, L)
    qs = qt.sum()
    if abs(qs) / max(np.abs(qt).max(), 1e-300) < POLE_REL_TOL:
        raise PoleError(f"Q(tau) cancels at tau = {tau}")
    return u_hat * pt.sum() / qs


def transfer_ode_residual(tau: complex, x, L: float) -> float:
    """Relative residual of (d^3/dx^3 + d/dx + i tau) applied to f/Q on x."""
    triple = solve_cubic(tau)
    l1, l2, l3 = triple.roots
    x = np.asarray(x, dtype=float)
    qs = _scaled_q_terms(triple.roots, L).sum()
    val = np.zeros(x.shape, dtype=complex)
    for lj, lo1, lo2 in ((l1, l2, l3), (l2, l3, l1), (l3, l1, l2)):
        coef = np.exp((lo2 + l1) * L) - np.exp((lo1 + l1) * L)
        val += (lj**3 + lj + 1j * tau) * coef * np.exp(lj * x)
    frac = _scaled_numerator(triple.roots, L, x) / qs
    return float(np.abs(val / qs).max() / max(np.abs(frac).max(), 1e-300))
