"""High-frequency kernel B(tau, x) and the quantities built on it.

B couples two transfer fractions (at frequencies tau and tau - p) with the
derivative of the trapping profile phi:

    B(tau, x) = F(tau, x) * F~(tau, x; p) * phi'(x).

Its x-integral obeys  integral_B(tau) = E/tau^2 + o(tau^-2)  with the same
constant E as the trapping direction; the scan utilities here measure that
convergence and the decay orders of the grouped sums Z1, Z2, Z3.  The
frequency-side quadratic functional

    Q_M = int u_hat(tau) conj(u_hat(tau - p)) integral_B(tau) dtau

uses the half-line Fourier transform u_hat(tau) = (2 pi)^{-1/2}
int_0^inf u(t) e^{-i tau t} dt; under that convention the prefactor
relating Q_M to its time-domain form int int y^2 e^{-ipt} phi' dx dt is
exactly 1 (convolution theorem; locked by the cross-check in sim).

Measured sharp rates (documented because they are stronger than the coarse
O-bounds quoted alongside the definitions): the scaled residual
tau^2 * integral_B - E decays like tau^(-2/3), and Z1 + Z2 = 2 Re Z1 decays
like tau^(-10/3) since Z2(tau) = conj(Z1(tau)) exactly on the real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .modes import TrappingDirection
from .roots import (
    POLE_REL_TOL,
    PoleError,
    mu,
    mu_tilde,
    scaled_fraction,
    solve_cubic,
    solve_cubic_shifted,
)

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(64)


class QuadratureError(RuntimeError):
    """Panel refinement stalled before reaching the error target."""


class ResolutionError(ValueError):
    """Sampled signal cannot resolve the modulation frequency p."""


def B_at(tau: float, x, td: TrappingDirection):
    """Kernel value(s) at real tau; raises PoleError on the discrete pole set."""
    x = np.asarray(x, dtype=float)
    lam = solve_cubic(tau).roots
    lt = solve_cubic_shifted(tau, td.p).roots
    f1, lev1 = scaled_fraction(lam, td.L, x)
    f2, lev2 = scaled_fraction(lt, td.L, x)
    if lev1 < POLE_REL_TOL or lev2 < POLE_REL_TOL:
        raise PoleError(f"transfer denominator cancels at tau = {tau}")
    return f1 * f2 * td.phi.derivative(x, 1)


def _integral_B_raw(tau: float, td: TrappingDirection, max_panels: int = 2048):
    """Composite 64-node Gauss-Legendre over [0, L], panels doubled to target."""
    lam = solve_cubic(tau).roots
    lt = solve_cubic_shifted(tau, td.p).roots
    L = td.L
    waves = max(1.0, abs(tau) ** (1.0 / 3.0) * 2.0 * L / (2.0 * math.pi))
    panels = max(4, int(waves / 8.0) + 1)
    prev = None
    pole = False
    sup_b = 0.0
    while panels <= max_panels:
        edges = np.linspace(0.0, L, panels + 1)
        mid = 0.5 * (edges[:-1, None] + edges[1:, None])
        half = 0.5 * (edges[1:, None] - edges[:-1, None])
        xs = (mid + half * _GAUSS_NODES[None, :]).ravel()
        ws = (half * _GAUSS_WEIGHTS[None, :]).ravel()
        f1, lev1 = scaled_fraction(lam, L, xs)
        f2, lev2 = scaled_fraction(lt, L, xs)
        pole = lev1 < POLE_REL_TOL or lev2 < POLE_REL_TOL
        if pole:
            raise PoleError(f"transfer denominator cancels at tau = {tau}")
        bv = f1 * f2 * td.phi.derivative(xs, 1)
        sup_b = float(np.abs(bv).max())
        total = complex(np.sum(ws * bv))
        if prev is not None and abs(total - prev) <= max(
            1e-12 * abs(total), 1e-13 * sup_b * L
        ):
            return total, sup_b
        prev = total
        panels *= 2
    raise QuadratureError(f"no convergence at tau = {tau} with {max_panels} panels")


def integral_B(tau: float, td: TrappingDirection) -> complex:
    """int_0^L B(tau, x) dx; pole nodes replaced by the tau +- delta average."""
    try:
        val, _ = _integral_B_raw(tau, td)
        return val
    except PoleError:
        delta = 1e-4 * (1.0 + abs(tau))
        lo, _ = _integral_B_raw(tau - delta, td)
        hi, _ = _integral_B_raw(tau + delta, td)
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BScanRow:
    tau: float
    integral_B: complex
    leading: complex        # E / tau^2
    residual: complex       # integral_B - leading
    scaled_residual: complex  # tau^2 * integral_B - E
    pole_flag: bool


def bscan_row(tau: float, td: TrappingDirection) -> BScanRow:
    flagged = False
    try:
        value, _ = _integral_B_raw(tau, td)
    except PoleError:
        flagged = True
        delta = 1e-4 * (1.0 + abs(tau))
        value = 0.5 * (_integral_B_raw(tau - delta, td)[0] + _integral_B_raw(tau + delta, td)[0])
    lead = td.E / tau**2
    return BScanRow(
        tau=tau,
        integral_B=value,
        leading=lead,
        residual=value - lead,
        scaled_residual=tau**2 * value - td.E,
        pole_flag=flagged,
    )


@dataclass(frozen=True)
class BScanResult:
    rows: tuple[BScanRow, ...]
    residual_slope: float
    e_estimate: complex
    e_reference: complex

    @property
    def e_relative_gap(self) -> float:
        return abs(self.e_estimate - self.e_reference) / abs(self.e_reference)


def bscan(td: TrappingDirection, tau_min: float, tau_max: float, points: int) -> BScanResult:
    """Log-spaced scan; slope fit of the scaled residual; E from the top decade."""
    if not (0 < tau_min < tau_max) or points < 2:
        raise ValueError("need 0 < tau_min < tau_max and at least 2 points")
    taus = np.geomspace(tau_min, tau_max, points)
    rows = tuple(bscan_row(float(t), td) for t in taus)
    resid = np.array([abs(r.scaled_residual) for r in rows])
    keep = resid > 0
    slope = float(np.polyfit(np.log(taus[keep]), np.log(resid[keep]), 1)[0])
    top = [r for r in rows if r.tau >= tau_max / 10.0]
    e_est = np.mean([r.tau**2 * r.integral_B for r in top])
    return BScanResult(rows=rows, residual_slope=slope, e_estimate=complex(e_est),
                       e_reference=complex(td.E))


# published constants quoted with the asymptotic grouping ("the paper's values")
PUBLISHED_COEFS = {
    "C11": -2.0 / 3.0, "C12": 1.0 / math.sqrt(3.0), "C13": 2.0 / 9.0, "C14": -2.0 / 9.0,
    "C21": -2.0 / 3.0, "C22": 1.0 / math.sqrt(3.0), "C23": 2.0 / 9.0, "C24": -2.0 / 9.0,
}


@dataclass(frozen=True)
class CoefTable:
    """Expansion coefficients computed from their mu / mu~ sum formulas."""

    C11: complex
    C12: complex
    C13: complex
    C14: complex
    C21: complex
    C22: complex
    C23: complex
    C24: complex

    def as_dict(self) -> dict[str, complex]:
        return {k: getattr(self, k) for k in PUBLISHED_COEFS}


def coef_table() -> CoefTable:
    m = {j: mu(j) for j in (1, 2, 3)}
    t = {j: mu_tilde(j) for j in (1, 2, 3)}

    def s(a, b):
        return m[a] + t[b]

    return CoefTable(
        C11=-1 / s(3, 3) ** 2 + 1 / s(3, 2) ** 2 + 1 / s(2, 3) ** 2,
        C12=1 / s(3, 3) ** 3 - 1 / s(3, 2) ** 3 - 1 / s(2, 3) ** 3,
        C13=-2 / (3 * m[3] * t[3] * s(3, 3) ** 2)
        + 2 / (3 * m[3] * t[2] * s(3, 2) ** 2)
        + 2 / (3 * m[2] * t[3] * s(2, 3) ** 2),
        C14=-1 / s(3, 3) ** 4 + 1 / s(3, 2) ** 4 + 1 / s(2, 3) ** 4,
        C21=1 / s(1, 1) ** 2 - 1 / s(1, 2) ** 2 - 1 / s(2, 1) ** 2,
        C22=-1 / s(1, 1) ** 3 + 1 / s(1, 2) ** 3 + 1 / s(2, 1) ** 3,
        C23=2 / (3 * m[1] * t[1] * s(1, 1) ** 2)
        - 2 / (3 * m[1] * t[2] * s(1, 2) ** 2)
        - 2 / (3 * m[2] * t[1] * s(2, 1) ** 2),
        C24=1 / s(1, 1) ** 4 - 1 / s(1, 2) ** 4 - 1 / s(2, 1) ** 4,
    )


def coef_table_report() -> list[dict]:
    """Computed mu-sum values next to the published constants."""
    table = coef_table().as_dict()
    out = []
    for name, pub in PUBLISHED_COEFS.items():
        val = table[name]
        out.append(
            {
                "name": name,
                "computed": val,
                "published": pub,
                "abs_gap": abs(val - pub),
                "matches_published": abs(val - pub) <= 1e-14,
            }
        )
    return out


def cancellation_check(td: TrappingDirection) -> dict:
    """Residuals of the two eta identities under the adopted sign convention.

    sum eta_{j+2}^3 (eta_{j+1}-eta_j) = 0 (any zero-sum triple), and
    sum (eta_{j+1}-eta_j) eta_{j+2}^2 = +i p sum (eta_{j+1}-eta_j)/eta_{j+2}
    (from eta^3 + eta - i p = 0).
    """
    eta = np.asarray(td.eta)
    diff = np.array([eta[1] - eta[0], eta[2] - eta[1], eta[0] - eta[2]])
    lead = np.array([eta[2], eta[0], eta[1]])
    first = np.sum(lead**3 * diff)
    second = np.sum(diff * lead**2) - 1j * td.p * np.sum(diff / lead)
    return {
        "pair": (td.pair.k, td.pair.l),
        "cubic_sum_residual": abs(complex(first)),
        "quadratic_sum_residual": abs(complex(second)),
        "ok": abs(complex(first)) < 1e-12 and abs(complex(second)) < 1e-12,
    }


def z_terms(tau: float, td: TrappingDirection) -> tuple[complex, complex, complex]:
    """Direct evaluation of the three grouped sums Z1, Z2, Z3 at real tau.

    Z3's small denominator lambda_2 + lambda~_2 is computed through the exact
    identity  lambda_2 + lambda~_2 = -i p / (lambda_2^2 + lambda~_2^2 -
    lambda_2 lambda~_2 + 1)  to dodge catastrophic cancellation.
    """
    lam = solve_cubic(tau).roots
    lt = solve_cubic_shifted(tau, td.p).roots
    eta = np.asarray(td.eta)
    diff = np.array([eta[1] - eta[0], eta[2] - eta[1], eta[0] - eta[2]])
    lead = np.array([eta[2], eta[0], eta[1]])
    z1 = np.sum(
        lead
        * diff
        * (
            1.0 / (lam[2] + lt[2] + lead)
            - 1.0 / (lam[2] + lt[1] + lead)
            - 1.0 / (lam[1] + lt[2] + lead)
        )
    )
    z2 = np.sum(
        lead
        * diff
        * (
            -1.0 / (lam[0] + lt[0] + lead)
            + 1.0 / (lam[0] + lt[1] + lead)
            + 1.0 / (lam[1] + lt[0] + lead)
        )
    )
    eps = -1j * td.p / (lam[1] ** 2 + lt[1] ** 2 - lam[1] * lt[1] + 1.0)
    z3 = (np.exp(eps * td.L) - 1.0) * np.sum(lead * diff / (eps + lead))
    return complex(z1), complex(z2), complex(z3)


def half_line_fourier(u: np.ndarray, dt: float, taus: np.ndarray) -> np.ndarray:
    """u_hat(tau) = (2 pi)^{-1/2} int_0^inf u e^{-i tau t} dt, trapezoid in t.

    u is sampled at t = 0, dt, 2 dt, ...; for compactly supported smooth u
    (vanishing at both ends of its sample window) the rule is superalgebraic.
    """
    u = np.asarray(u, dtype=float)
    taus = np.asarray(taus, dtype=float)
    t = np.arange(u.size) * dt
    w = np.full(u.size, dt)
    w[0] *= 0.5
    w[-1] *= 0.5
    uw = u * w
    out = np.empty(taus.shape, dtype=complex)
    block = max(1, 4_000_000 // max(u.size, 1))
    for i in range(0, taus.size, block):
        chunk = taus[i : i + block]
        out[i : i + block] = np.exp(-1j * np.outer(chunk, t)) @ uw
    return out / math.sqrt(2.0 * math.pi)


def sobolev_norm(u: np.ndarray, dt: float, s: float) -> float:
    """||u||_{H^s(R)} of the zero extension, s <= 0, via FFT quadrature.

    With u_hat as in half_line_fourier, the squared norm is
    int |u_hat|^2 (1 + tau^2)^s dtau over the FFT frequency grid; at s = 0
    this reduces exactly to the discrete Parseval identity.
    """
    if s > 0:
        raise ValueError("defined for s <= 0")
    u = np.asarray(u, dtype=float)
    n = 1 << max(12, (4 * u.size - 1).bit_length())
    uh = np.fft.fft(u, n) * dt / math.sqrt(2.0 * math.pi)
    taus = 2.0 * math.pi * np.fft.fftfreq(n, d=dt)
    dtau = 2.0 * math.pi / (n * dt)
    val = np.sum(np.abs(uh) ** 2 * (1.0 + taus**2) ** s) * dtau
    return float(math.sqrt(val))


@dataclass(frozen=True)
class QmFrequencyResult:
    value: complex
    tau_cut: float
    tau_step: float
    n_nodes: int
    n_pole_nodes: int


def qm_frequency(
    u: np.ndarray,
    dt: float,
    td: TrappingDirection,
    tau_step: float = 0.02,
    rel_cut: float = 1e-7,
) -> QmFrequencyResult:
    """Frequency-side Q_M = int u_hat(tau) conj(u_hat(tau-p)) integral_B dtau.

    The tau grid is uniform with spacing tau_step, truncated where the
    product |u_hat(tau) u_hat(tau-p)| falls below rel_cut of its peak
    (integral_B supplies an extra tau^-2 decay beyond the cut).
    """
    u = np.asarray(u, dtype=float)
    if u.size < 8:
        raise ValueError("signal too short")
    span = (u.size - 1) * dt
    if abs(td.p) * span < 2.0 * math.pi:
        raise ResolutionError(
            f"sample window {span:.3g} shorter than one beat period {2 * math.pi / abs(td.p):.3g}"
        )
    if not np.any(u != 0.0):
        return QmFrequencyResult(0.0 + 0.0j, 0.0, tau_step, 0, 0)
    # expand the cut until the spectrum has decayed
    cut = 20.0
    while True:
        probe = np.abs(half_line_fourier(u, dt, np.array([-cut, cut])))
        peak = np.abs(half_line_fourier(u, dt, np.linspace(-5, 5, 41))).max()
        if probe.max() <= rel_cut * peak or cut > math.pi / dt:
            break
        cut *= 1.5
    taus = np.arange(-cut, cut + tau_step / 2.0, tau_step)
    u1 = half_line_fourier(u, dt, taus)
    u2 = half_line_fourier(u, dt, taus - td.p)
    rows = [bscan_row(float(t), td) for t in taus]
    ib = np.array([r.integral_B for r in rows])
    integrand = u1 * np.conj(u2) * ib
    value = complex(np.trapezoid(integrand, taus))
    return QmFrequencyResult(
        value=value,
        tau_cut=float(cut),
        tau_step=tau_step,
        n_nodes=taus.size,
        n_pole_nodes=sum(r.pole_flag for r in rows),
    )
