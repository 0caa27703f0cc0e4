"""Eigenmodes of the stationary KdV operator at critical lengths.

For a pair (k, l) with s = k^2 + k*l + l^2 and L = 2*pi*sqrt(s/3), the
operator phi -> -phi''' - phi' on {phi(0)=phi(L)=0, phi'(0)=phi'(L)} has an
eigenvalue i*p with p = (2k+l)(k-l)(k+2l) / (3*sqrt(3)*s^{3/2}) and explicit
three-exponential eigenfunctions.  Two boundary signatures occur:

* "type 1": phi and phi' vanish at both ends (these span the unreachable
  subspace M of the boundary-controlled linear system);
* "type 2": phi vanishes at both ends but phi'(0) = phi'(L) != 0; exists
  exactly when 2k+l is a positive multiple of 3.

The trapping construction uses the root triple of eta^3 + eta - i*p = 0 that
also satisfies e^{eta*L} = 1,

    eta_1 = -2*pi*i*(2k+l)/(3L),  eta_2 = eta_1 + 2*pi*i*k/L,
    eta_3 = eta_2 + 2*pi*i*l/L,

the combination phi(x) = sum_j (eta_{j+1}-eta_j) e^{eta_{j+2} x} (all four
boundary traces vanish by telescoping), the constant

    E = (1/9) p^2 L sum_j (eta_{j+1}-eta_j)/eta_{j+2}
      = -8 pi^3 p k l (k+l) / (9 L^2),

and the time-periodic profile Psi(t,x) = Re(E) Re{phi e^{-ipt}} +
Im(E) Im{phi e^{-ipt}}, an exact solution of the linear equation.

Sign convention: the eta triple above satisfies eta^3 + eta - i*p = 0 (direct
substitution), which is the convention under which phi(x) e^{-ipt} solves
y_t + y_xxx + y_x = 0.  All identities in this package are stated under it.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .arith import S2, Pair, classify_index, length_of_index, pair_class

BOUNDARY_TOL = 1e-12


class DegeneratePairError(ValueError):
    """Diagonal pair (k = l): an eta root vanishes, the construction degenerates."""


class PairClassError(ValueError):
    """Operation requires a different pair class (e.g. S2 only)."""


class ModeKind(str, Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"
    ETA_COMBINATION = "eta_combination"


def eigenvalue(k: int, l: int) -> float:
    """p(k,l) = (2k+l)(k-l)(k+2l) / (3*sqrt(3)*(k^2+kl+l^2)^(3/2))."""
    s = k * k + k * l + l * l
    return (2 * k + l) * (k - l) * (2 * l + k) / (3.0 * math.sqrt(3.0) * s**1.5)


@dataclass(frozen=True)
class ModeSpec:
    """Three-term exponential mode sum c_j exp(e_j x) on [0, L]."""

    kind: ModeKind
    L: float
    lam: float
    exponents: tuple[complex, complex, complex]
    coefficients: tuple[complex, complex, complex]

    def __post_init__(self):
        for e in self.exponents:
            if abs(e.real) > 1e-14:
                raise ValueError(f"exponent {e} is not purely imaginary")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for c, e in zip(self.coefficients, self.exponents):
            out += c * np.exp(e * x)
        return out

    def derivative(self, x, order: int = 1):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for c, e in zip(self.coefficients, self.exponents):
            out += c * e**order * np.exp(e * x)
        return out

    def ode_residual(self, x):
        """phi''' + phi' + i*lam*phi at x (zero for exact modes)."""
        return self.derivative(x, 3) + self.derivative(x, 1) + 1j * self.lam * self.value(x)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "L": self.L,
            "lambda": self.lam,
            "exponents": [[e.real, e.imag] for e in self.exponents],
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _theta(k: int, l: int) -> tuple[float, float, float]:
    s = k * k + k * l + l * l
    r = math.sqrt(3.0) / (3.0 * math.sqrt(s))
    return r * (2 * k + l), -r * (k + 2 * l), r * (l - k)


def type1_mode(k: int, l: int) -> ModeSpec:
    """Eigenfunction with all four boundary traces zero."""
    t1, t2, t3 = _theta(k, l)
    return ModeSpec(
        kind=ModeKind.TYPE1,
        L=length_of_index(k * k + k * l + l * l),
        lam=eigenvalue(k, l),
        exponents=(1j * t1, 1j * t2, 1j * t3),
        coefficients=(-1.0, -k / l, (k + l) / l),
    )


def type2_mode(k: int, l: int) -> ModeSpec:
    """Eigenfunction with equal nonzero Neumann traces; needs 3 | 2k+l."""
    if (2 * k + l) % 3 != 0:
        raise PairClassError(f"({k},{l}): 2k+l = {2 * k + l} is not a multiple of 3")
    t1, t2, t3 = _theta(k, l)
    return ModeSpec(
        kind=ModeKind.TYPE2,
        L=length_of_index(k * k + k * l + l * l),
        lam=eigenvalue(k, l),
        exponents=(1j * t1, 1j * t2, 1j * t3),
        coefficients=(1.0, -1.0, 0.0),
    )


def neumann_trace(k: int, l: int) -> complex:
    """phi~'(0) = phi~'(L) = i*sqrt(3)*(k+l)/sqrt(s) for the type-2 mode."""
    s = k * k + k * l + l * l
    return 1j * math.sqrt(3.0) * (k + l) / math.sqrt(s)


def derivative_mode_check(k: int, l: int, samples: int = 1001) -> dict:
    """Check that the derivative of the type-1 mode has the type-2 signature.

    f = phi' satisfies the same ODE, vanishes at both ends, and has
    f'(0) = f'(L) = 3k(k+l)/s.
    """
    if (2 * k + l) % 3 != 0:
        raise PairClassError(f"({k},{l}): 2k+l = {2 * k + l} is not a multiple of 3")
    phi = type1_mode(k, l)
    s = k * k + k * l + l * l
    L = phi.L
    expected = 3.0 * k * (k + l) / s
    x = np.linspace(0.0, L, samples)
    dphi = ModeSpec(
        kind=ModeKind.TYPE2,
        L=L,
        lam=phi.lam,
        exponents=phi.exponents,
        coefficients=tuple(c * e for c, e in zip(phi.coefficients, phi.exponents)),
    )
    sup = np.abs(dphi.value(x)).max()
    return {
        "pair": (k, l),
        "second_derivative_expected": expected,
        "second_derivative_0": complex(phi.derivative(0.0, 2)),
        "second_derivative_L": complex(phi.derivative(L, 2)),
        "endpoint_values": (complex(dphi.value(0.0)), complex(dphi.value(L))),
        "ode_residual_max": float(np.abs(dphi.ode_residual(x)).max() / max(sup, 1e-300)),
    }


def unreachable_basis(n: int) -> list[Callable[[np.ndarray], np.ndarray]]:
    """Real L^2 basis of the unreachable subspace M for index n.

    One function per diagonal pair (the imaginary part vanishes identically),
    two per strict pair; the list length equals dim M.
    """
    idx = classify_index(n)
    fns: list[Callable[[np.ndarray], np.ndarray]] = []
    xs = np.linspace(0.0, idx.length, 257)
    for pr in idx.pairs:
        mode = type1_mode(pr.k, pr.l)

        def re_fn(x, mode=mode):
            return np.real(mode.value(x))

        def im_fn(x, mode=mode):
            return np.imag(mode.value(x))

        fns.append(re_fn)
        sup_re = np.abs(np.real(mode.value(xs))).max()
        sup_im = np.abs(np.imag(mode.value(xs))).max()
        if sup_im > 1e-12 * max(sup_re, 1.0):
            fns.append(im_fn)
    return fns


def eta_roots(k: int, l: int) -> tuple[complex, complex, complex]:
    """Roots of eta^3 + eta - i*p = 0 with e^{eta L} = 1 (purely imaginary)."""
    L = length_of_index(k * k + k * l + l * l)
    e1 = -2j * math.pi * (2 * k + l) / (3.0 * L)
    e2 = e1 + 2j * math.pi * k / L
    e3 = e2 + 2j * math.pi * l / L
    return (e1, e2, e3)


def phi_from_eta(k: int, l: int) -> ModeSpec:
    """phi(x) = sum_j (eta_{j+1} - eta_j) e^{eta_{j+2} x}; all traces vanish."""
    eta = eta_roots(k, l)
    if any(abs(e) < 1e-14 for e in eta):
        raise DegeneratePairError(f"({k},{l}): diagonal pair gives a vanishing eta root")
    return ModeSpec(
        kind=ModeKind.ETA_COMBINATION,
        L=length_of_index(k * k + k * l + l * l),
        lam=eigenvalue(k, l),
        exponents=(eta[2], eta[0], eta[1]),
        coefficients=(eta[1] - eta[0], eta[2] - eta[1], eta[0] - eta[2]),
    )


def eta_ratio_sum(k: int, l: int) -> complex:
    """sum_j (eta_{j+1} - eta_j)/eta_{j+2} = -27 k l (k+l) / ((k+2l)(2k+l)(k-l))."""
    eta = eta_roots(k, l)
    if any(abs(e) < 1e-14 for e in eta):
        raise DegeneratePairError(f"({k},{l}): diagonal pair gives a vanishing eta root")
    return sum((eta[(j + 1) % 3] - eta[j]) / eta[(j + 2) % 3] for j in range(3))


@dataclass(frozen=True)
class TrappingDirection:
    """Explicit time-periodic direction blocking small-time null control."""

    pair: Pair
    L: float
    p: float
    eta: tuple[complex, complex, complex]
    phi: ModeSpec
    E: complex
    E_closed: float
    sum_eta_ratio: complex

    def psi(self, t: float, x) -> np.ndarray:
        """Psi(t, x) = Re(E) Re{phi e^{-ipt}} + Im(E) Im{phi e^{-ipt}}."""
        w = self.phi.value(x) * cmath.exp(-1j * self.p * t)
        return self.E.real * np.real(w) + self.E.imag * np.imag(w)

    def psi_x(self, t: float, x, order: int = 1) -> np.ndarray:
        w = self.phi.derivative(x, order) * cmath.exp(-1j * self.p * t)
        return self.E.real * np.real(w) + self.E.imag * np.imag(w)

    def psi_t(self, t: float, x) -> np.ndarray:
        w = -1j * self.p * self.phi.value(x) * cmath.exp(-1j * self.p * t)
        return self.E.real * np.real(w) + self.E.imag * np.imag(w)

    def pde_residual(self, t: float, x) -> np.ndarray:
        """Psi_t + Psi_xxx + Psi_x, identically zero up to roundoff."""
        return self.psi_t(t, x) + self.psi_x(t, x, 3) + self.psi_x(t, x, 1)

    def to_json_dict(self) -> dict:
        return {
            "pair": self.pair.to_json_dict(),
            "L": self.L,
            "p": self.p,
            "eta": [[e.real, e.imag] for e in self.eta],
            "phi": self.phi.to_json_dict(),
            "E": [self.E.real, self.E.imag],
            "E_closed": self.E_closed,
            "sum_eta_ratio": [self.sum_eta_ratio.real, self.sum_eta_ratio.imag],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def trapping_direction(k: int, l: int) -> TrappingDirection:
    """Build the trapping data for an S2 pair (k = l mod 3, k > l)."""
    cls = pair_class(k, l)
    if cls != S2:
        raise PairClassError(f"({k},{l}) is {cls}; the trapping construction needs S2")
    if k < l:
        raise ValueError(f"pass the normalized pair (k >= l); got ({k},{l})")
    s = k * k + k * l + l * l
    L = length_of_index(s)
    p = eigenvalue(k, l)
    eta = eta_roots(k, l)
    phi = phi_from_eta(k, l)
    ratio = eta_ratio_sum(k, l)
    e_sum = (1.0 / 9.0) * p * p * L * ratio
    e_closed = -8.0 * math.pi**3 * p * k * l * (k + l) / (9.0 * L * L)
    if abs(e_sum - e_closed) > 1e-12 * abs(e_closed):
        raise AssertionError(
            f"E mismatch for ({k},{l}): summation {e_sum} vs closed form {e_closed}"
        )
    return TrappingDirection(
        pair=Pair(k, l),
        L=L,
        p=p,
        eta=eta,
        phi=phi,
        E=e_sum,
        E_closed=e_closed,
        sum_eta_ratio=ratio,
    )
