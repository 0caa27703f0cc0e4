"""Integer arithmetic for critical lengths.

A length L is critical when 3*(L/2pi)^2 = k^2 + k*l + l^2 for positive
integers k, l.  Everything here is exact integer work over the Eisenstein
ring Z[w], w = e^{2 pi i/3}: counting the representations of n by the form
a^2 + a*b + b^2, enumerating the (k, l) pairs, and classifying both the
pairs and the resulting lengths.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

MAX_FACTOR_N = 10**12
_TRIAL_LIMIT = 10**6

# pair classes
S1 = "S1"  # k = l
S2 = "S2"  # k = l (mod 3), k != l
S3 = "S3"  # k != l (mod 3)

# new length classes
NOT_CRITICAL = "not_critical"
N1 = "N1"  # the unique pair is diagonal
N2 = "N2"  # every pair is S3
N3 = "N3"  # some pair is S2

# legacy length classes (by number of normalized pairs / presence of a diagonal)
OLD_C = "C"
OLD_N1 = "N1"
OLD_N2 = "N2"
OLD_N3 = "N3"
OLD_N4 = "N4"


class InconsistentCountError(RuntimeError):
    """Enumeration disagrees with the counting formula (internal sanity)."""


@dataclass(frozen=True)
class EisensteinInt:
    """a + b*w with w = e^{2 pi i/3}; norm a^2 - a*b + b^2."""

    a: int
    b: int

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def __mul__(self, other: "EisensteinInt") -> "EisensteinInt":
        # w^2 = -1 - w
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return EisensteinInt(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2 - b1 * b2)


def norm(z: EisensteinInt) -> int:
    return z.norm()


@dataclass(frozen=True)
class IntFactorization:
    """n = 3^alpha * prod p_i^beta_i * prod q_j^gamma_j, p = 1, q = 2 (mod 3)."""

    n: int
    alpha: int
    p_factors: tuple[tuple[int, int], ...]
    q_factors: tuple[tuple[int, int], ...]

    def recompose(self) -> int:
        out = 3**self.alpha
        for p, e in self.p_factors:
            out *= p**e
        for q, e in self.q_factors:
            out *= q**e
        return out


def _is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, rng: random.Random) -> int:
    """Brent-cycle Pollard rho; returns a nontrivial factor of composite odd n."""
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> IntFactorization:
    """Exact factorization of n split by residue mod 3; supports n <= 1e12."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n > MAX_FACTOR_N:
        raise OverflowError(f"n={n} exceeds the supported bound {MAX_FACTOR_N}")
    factors: dict[int, int] = {}
    m = n
    for d in (2, 3):
        while m % d == 0:
            factors[d] = factors.get(d, 0) + 1
            m //= d
    d = 5
    while d * d <= m and d <= _TRIAL_LIMIT:
        for dd in (d, d + 2):
            while m % dd == 0:
                factors[dd] = factors.get(dd, 0) + 1
                m //= dd
        d += 6
    if m > 1:
        # leftover is prime, a prime square, or a semiprime (m <= 1e12)
        stack = [m]
        rng = random.Random(0xE15E)
        while stack:
            v = stack.pop()
            if v == 1:
                continue
            if _is_probable_prime(v):
                factors[v] = factors.get(v, 0) + 1
                continue
            r = math.isqrt(v)
            if r * r == v:
                stack.extend((r, r))
                continue
            g = _pollard_rho(v, rng)
            stack.extend((g, v // g))
    alpha = factors.pop(3, 0)
    p_fac = tuple(sorted((p, e) for p, e in factors.items() if p % 3 == 1))
    q_fac = tuple(sorted((q, e) for q, e in factors.items() if q % 3 == 2))
    out = IntFactorization(n=n, alpha=alpha, p_factors=p_fac, q_factors=q_fac)
    assert out.recompose() == n
    return out


def is_perfect_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


def count_solutions(n: int) -> tuple[int, int]:
    """(Z, N): integer and positive-ordered solution counts of a^2+ab+b^2 = n."""
    fac = factorize(n)
    if any(e % 2 for _, e in fac.q_factors):
        return 0, 0
    z = 6
    for _, e in fac.p_factors:
        z *= e + 1
    nn = z // 6
    if is_perfect_square(n):
        nn -= 1
    return z, nn


def pair_class(k: int, l: int) -> str:
    if k == l:
        return S1
    return S2 if (k - l) % 3 == 0 else S3


@dataclass(frozen=True)
class Pair:
    """Normalized solution (k >= l >= 1) of k^2 + k*l + l^2 = n."""

    k: int
    l: int
    s_class: str = field(default="")

    def __post_init__(self):
        if not (self.k >= self.l >= 1):
            raise ValueError(f"need k >= l >= 1, got ({self.k}, {self.l})")
        if not self.s_class:
            object.__setattr__(self, "s_class", pair_class(self.k, self.l))

    @property
    def n(self) -> int:
        return self.k * self.k + self.k * self.l + self.l * self.l

    def to_json_dict(self) -> dict:
        return {"k": self.k, "l": self.l, "s_class": self.s_class}


def enumerate_pairs(n: int) -> list[Pair]:
    """All normalized pairs for n, cross-checked against the counting formula."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    pairs = []
    kmax = math.isqrt(4 * n // 3)
    for k in range(1, kmax + 1):
        disc = 4 * n - 3 * k * k
        if disc < 0:
            break
        r = math.isqrt(disc)
        if r * r != disc or (r - k) % 2:
            continue
        l = (r - k) // 2
        if 1 <= l <= k:
            pairs.append(Pair(k, l))
    _, n_count = count_solutions(n)
    t = 1 if n % 3 == 0 and is_perfect_square(n // 3) else 0
    if 2 * len(pairs) != n_count + t:
        raise InconsistentCountError(
            f"n={n}: enumerated {len(pairs)} pairs, formula gives (N+t)/2 = {(n_count + t) / 2}"
        )
    return pairs


def length_of_index(n: int) -> float:
    """L = 2*pi*sqrt(n/3)."""
    return 2.0 * math.pi * math.sqrt(n / 3.0)


def index_of_length(L: float, tol: float | None = None) -> int | None:
    """Integer n with 3*(L/2pi)^2 = n within tol, or None."""
    if L <= 0:
        raise ValueError("L must be positive")
    x = 3.0 * (L / (2.0 * math.pi)) ** 2
    n = round(x)
    if tol is None:
        tol = 1e-9 * max(1.0, x)
    if n >= 1 and abs(x - n) <= tol:
        return n
    return None


@dataclass(frozen=True)
class CriticalIndex:
    """Full classification record for the index n = 3*(L/2pi)^2."""

    n: int
    pairs: tuple[Pair, ...]
    Z: int
    N: int
    dim_M: int
    new_class: str
    old_class: str
    length: float

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "length": self.length,
            "Z": self.Z,
            "N": self.N,
            "dim_M": self.dim_M,
            "new_class": self.new_class,
            "old_class": self.old_class,
            "pairs": [p.to_json_dict() for p in self.pairs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def classify_index(n: int) -> CriticalIndex:
    pairs = tuple(enumerate_pairs(n))
    z, nn = count_solutions(n)
    # dim M = N(n): consistency against the pair list, not assumed
    dim = 2 * sum(1 for p in pairs if p.k > p.l) + sum(1 for p in pairs if p.k == p.l)
    if dim != nn:
        raise InconsistentCountError(f"n={n}: dim from pairs {dim} != N {nn}")
    classes = {p.s_class for p in pairs}
    if not pairs:
        new = NOT_CRITICAL
    elif S2 in classes:
        new = N3
    elif classes == {S1}:
        new = N1
    else:
        new = N2
    diagonal = any(p.k == p.l for p in pairs)
    if not pairs:
        old = OLD_C
    elif len(pairs) == 1:
        old = OLD_N1 if diagonal else OLD_N2
    else:
        old = OLD_N4 if diagonal else OLD_N3
    return CriticalIndex(
        n=n,
        pairs=pairs,
        Z=z,
        N=nn,
        dim_M=dim,
        new_class=new,
        old_class=old,
        length=length_of_index(n),
    )


def classify_length(L: float, tol: float | None = None) -> CriticalIndex | None:
    n = index_of_length(L, tol)
    return None if n is None else classify_index(n)
