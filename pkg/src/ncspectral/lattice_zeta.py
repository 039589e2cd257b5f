"""Lattice zeta functions over Z^n \\ {0} and their residue calculus.

The Epstein function Z_n(s) = sum' |k|^{-s} is continued to the whole plane
through the incomplete-gamma decomposition of its theta integral, split
symmetrically at t = 1:

    pi^{-s/2} Gamma(s/2) Z_n(s)
        = sum'_k [ G(s/2, pi|k|^2) + G((n-s)/2, pi|k|^2) ] - 2/s - 2/(n-s),

with G(a, x) = Gamma(a, x) / x^a.  The representation is entire except for
the explicit pole at s = n and manifestly symmetric under s -> n - s.

Residues of polynomial-weighted sums sum' P(k) |k|^{-s-r} are pure surface
integrals: a homogeneous term of degree d contributes its sphere moment
exactly when r = n + d and nothing otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

_MP_DPS = 30


class PoleError(ArithmeticError):
    """Raised when a zeta function is evaluated at its pole."""

    def __init__(self, message, residue=None):
        super().__init__(message)
        self.residue = residue


class ToleranceError(RuntimeError):
    """A series or quadrature failed to reach the requested tolerance."""


class AssumptionError(RuntimeError):
    """An operation needs a hypothesis the caller has not asserted."""


# ---------------------------------------------------------------------------
# lattice shell counts


def radial_counts(n: int, mmax: int) -> np.ndarray:
    """Number of k in Z^n with |k|^2 = m, for m = 0..mmax.

    Built coordinate by coordinate with the sparse square kernel, so large
    cutoffs stay cheap.
    """
    squares = [(0, 1)]
    j = 1
    while j * j <= mmax:
        squares.append((j * j, 2))
        j += 1
    counts = np.zeros(mmax + 1, dtype=np.int64)
    counts[0] = 1
    for _ in range(n):
        acc = np.zeros(mmax + 1, dtype=np.int64)
        for sq, weight in squares:
            acc[sq:] += weight * counts[: mmax + 1 - sq]
        counts = acc
    return counts


# ---------------------------------------------------------------------------
# Epstein zeta


class EpsteinEvaluator:
    """Meromorphic continuation of Z_n(s), n in 1..6.

    The shell cutoff is grown adaptively until two successive evaluations
    agree within a tenth of the target tolerance; shells beyond the cutoff
    are suppressed like exp(-pi m), so the reported bound is conservative.
    """

    def __init__(self, n: int, tol: float = 1e-10):
        if not 1 <= n <= 6:
            raise ValueError(f"Epstein dimension must be in 1..6, got {n}")
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        self.n = n
        self.tol = tol
        self.split = 1.0  # symmetric theta split point
        self._mmax = 16
        self._counts = radial_counts(n, self._mmax)
        self.last_error_bound = 0.0

    def _grow(self, mmax: int) -> None:
        if mmax > self._mmax:
            self._mmax = mmax
            self._counts = radial_counts(self.n, self._mmax)

    def _theta_shells(self, s: complex, lo: int, hi: int):
        """sum over shells lo..hi of r(m) [G(s/2, pi m) + G((n-s)/2, pi m)]."""
        self._grow(hi)
        n = self.n
        a1 = mp.mpc(s) / 2
        a2 = (n - mp.mpc(s)) / 2
        acc = mp.mpc(0)
        for m in range(lo, hi + 1):
            cnt = int(self._counts[m])
            if cnt == 0:
                continue
            x = mp.pi * m
            g1 = mp.gammainc(a1, x) * mp.power(x, -a1)
            g2 = mp.gammainc(a2, x) * mp.power(x, -a2)
            acc += cnt * (g1 + g2)
        return acc

    # increments below this are working-precision noise, not evidence
    _BOUND_FLOOR = 1e-25

    def value(self, s: complex) -> complex:
        """Continued value of Z_n(s); raises PoleError at s = n."""
        s = complex(s)
        n = self.n
        if abs(s - n) < 1e-12:
            raise PoleError(f"Z_{n} has its unique pole at s = {n}",
                            residue=self.residue())
        if 0.1 * self.tol <= self._BOUND_FLOOR:
            raise ToleranceError(
                f"tolerance {self.tol:g} is below the evaluator's "
                f"certifiable floor")
        with mp.workdps(_MP_DPS):
            ms = mp.mpc(s)
            prev = None
            block = self._theta_shells(s, 1, 16)
            mmax = 16
            while True:
                # stable form: Z = pi^{s/2} [ (s/2) I - 1 - s/(n-s) ] / Gamma(s/2+1)
                bracket = (ms / 2) * block - 1 - ms / (n - ms)
                val = mp.power(mp.pi, ms / 2) * bracket * mp.rgamma(ms / 2 + 1)
                if prev is not None:
                    bound = max(float(abs(val - prev)), self._BOUND_FLOOR)
                    if bound < 0.1 * self.tol:
                        self.last_error_bound = bound
                        return complex(val)
                if mmax > 400:
                    raise ToleranceError(
                        f"Epstein evaluation did not converge for s = {s}")
                prev = val
                block += self._theta_shells(s, mmax + 1, mmax + 8)
                mmax += 8

    def residue(self) -> float:
        """Residue of Z_n at its pole s = n: 2 pi^(n/2) / Gamma(n/2)."""
        return 2.0 * math.pi ** (self.n / 2.0) / math.gamma(self.n / 2.0)

    def value_direct(self, s: complex, radius: float) -> complex:
        """Truncated summation plus integral tail; valid for Re(s) > n - 1.

        Independent of the continued path; used as an oracle.
        """
        s = complex(s)
        n = self.n
        m2 = int(radius * radius)
        self._grow(m2)
        m = np.arange(1, m2 + 1, dtype=float)
        weights = self._counts[1: m2 + 1].astype(float)
        partial = np.sum(weights * m ** (-s / 2.0))
        area = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
        tail = area * radius ** (n - s) / (s - n)
        return complex(partial + tail)


_EVALUATORS: dict = {}


def _evaluator(n: int, tol: float = 1e-10) -> EpsteinEvaluator:
    key = (n, tol)
    if key not in _EVALUATORS:
        _EVALUATORS[key] = EpsteinEvaluator(n, tol)
    return _EVALUATORS[key]


def epstein_value(n: int, s: complex, tol: float = 1e-10) -> complex:
    return _evaluator(n, tol).value(s)


def epstein_residue(n: int) -> float:
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def epstein_pole_fit(n: int, offsets=(0.1, 0.05, 0.025), tol: float = 1e-10) -> float:
    """Extrapolate (s - n) Z_n(s) to s = n by a quadratic fit near the pole."""
    ev = _evaluator(n, tol)
    xs = np.array(offsets, dtype=float)
    ys = np.array([(x) * ev.value(n + x).real for x in xs])
    coeffs = np.polyfit(xs, ys, 2)
    return float(coeffs[-1])


# ---------------------------------------------------------------------------
# polynomial-weighted residues


@dataclass
class LatticePoly:
    """Sparse polynomial on Z^n as a list of monomials (exponents, coeff)."""

    n: int
    terms: list = field(default_factory=list)

    def __post_init__(self):
        merged: dict = {}
        for p, c in self.terms:
            p = tuple(int(e) for e in p)
            if len(p) != self.n:
                raise ValueError(f"exponent vector {p} has wrong length for n = {self.n}")
            if any(e < 0 for e in p):
                raise ValueError("exponents must be nonnegative")
            merged[p] = merged.get(p, 0.0) + complex(c)
        self.terms = [(p, c) for p, c in sorted(merged.items()) if c != 0]

    @classmethod
    def monomial(cls, n: int, exponents, coeff=1.0) -> "LatticePoly":
        return cls(n, [(tuple(exponents), coeff)])

    @property
    def degree(self) -> int:
        return max((sum(p) for p, _ in self.terms), default=0)

    def __call__(self, k) -> complex:
        k = np.asarray(k)
        return sum(c * np.prod(np.asarray(k, dtype=float) ** np.array(p))
                   for p, c in self.terms)


def sphere_moment(n: int, p) -> float:
    """Integral of u^p over the unit sphere S^{n-1}; zero for odd exponents."""
    p = tuple(int(e) for e in p)
    if len(p) != n:
        raise ValueError("exponent vector length must equal n")
    if any(e < 0 for e in p):
        raise ValueError("exponents must be nonnegative")
    if any(e % 2 == 1 for e in p):
        return 0.0
    num = 2.0
    for e in p:
        num *= math.gamma((e + 1) / 2.0)
    return num / math.gamma((n + sum(p)) / 2.0)


def sphere_moment_quadrature(n: int, p, points: int = 48) -> float:
    """Product-angle quadrature of u^p over S^{n-1}, n <= 4.

    Gauss-Legendre nodes on the polar angles, midpoint rule on the azimuth
    (exact there, the integrand being a trigonometric polynomial).
    """
    if n > 4:
        raise ValueError("quadrature oracle implemented for n <= 4")
    p = tuple(int(e) for e in p)
    if n == 1:
        # S^0 = two points
        return float((1.0) ** p[0] + (-1.0) ** p[0])
    nodes, weights = np.polynomial.legendre.leggauss(points)
    theta = 0.5 * math.pi * (nodes + 1.0)
    theta_w = 0.5 * math.pi * weights
    nphi = max(64, 2 * (sum(p) + 2))
    phi = (np.arange(nphi) + 0.5) * (2.0 * math.pi / nphi)
    axes = [theta] * (n - 2) + [phi]
    grids = np.meshgrid(*axes, indexing="ij")
    coords = []
    sin_prod = np.ones_like(grids[0])
    for axis in range(n - 1):
        ang = grids[axis]
        coords.append(sin_prod * np.cos(ang))
        sin_prod = sin_prod * np.sin(ang)
    coords.append(sin_prod)
    integrand = np.ones_like(grids[0])
    for x, e in zip(coords, p):
        integrand = integrand * x ** e
    # measure: prod sin^{n-1-i}(theta_i) dtheta_i dphi, with GL weights folded in
    measure = np.ones_like(grids[0])
    for axis in range(n - 2):
        w = theta_w.reshape([-1 if a == axis else 1 for a in range(n - 1)])
        measure = measure * np.sin(grids[axis]) ** (n - 2 - axis) * w
    return float(np.sum(integrand * measure) * (2.0 * math.pi / nphi))


def residue_lattice_sum(n: int, poly: LatticePoly, r: float) -> complex:
    """Res_{s=0} sum'_k P(k) |k|^{-s-r}: sphere moments of the terms with
    degree d = r - n; every other homogeneous term contributes nothing."""
    if poly.n != n:
        raise ValueError("polynomial dimension mismatch")
    total = 0.0 + 0.0j
    for p, c in poly.terms:
        if abs((n + sum(p)) - r) < 1e-9:
            total += c * sphere_moment(n, p)
    return total


def residue_direct_oracle(n: int, poly: LatticePoly, r: float,
                          radius: float = 24.0,
                          offsets=(0.1, 0.05, 0.025)) -> float:
    """Pole-fit of s * sum'_{|k|<=R} P(k)|k|^{-s-r} with integral tail.

    Brute-force companion to residue_lattice_sum; the lattice-vs-integral
    discrepancy is holomorphic at s = 0, so the fit isolates the residue.
    """
    ranges = [np.arange(-int(radius), int(radius) + 1)] * n
    grids = np.meshgrid(*ranges, indexing="ij")
    k2 = sum(g.astype(float) ** 2 for g in grids)
    mask = (k2 > 0) & (k2 <= radius * radius)
    k2m = k2[mask]
    pvals = np.zeros_like(k2m)
    for p, c in poly.terms:
        mono = np.ones_like(k2m)
        for g, e in zip(grids, p):
            if e:
                mono = mono * g[mask].astype(float) ** e
        pvals = pvals + c.real * mono
    svals = np.array(offsets, dtype=float)
    fitted = []
    for s in svals:
        partial = np.sum(pvals * k2m ** (-(s + r) / 2.0))
        # integral tail of the matching-degree part only (the others die)
        tail = 0.0
        for p, c in poly.terms:
            d = sum(p)
            expo = n + d - s - r
            if expo < 0:
                tail += c.real * sphere_moment(n, p) * radius ** expo / (-expo)
        fitted.append(s * partial + s * tail)
    coeffs = np.polyfit(svals, np.array(fitted), 2)
    return float(coeffs[-1])


# ---------------------------------------------------------------------------
# twisted (phase-carrying) families


@dataclass
class TwistedFamily:
    """Finitely supported b on (Z^n)^q with signs eps and a skew matrix.

    Residues of the associated phase-twisted sums are extracted through the
    kernel rule: off-kernel members extend holomorphically under the
    Diophantine hypothesis, which the caller asserts, never the library.
    """

    n: int
    q: int
    b: dict
    eps: tuple
    theta: np.ndarray
    diophantine_asserted: bool = False

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        if self.theta.shape != (self.n, self.n):
            raise ValueError("theta must be n x n")
        if not np.allclose(self.theta, -self.theta.T, atol=1e-14):
            raise ValueError("theta must be skew-symmetric (tol 1e-14)")
        self.eps = tuple(int(e) for e in self.eps)
        if len(self.eps) != self.q or any(e not in (-1, 0, 1) for e in self.eps):
            raise ValueError("signs must lie in {-1, 0, 1}^q")
        cleaned = {}
        for key, c in self.b.items():
            key = tuple(tuple(int(x) for x in block) for block in key)
            if len(key) != self.q or any(len(block) != self.n for block in key):
                raise ValueError(f"support key {key} has wrong shape")
            cleaned[key] = cleaned.get(key, 0.0) + complex(c)
        self.b = cleaned

    def kernel_weight(self) -> complex:
        """V = sum of b over the kernel {l : sum_i eps_i l_i = 0}."""
        total = 0.0 + 0.0j
        for key, c in self.b.items():
            combo = np.zeros(self.n, dtype=np.int64)
            for e, block in zip(self.eps, key):
                combo += e * np.array(block, dtype=np.int64)
            if not combo.any():
                total += c
        return total


def twisted_residue(fam: TwistedFamily, poly: LatticePoly, r: float) -> complex:
    """Kernel weight times the untwisted residue; off-kernel terms drop out."""
    if not fam.diophantine_asserted:
        raise AssumptionError(
            "Diophantine assumption not asserted for this family; twisted "
            "residues are only rule-evaluable under that hypothesis")
    if fam.n != poly.n:
        raise ValueError("dimension mismatch between family and polynomial")
    return fam.kernel_weight() * residue_lattice_sum(fam.n, poly, r)


# ---------------------------------------------------------------------------
# Riemann zeta


def riemann_zeta(s: complex) -> complex:
    """zeta(s) on C \\ {1}, via mpmath's Euler-Maclaurin continuation."""
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise PoleError("zeta has its pole at s = 1", residue=1.0)
    with mp.workdps(_MP_DPS):
        return complex(mp.zeta(mp.mpc(s)))
