"""Weyl algebra of the noncommutative n-torus and its spectral action.

Elements are finitely supported Fourier series sum_k a_k U_k with the
twisted product U_k U_q = exp(-i/2 k.Theta q) U_{k+q}.  On top of the
algebra sit one-forms, curvature, the Yang-Mills density and the closed
heat-expansion coefficients for n = 2 and n = 4, cross-checked against an
eigenvalue oracle for the truncated Dirac operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .action_assembly import CutoffMoments, ExpansionReport, assemble
from .gamma import build_gamma
from .lattice_zeta import AssumptionError

PRUNE_EPS = 1e-15
YM_CONSTANT = 4.0 * math.pi ** 2 / 3.0  # the n = 4 coupling 4 pi^2 / 3


class Theta:
    """Skew-symmetric deformation matrix."""

    def __init__(self, entries):
        arr = np.array(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("theta must be a square matrix")
        if not np.allclose(arr, -arr.T, atol=1e-14):
            raise ValueError("theta must be skew-symmetric (tol 1e-14)")
        arr.setflags(write=False)
        self.entries = arr
        self.n = arr.shape[0]

    @classmethod
    def zero(cls, n: int) -> "Theta":
        return cls(np.zeros((n, n)))

    def pairing(self, k, q) -> float:
        """k . Theta q"""
        return float(np.dot(k, self.entries @ np.asarray(q, dtype=float)))


class TorusElement:
    """Finitely supported map Z^n -> C; immutable once built."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs=None):
        self.n = n
        data = {}
        if coeffs:
            for k, c in coeffs.items():
                k = tuple(int(x) for x in k)
                if len(k) != n:
                    raise ValueError(f"mode {k} has wrong length for n = {n}")
                c = complex(c)
                if abs(c) > PRUNE_EPS:
                    data[k] = data.get(k, 0.0) + c
        self.coeffs = {k: c for k, c in data.items() if abs(c) > PRUNE_EPS}

    @classmethod
    def unit(cls, n: int) -> "TorusElement":
        return cls(n, {(0,) * n: 1.0})

    @classmethod
    def weyl(cls, n: int, k, coeff=1.0) -> "TorusElement":
        return cls(n, {tuple(k): coeff})

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return TorusElement(self.n, out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar):
        return TorusElement(self.n, {k: scalar * c for k, c in self.coeffs.items()})

    def __neg__(self):
        return (-1.0) * self

    def _check(self, other):
        if not isinstance(other, TorusElement) or other.n != self.n:
            raise ValueError("dimension mismatch between torus elements")

    def adjoint(self) -> "TorusElement":
        return TorusElement(
            self.n, {tuple(-x for x in k): c.conjugate()
                     for k, c in self.coeffs.items()})

    def tau(self) -> complex:
        """The canonical trace: the coefficient at k = 0."""
        return self.coeffs.get((0,) * self.n, 0.0 + 0.0j)

    def delta(self, mu: int) -> "TorusElement":
        """Canonical derivation number mu (1-based): U_k -> i k_mu U_k."""
        if not 1 <= mu <= self.n:
            raise IndexError(f"derivation index {mu} out of range 1..{self.n}")
        return TorusElement(
            self.n, {k: 1.0j * k[mu - 1] * c for k, c in self.coeffs.items()})

    def norm1(self) -> float:
        return sum(abs(c) for c in self.coeffs.values())

    def is_selfadjoint(self, tol: float = 1e-12) -> bool:
        return (self - self.adjoint()).norm1() <= tol

    def allclose(self, other, tol: float = 1e-12) -> bool:
        return (self - other).norm1() <= tol

    def __repr__(self):
        items = ", ".join(f"{k}: {c:.3g}" for k, c in sorted(self.coeffs.items()))
        return f"TorusElement(n={self.n}, {{{items}}})"


def weyl_mul(a: TorusElement, b: TorusElement, theta: Theta) -> TorusElement:
    """Bilinear extension of U_k U_q = exp(-i/2 k.Theta q) U_{k+q}."""
    a._check(b)
    if theta.n != a.n:
        raise ValueError("theta dimension mismatch")
    out: dict = {}
    th = theta.entries
    for k, ck in a.coeffs.items():
        kv = np.array(k, dtype=float)
        row = kv @ th
        for q, cq in b.coeffs.items():
            phase = np.exp(-0.5j * float(row @ np.array(q, dtype=float)))
            m = tuple(x + y for x, y in zip(k, q))
            out[m] = out.get(m, 0.0) + ck * cq * phase
    return TorusElement(a.n, out)


def commutator(a, b, theta):
    return weyl_mul(a, b, theta) - weyl_mul(b, a, theta)


def adjoint(a: TorusElement) -> TorusElement:
    return a.adjoint()


def tau(a: TorusElement) -> complex:
    return a.tau()


def delta_mu(a: TorusElement, mu: int) -> TorusElement:
    return a.delta(mu)


class OneFormTorus:
    """Gauge potential: one skew-adjoint coefficient element per direction."""

    def __init__(self, components, tol: float = 1e-12):
        comps = tuple(components)
        if not comps:
            raise ValueError("need at least one component")
        n = comps[0].n
        if len(comps) != n:
            raise ValueError(f"expected {n} components, got {len(comps)}")
        for alpha, comp in enumerate(comps, start=1):
            if (comp + comp.adjoint()).norm1() > tol:
                raise ValueError(
                    f"component {alpha} violates skew-adjointness A* = -A")
        self.n = n
        self.components = comps

    @classmethod
    def zero(cls, n: int) -> "OneFormTorus":
        return cls([TorusElement(n) for _ in range(n)])

    @classmethod
    def from_entries(cls, n: int, entries) -> "OneFormTorus":
        """Build from (alpha, mode, coeff) triples with skew completion.

        Every listed (l, c) implies (-l, -conj(c)); explicitly listed
        conflicting pairs are rejected.
        """
        data = [dict() for _ in range(n)]
        explicit = [dict() for _ in range(n)]
        for alpha, l, c in entries:
            if not 1 <= alpha <= n:
                raise ValueError(f"component index {alpha} out of range 1..{n}")
            l = tuple(int(x) for x in l)
            if len(l) != n:
                raise ValueError(f"mode {l} has wrong length")
            c = complex(c)
            d = explicit[alpha - 1]
            if l in d and abs(d[l] - c) > 1e-12:
                raise ValueError(f"conflicting entries for component {alpha}, mode {l}")
            d[l] = c
        for alpha in range(n):
            for l, c in explicit[alpha].items():
                neg = tuple(-x for x in l)
                completed = -c.conjugate()
                if neg in explicit[alpha] and abs(explicit[alpha][neg] - completed) > 1e-12:
                    raise ValueError(
                        f"entries at {l} and {neg} violate skew-adjointness")
                data[alpha][l] = c
                data[alpha][neg] = completed
        return cls([TorusElement(n, d) for d in data])

    def component(self, alpha: int) -> TorusElement:
        return self.components[alpha - 1]


class Curvature:
    """Field strength F_{ab} = d_a A_b - d_b A_a + [A_a, A_b]."""

    def __init__(self, n, table):
        self.n = n
        self._table = table  # keys (a, b) with a < b

    def component(self, a: int, b: int) -> TorusElement:
        if a == b:
            return TorusElement(self.n)
        if a < b:
            return self._table[(a, b)]
        return -self._table[(b, a)]


def curvature(A: OneFormTorus, theta: Theta) -> Curvature:
    n = A.n
    table = {}
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            f = (A.component(b).delta(a) - A.component(a).delta(b)
                 + commutator(A.component(a), A.component(b), theta))
            table[(a, b)] = f
    return Curvature(n, table)


def curvature_from_coefficients(A: OneFormTorus, theta: Theta) -> Curvature:
    """Second, independent route: the explicit mode-space expansion

    F_{ab} = i sum_k [ (a_{b,k} k_a - a_{a,k} k_b)
                       - 2 sum_l a_{a,k-l} a_{b,l} sin(k.Theta l / 2) ] U_k.
    """
    n = A.n
    table = {}
    for a in range(1, n + 1):
        ca = A.component(a).coeffs
        for b in range(a + 1, n + 1):
            cb = A.component(b).coeffs
            out: dict = {}
            for k, c in cb.items():
                out[k] = out.get(k, 0.0) + 1.0j * c * k[a - 1]
            for k, c in ca.items():
                out[k] = out.get(k, 0.0) - 1.0j * c * k[b - 1]
            for ka, va in ca.items():
                for lb, vb in cb.items():
                    k = tuple(x + y for x, y in zip(ka, lb))
                    s = math.sin(0.5 * theta.pairing(k, lb))
                    out[k] = out.get(k, 0.0) - 2.0j * va * vb * s
            table[(a, b)] = TorusElement(n, out)
    return Curvature(n, table)


def yang_mills(A: OneFormTorus, theta: Theta) -> float:
    """tau(F_{mn} F^{mn}) with flat-metric index raising (full double sum)."""
    F = curvature(A, theta)
    total = 0.0 + 0.0j
    for a in range(1, A.n + 1):
        for b in range(1, A.n + 1):
            if a == b:
                continue
            fab = F.component(a, b)
            total += weyl_mul(fab, fab, theta).tau()
    if abs(total.imag) > 1e-9 * (1.0 + abs(total)):
        raise ArithmeticError(f"Yang-Mills density came out non-real: {total}")
    return float(total.real)


def gauge_transform(A: OneFormTorus, u: TorusElement, theta: Theta,
                    tol: float = 1e-10) -> OneFormTorus:
    """A_a -> u A_a u* + u d_a(u*), for unitary u."""
    ustar = u.adjoint()
    unit = TorusElement.unit(A.n)
    if not (weyl_mul(u, ustar, theta).allclose(unit, tol)
            and weyl_mul(ustar, u, theta).allclose(unit, tol)):
        raise ValueError("gauge element is not unitary within tolerance")
    comps = []
    for a in range(1, A.n + 1):
        transported = weyl_mul(weyl_mul(u, A.component(a), theta), ustar, theta)
        inhom = weyl_mul(u, ustar.delta(a), theta)
        comps.append(transported + inhom)
    return OneFormTorus(comps)


# ---------------------------------------------------------------------------
# closed-form spectral action pieces (n = 4), Chern-Simons-type sums


def cs_sums(A: OneFormTorus, theta: Theta, q: int) -> float:
    """The n = 4 integrals of the q-th power of the gauge perturbation.

    q = 2:  2c * sum_l a_{a1,l} a_{a2,-l} (l_a1 l_a2 - delta |l|^2)
    q = 3: -12c * sum   a_{a3,-l1-l2} a_{a1,l2} a_{a1,l1} sin(l1.Th l2 / 2) l1_a3
    q = 4:  8c * sum    a_{a1,-l123} a_{a2,l3} a_{a1,l2} a_{a2,l1}
                        * sin(l1.Th(l2+l3)/2) sin(l2.Th l3 / 2)
    """
    if A.n != 4:
        raise ValueError("closed forms are specific to n = 4")
    if q not in (2, 3, 4):
        raise ValueError("q must be 2, 3 or 4")
    c = YM_CONSTANT
    comps = [A.component(a).coeffs for a in range(1, 5)]
    th = theta
    total = 0.0 + 0.0j
    if q == 2:
        for a1 in range(4):
            for a2 in range(4):
                for l, v1 in comps[a1].items():
                    v2 = comps[a2].get(tuple(-x for x in l))
                    if v2 is None:
                        continue
                    l2 = sum(x * x for x in l)
                    total += v1 * v2 * (l[a1] * l[a2] - (a1 == a2) * l2)
        total *= 2.0 * c
    elif q == 3:
        for a1 in range(4):
            for a3 in range(4):
                for l1, w1 in comps[a1].items():
                    for l2, w2 in comps[a1].items():
                        l3 = tuple(-x - y for x, y in zip(l1, l2))
                        w3 = comps[a3].get(l3)
                        if w3 is None:
                            continue
                        s = math.sin(0.5 * th.pairing(l1, l2))
                        total += w3 * w2 * w1 * s * l1[a3]
        total *= -12.0 * c
    else:
        for a1 in range(4):
            for a2 in range(4):
                for l1, w1 in comps[a2].items():
                    for l2, w2 in comps[a1].items():
                        for l3, w3 in comps[a2].items():
                            l4 = tuple(-x - y - z for x, y, z in zip(l1, l2, l3))
                            w4 = comps[a1].get(l4)
                            if w4 is None:
                                continue
                            s1 = math.sin(0.5 * th.pairing(
                                l1, tuple(x + y for x, y in zip(l2, l3))))
                            s2 = math.sin(0.5 * th.pairing(l2, l3))
                            total += w4 * w3 * w2 * w1 * s1 * s2
        total *= 8.0 * c
    if abs(total.imag) > 1e-9 * (1.0 + abs(total)):
        raise ArithmeticError(f"power sum q={q} came out non-real: {total}")
    return float(total.real)


def zeta0_shift(A: OneFormTorus, theta: Theta, n: int,
                diophantine_asserted: bool = False) -> float:
    """Scale-invariant coefficient zeta_{D_A}(0) - zeta_D(0).

    Vanishes identically for n = 2; equals -c tau(F F) for n = 4.  The
    crossed-term cancellation behind both closed forms holds under the
    Diophantine hypothesis on theta / 2 pi, which must be asserted.
    """
    if n not in (2, 4):
        raise ValueError("closed forms available for n in {2, 4} only")
    if not diophantine_asserted:
        raise AssumptionError(
            "Diophantine assumption on theta/2pi not asserted")
    if A.n != n or theta.n != n:
        raise ValueError("dimension mismatch")
    if n == 2:
        return 0.0
    return -YM_CONSTANT * yang_mills(A, theta)


def zeta0_shift_via_power_sums(A: OneFormTorus, theta: Theta,
                               diophantine_asserted: bool = False) -> float:
    """Independent route: 2 sum_q (-1)^q / q of the closed power sums."""
    if not diophantine_asserted:
        raise AssumptionError(
            "Diophantine assumption on theta/2pi not asserted")
    acc = 0.0  # the q = 1 tadpole term vanishes on the torus
    for q in (2, 3, 4):
        acc += (-1.0) ** q / q * cs_sums(A, theta, q)
    return 2.0 * acc


def torus_action(A: OneFormTorus, theta: Theta, n: int,
                 moments: CutoffMoments, lam: float,
                 diophantine_asserted: bool = False) -> ExpansionReport:
    """Full expansion: n = 2 gives 4 pi Phi_2 L^2; n = 4 gives
    8 pi^2 Phi_4 L^4 - c Phi(0) tau(F F).  Odd and L^(n-2) slots are zero."""
    if n not in (2, 4):
        raise ValueError("action formulas available for n in {2, 4} only")
    shift = zeta0_shift(A, theta, n, diophantine_asserted)
    if n == 2:
        coeffs = {2: 4.0 * math.pi, 1: 0.0}
    else:
        coeffs = {4: 8.0 * math.pi ** 2, 3: 0.0, 2: 0.0, 1: 0.0}
    return assemble(coeffs, shift, moments, lam)


# ---------------------------------------------------------------------------
# truncated-Dirac oracle


@dataclass
class TruncatedSpectrum:
    n: int
    radius: int
    eigenvalues: np.ndarray

    @property
    def kernel_dim(self) -> int:
        return int(np.sum(np.abs(self.eigenvalues) < 1e-9))

    def multiplicity(self, value: float, tol: float = 1e-9) -> int:
        return int(np.sum(np.abs(self.eigenvalues - value) < tol))

    def abs_multiplicity(self, value: float, tol: float = 1e-9) -> int:
        return int(np.sum(np.abs(np.abs(self.eigenvalues) - value) < tol))


def dirac_truncated(n: int, K: int, max_dim: int = 2_000_000) -> TruncatedSpectrum:
    """Eigenvalues of D restricted to modes |k| <= K, via exact
    diagonalization of the fiber matrices k_mu gamma^mu."""
    if K < 1:
        raise ValueError("truncation radius must be >= 1")
    rep = build_gamma(n)
    grid = np.arange(-K, K + 1)
    n_modes = (2 * K + 1) ** n
    if n_modes * rep.dim > max_dim:
        raise MemoryError(
            f"truncated Dirac needs {n_modes * rep.dim} basis vectors, "
            f"over the guard {max_dim}")
    mesh = np.meshgrid(*([grid] * n), indexing="ij")
    modes = np.stack([m.ravel() for m in mesh], axis=1)
    modes = modes[np.sum(modes.astype(float) ** 2, axis=1) <= K * K + 1e-9]
    eigs = []
    for k in modes:
        fiber = sum(float(ki) * g for ki, g in zip(k, rep.matrices))
        eigs.append(np.linalg.eigvalsh(fiber))
    return TruncatedSpectrum(n=n, radius=K,
                             eigenvalues=np.sort(np.concatenate(eigs)))


# ---------------------------------------------------------------------------
# JSON interface


def load_potential(doc: dict):
    """Parse {"n", "theta", "diophantine_asserted", "A": [{alpha, l, re, im}]}."""
    try:
        n = int(doc["n"])
        theta = Theta(doc["theta"])
        flag = bool(doc.get("diophantine_asserted", False))
        entries = [(int(e["alpha"]), tuple(e["l"]),
                    complex(float(e.get("re", 0.0)), float(e.get("im", 0.0))))
                   for e in doc.get("A", [])]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed potential document: {exc}") from exc
    if theta.n != n:
        raise ValueError("theta size does not match n")
    A = OneFormTorus.from_entries(n, entries)
    return {"n": n, "theta": theta, "diophantine_asserted": flag, "A": A}
