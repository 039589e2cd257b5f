"""Cutoff-function moments and spectral-action expansion assembly.

A cutoff Phi enters the expansion only through Phi(0) and the moments
Phi_k = (1/2) integral_0^inf Phi(t) t^(k/2 - 1) dt.  Built-in families carry
analytic moments; tabulated cutoffs go through a spline plus a fitted
exponential tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, interpolate


class DivergentMomentError(ValueError):
    pass


@dataclass
class CutoffMoments:
    phi0: float
    values: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    error_bound: float = 0.0

    def phi(self, k) -> float:
        if k not in self.values:
            raise KeyError(f"moment Phi_{k} was not requested at construction")
        return self.values[k]

    def to_dict(self) -> dict:
        return {
            "phi0": self.phi0,
            "moments": {str(k): v for k, v in self.values.items()},
            "provenance": {str(k): v for k, v in self.provenance.items()},
            "error_bound": self.error_bound,
        }


def moment_quadrature(phi, k: float) -> tuple:
    """Adaptive quadrature of (1/2) phi(t) t^(k/2-1) on (0, inf)."""
    if k <= 0:
        raise DivergentMomentError(f"moment k = {k} diverges at t = 0")
    val, err = integrate.quad(lambda t: 0.5 * phi(t) * t ** (k / 2.0 - 1.0),
                              0.0, np.inf, limit=400)
    if not np.isfinite(val) or err > 1e-8:
        raise DivergentMomentError(
            f"quadrature for Phi_{k} failed (value {val}, error {err})")
    return val, err


def _tabulated_moment(ts, vs, k: float) -> tuple:
    spline = interpolate.CubicSpline(ts, vs)
    inner, err1 = integrate.quad(
        lambda t: 0.5 * spline(t) * t ** (k / 2.0 - 1.0), ts[0], ts[-1],
        limit=400)
    head = 0.0
    if ts[0] > 0:
        # short head treated as constant Phi(t0)
        head = 0.5 * vs[0] * ts[0] ** (k / 2.0) * 2.0 / k
    # exponential tail fitted on the last two samples
    if vs[-1] <= 0 or vs[-2] <= vs[-1]:
        raise DivergentMomentError("tabulated cutoff tail is not decaying")
    lam = math.log(vs[-2] / vs[-1]) / (ts[-1] - ts[-2])
    tail, err2 = integrate.quad(
        lambda t: 0.5 * vs[-1] * math.exp(-lam * (t - ts[-1]))
        * t ** (k / 2.0 - 1.0), ts[-1], np.inf, limit=200)
    return inner + head + tail, err1 + err2


_FAMILIES = {
    "exponential": {
        "phi": lambda t: math.exp(-t),
        "moment": lambda k: 0.5 * math.gamma(k / 2.0),
        "phi0": 1.0,
    },
    "gaussian": {
        "phi": lambda t: math.exp(-t * t),
        "moment": lambda k: 0.25 * math.gamma(k / 4.0),
        "phi0": 1.0,
    },
}


def cutoff_moments(cutoff, ks) -> CutoffMoments:
    """Evaluate Phi(0) and the requested moments of a cutoff function.

    `cutoff` is a family dict {"family": name}, a table dict
    {"table": [[t, phi(t)], ...]}, or a positive callable.
    """
    ks = list(ks)
    values, prov = {}, {}
    bound = 0.0
    if callable(cutoff):
        phi0 = float(cutoff(0.0))
        for k in ks:
            values[k], err = moment_quadrature(cutoff, k)
            prov[k] = "quadrature"
            bound = max(bound, err)
    elif isinstance(cutoff, dict) and "family" in cutoff:
        name = cutoff["family"]
        if name not in _FAMILIES:
            raise ValueError(f"unknown cutoff family {name!r}")
        fam = _FAMILIES[name]
        scale = float(cutoff.get("params", {}).get("scale", 1.0))
        phi0 = scale * fam["phi0"]
        for k in ks:
            values[k] = scale * fam["moment"](k)
            prov[k] = "analytic"
    elif isinstance(cutoff, dict) and "table" in cutoff:
        table = np.asarray(cutoff["table"], dtype=float)
        if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 4:
            raise ValueError("table must be [[t, phi(t)], ...] with >= 4 rows")
        ts, vs = table[:, 0], table[:, 1]
        if np.any(np.diff(ts) <= 0):
            raise ValueError("table abscissae must be strictly increasing")
        if np.any(vs < 0):
            raise ValueError("cutoff must be nonnegative")
        phi0 = float(vs[0]) if ts[0] <= 1e-12 else float(
            interpolate.CubicSpline(ts, vs)(0.0))
        for k in ks:
            values[k], err = _tabulated_moment(ts, vs, k)
            prov[k] = "quadrature"
            bound = max(bound, err)
    else:
        raise ValueError("cutoff must be a family dict, a table dict or a callable")
    for k, v in values.items():
        if not np.isfinite(v):
            raise DivergentMomentError(f"moment Phi_{k} is not finite")
    return CutoffMoments(phi0=phi0, values=values, provenance=prov,
                         error_bound=bound)


@dataclass
class ExpansionReport:
    """Spectral-action expansion: coefficients of Lambda powers, evaluated."""

    entries: list  # (power, coefficient, tag), powers strictly decreasing
    lam: float

    def __post_init__(self):
        powers = [p for p, _, _ in self.entries]
        if any(b >= a for a, b in zip(powers, powers[1:])):
            raise ValueError("expansion powers must be strictly decreasing")
        if self.lam <= 0:
            raise ValueError("Lambda must be positive")

    @property
    def total(self) -> complex:
        return sum(c * self.lam ** p for p, c, _ in self.entries)

    def coefficient(self, power):
        for p, c, _ in self.entries:
            if p == power:
                return c
        return 0.0

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "terms": [{"power": p,
                       "coefficient": _jsonable(c),
                       "tag": t} for p, c, t in self.entries],
            "total": _jsonable(self.total),
        }


def _jsonable(x):
    x = complex(x)
    if x.imag == 0:
        return x.real
    return {"re": x.real, "im": x.imag}


def assemble(coeffs, zeta0, moments: CutoffMoments, lam: float) -> ExpansionReport:
    """S(Lambda) = sum_k Phi_k Lambda^k c_k + Phi(0) zeta0, exact and linear."""
    entries = []
    for k in sorted(coeffs, reverse=True):
        if k <= 0:
            raise ValueError("positive powers only; the constant goes in zeta0")
        entries.append((k, moments.phi(k) * coeffs[k], f"Phi_{k} * integral"))
    entries.append((0, moments.phi0 * zeta0, "Phi(0) * zeta(0)"))
    return ExpansionReport(entries=entries, lam=lam)
