"""Scalar functional calculus m(G) and the Hormander-Mihlin condition checker.

Symbols act diagonally on the joint spectrum: c_alpha(lam) picks up the
factor m((2|alpha| + n)|lam|). Fractional powers are the special case
m(mu) = mu^s; the inverse square root also has a semigroup-integral
representation (Gamma(1/2)^(-1) normalized) that the test suite uses as an
independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, EvaluationError
from .hermite import HermiteSlice
from .transform import SpectralCoefficients, map_slices

__all__ = [
    "ScalarSymbol",
    "HormanderReport",
    "apply_scalar_multiplier",
    "fractional_power_apply",
    "hormander_check",
    "named_symbol",
    "OVERFLOW_THRESHOLD",
]

# Sampled suprema at or above this threshold flip the verdict to unbounded.
OVERFLOW_THRESHOLD = 1e12


@dataclass(frozen=True)
class ScalarSymbol:
    """A scalar function on (0, inf) with optional analytic derivatives.

    ``func`` must accept numpy arrays. ``derivatives[k-1]`` evaluates the
    k-th derivative when supplied; otherwise central finite differences of
    fourth order stand in.
    """

    func: object
    derivatives: tuple = ()
    order: int = 2
    name: str = "symbol"

    def __post_init__(self):
        if not callable(self.func):
            raise DomainError("symbol needs a callable")
        object.__setattr__(self, "derivatives", tuple(self.derivatives or ()))
        if self.order < 0:
            raise DomainError("declared order must be non-negative")

    def value(self, mu):
        return self.func(np.asarray(mu, dtype=float))

    def derivative(self, k: int, mu):
        """k-th derivative at mu, analytic when available, else finite differences."""
        if k == 0:
            return self.value(mu)
        if k <= len(self.derivatives):
            return self.derivatives[k - 1](np.asarray(mu, dtype=float))
        return _fd_derivative(self.func, k, np.asarray(mu, dtype=float))


@lru_cache(maxsize=16)
def _fd_stencil(k: int) -> tuple[tuple[float, ...], tuple[int, ...]]:
    """Central stencil of fourth-order accuracy for the k-th derivative."""
    M = (k + 1) // 2 + (1 if k <= 2 else 2)
    offsets = np.arange(-M, M + 1)
    A = np.vander(offsets.astype(float), increasing=True).T
    b = np.zeros(2 * M + 1)
    b[k] = math.factorial(k)
    weights = np.linalg.solve(A, b)
    return tuple(weights), tuple(int(o) for o in offsets)


def _fd_step(k: int, mu: np.ndarray) -> np.ndarray:
    # exponent 1/(k+2) balances a second-order stencil; fourth-order stencils
    # at k >= 3 need the larger step 1/(k+4) to keep cancellation below 1e-6
    eps = np.finfo(float).eps
    expo = 1.0 / (k + 2) if k <= 2 else 1.0 / (k + 4)
    return mu * eps**expo


def _fd_derivative(func, k: int, mu: np.ndarray):
    weights, offsets = _fd_stencil(k)
    h = _fd_step(k, mu)
    acc = None
    for w, o in zip(weights, offsets):
        term = w * np.asarray(func(mu + o * h))
        acc = term if acc is None else acc + term
    return acc / h**k


def _symbol_factors(sym: ScalarSymbol, sl: HermiteSlice) -> np.ndarray:
    mu = sl.spectral_values
    with np.errstate(all="ignore"):
        fac = np.asarray(sym.value(mu))
    fac = np.broadcast_to(fac, mu.shape).astype(complex, copy=True)
    live = np.abs(sl.coeffs) > 0
    bad = live & ~np.isfinite(fac)
    if np.any(bad):
        raise EvaluationError(f"symbol {sym.name!r} not finite at mu={mu[bad].flat[0]:.6g}")
    fac[~np.isfinite(fac)] = 0.0
    return fac


def apply_symbol_slice(sym: ScalarSymbol, sl: HermiteSlice) -> HermiteSlice:
    return sl.with_coeffs(sl.coeffs * _symbol_factors(sym, sl))


def apply_scalar_multiplier(sym: ScalarSymbol, c: SpectralCoefficients) -> SpectralCoefficients:
    """Multiply c_alpha(lam) by m((2|alpha| + n)|lam|)."""
    return map_slices(c, lambda sl: apply_symbol_slice(sym, sl))


def fractional_power_slice(s: float, sl: HermiteSlice) -> HermiteSlice:
    return sl.with_coeffs(sl.coeffs * np.power(sl.spectral_values, s))


def fractional_power_apply(s: float, c: SpectralCoefficients) -> SpectralCoefficients:
    """Diagonal factor mu^s; lam != 0 keeps every spectral value positive."""
    return map_slices(c, lambda sl: fractional_power_slice(s, sl))


@dataclass(frozen=True)
class HormanderReport:
    """Sampled suprema S_k = sup_mu |mu^k m^(k)(mu)| and the resulting verdict."""

    order: int
    sup_values: tuple[float, ...]
    argmax_mu: tuple[float, ...]
    bounded: bool
    mu_range: tuple[float, float]
    samples: int

    def to_dict(self) -> dict:
        return {
            "schema": "grushin.hormander-report/1",
            "order": self.order,
            "sup_values": list(self.sup_values),
            "argmax_mu": list(self.argmax_mu),
            "bounded": self.bounded,
            "mu_range": list(self.mu_range),
            "samples": self.samples,
        }


def hormander_check(
    sym: ScalarSymbol,
    N: int,
    mu_range: tuple[float, float] = (1.0, 1e6),
    samples: int = 257,
) -> HormanderReport:
    """Probe |m^(k)(mu)| <= C_k mu^(-k) for k = 0..N on a log-spaced sample.

    Bounded verdict means every sampled supremum stayed below 1e12; infinite
    values count as unbounded evidence, NaN is an evaluation failure.
    """
    if N < 1:
        raise DomainError("derivative order must be at least 1")
    lo, hi = float(mu_range[0]), float(mu_range[1])
    if not (0 < lo < hi):
        raise DomainError(f"range must satisfy 0 < lo < hi, got {mu_range}")
    if samples < 2:
        raise DomainError("need at least two sample points")
    mu = np.logspace(np.log10(lo), np.log10(hi), samples)
    with np.errstate(all="ignore"):
        base = np.abs(np.asarray(sym.value(mu), dtype=complex))
    if np.any(np.isnan(base)):
        raise EvaluationError(
            f"symbol {sym.name!r} failed at mu={mu[np.isnan(base)][0]:.6g}"
        )
    overflowed = ~np.isfinite(base)
    sups, args = [], []
    bounded = True
    for k in range(N + 1):
        with np.errstate(all="ignore"):
            vals = np.abs(np.asarray(sym.derivative(k, mu), dtype=complex))
            scaled = mu**k * vals
        # differencing inf samples yields NaN; that is overflow evidence,
        # not a failed evaluation
        nans = np.isnan(scaled)
        scaled[nans & overflowed] = np.inf
        if np.any(nans & ~overflowed):
            raise EvaluationError(
                f"derivative order {k} of {sym.name!r} failed at "
                f"mu={mu[nans & ~overflowed][0]:.6g}"
            )
        i = int(np.argmax(scaled))
        s = float(scaled[i])
        sups.append(s)
        args.append(float(mu[i]))
        if not np.isfinite(s) or s >= OVERFLOW_THRESHOLD:
            bounded = False
    return HormanderReport(
        order=N,
        sup_values=tuple(sups),
        argmax_mu=tuple(args),
        bounded=bounded,
        mu_range=(lo, hi),
        samples=samples,
    )


def _truncated_power(u: np.ndarray, delta: float) -> np.ndarray:
    # delta = 0 is the sharp cutoff with the boundary u = 1 mapped to 0
    u = np.asarray(u, dtype=float)
    return np.where(u < 1.0, np.maximum(1.0 - u, 0.0) ** delta, 0.0)


def named_symbol(name: str) -> ScalarSymbol:
    """Build a symbol from its text form.

    Recognized: "one", "heat:s", "power:s", "cesaro-delta:d",
    "imaginary-power:tau", "rational".
    """
    kind, _, arg = name.partition(":")
    kind = kind.strip().lower()
    if kind == "one":
        return ScalarSymbol(func=lambda mu: np.ones_like(np.asarray(mu, dtype=float)),
                            name="one")
    if kind == "rational":
        return ScalarSymbol(
            func=lambda mu: 1.0 / (1.0 + mu),
            derivatives=(
                lambda mu: -((1.0 + mu) ** -2.0),
                lambda mu: 2.0 * (1.0 + mu) ** -3.0,
                lambda mu: -6.0 * (1.0 + mu) ** -4.0,
                lambda mu: 24.0 * (1.0 + mu) ** -5.0,
            ),
            order=4,
            name="rational",
        )
    if kind in ("heat", "power", "cesaro-delta", "imaginary-power"):
        if not arg:
            raise DomainError(f"symbol {kind!r} needs a parameter, e.g. {kind}:0.5")
        try:
            val = float(arg)
        except ValueError as exc:
            raise DomainError(f"bad symbol parameter {arg!r}") from exc
        if kind == "heat":
            if val <= 0:
                raise DomainError("heat symbol needs s > 0")
            return ScalarSymbol(func=lambda mu, s=val: np.exp(-s * mu), name=name)
        if kind == "power":
            return ScalarSymbol(func=lambda mu, s=val: np.power(mu, s), name=name)
        if kind == "cesaro-delta":
            if val < 0:
                raise DomainError("cesaro order must be >= 0")
            return ScalarSymbol(func=lambda mu, d=val: _truncated_power(mu, d), name=name)
        return ScalarSymbol(
            func=lambda mu, tau=val: np.power(np.asarray(mu, dtype=float), 1j * tau),
            name=name,
        )
    raise DomainError(f"unknown symbol {name!r}")
