"""Scaled Hermite eigenbasis of H(lam) = -Laplacian + lam^2 |x|^2.

Provides eigenfunction evaluation by the normalized three-term recurrence,
Gauss-Hermite quadrature, analysis/synthesis between point samples and
coefficient arrays, creation/annihilation ladder actions, and the closed-form
heat kernel of exp(-t H(lam)).

Conventions fixed here and relied on everywhere else:

* one-dimensional Hermite functions h_k are L^2-normalized with positive
  leading coefficient, h_0(u) = pi^(-1/4) exp(-u^2/2);
* the scaled basis is Phi_alpha^lam(x) = |lam|^(n/4) Phi_alpha(|lam|^(1/2) x),
  an eigenfunction of H(lam) with eigenvalue (2|alpha| + n)|lam|;
* for lam < 0 the ladder operators trade places with a global sign,
  A_j(lam) = -A_j(|lam|)*, so a single real basis serves both signs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .errors import DataError, DomainError

__all__ = [
    "MultiIndex",
    "QuadratureRule",
    "HermiteSlice",
    "hermite_functions",
    "hermite_eval",
    "gauss_hermite_rule",
    "analysis_points",
    "analysis_weights",
    "hermite_analyze",
    "hermite_synthesize",
    "ladder_apply",
    "mehler_kernel",
    "degree_grid",
    "simplex_mask",
    "multi_indices",
]

# Scaled time |lam|*t beyond which the one-term ground-state approximation of
# the heat kernel is used; the neglected modes are smaller by exp(-2*12).
MEHLER_TAIL_SWITCH = 12.0

# hermgauss weights underflow for very large rules; 2K+2 stays below this
# for every truncation this package targets (K <= 120).
_MAX_RULE_NODES = 250


@dataclass(frozen=True)
class MultiIndex:
    """Multi-index alpha in N^n with |alpha| = sum of entries."""

    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) == 0:
            raise DomainError("multi-index needs at least one axis")
        if any((not isinstance(e, (int, np.integer))) or e < 0 for e in self.entries):
            raise DomainError(f"multi-index entries must be non-negative integers: {self.entries}")
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))

    @property
    def degree(self) -> int:
        return sum(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries)


def _as_entries(alpha) -> tuple[int, ...]:
    if isinstance(alpha, MultiIndex):
        return alpha.entries
    if isinstance(alpha, (int, np.integer)):
        return (int(alpha),)
    return MultiIndex(tuple(alpha)).entries


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for the weight exp(-u^2) on the real line."""

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise DomainError("nodes and weights must be matching 1-d arrays")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError("quadrature nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise DomainError("quadrature weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def plain_weights(self) -> np.ndarray:
        """Weights for integrating plain samples, i.e. with exp(-u^2) stripped."""
        return self.weights * np.exp(self.nodes**2)


def gauss_hermite_rule(Q: int) -> QuadratureRule:
    """Q-node Gauss-Hermite rule, exact for polynomial degree <= 2Q-1."""
    if Q < 1:
        raise DomainError(f"node count must be positive, got {Q}")
    if Q > _MAX_RULE_NODES:
        raise DomainError(f"rule of {Q} nodes would underflow its weights (max {_MAX_RULE_NODES})")
    nodes, weights = hermgauss(Q)
    return QuadratureRule(nodes=nodes, weights=weights, exactness_degree=2 * Q - 1)


@lru_cache(maxsize=64)
def _cached_rule(Q: int) -> QuadratureRule:
    return gauss_hermite_rule(Q)


@lru_cache(maxsize=64)
def degree_grid(K: int, n: int) -> np.ndarray:
    """Integer array over the coefficient cube holding |alpha| at each slot."""
    deg = np.indices((K + 1,) * n).sum(axis=0)
    deg.setflags(write=False)
    return deg


@lru_cache(maxsize=64)
def simplex_mask(K: int, n: int) -> np.ndarray:
    mask = degree_grid(K, n) <= K
    mask.setflags(write=False)
    return mask


def multi_indices(n: int, K: int) -> list[tuple[int, ...]]:
    """All alpha with |alpha| <= K, ordered by degree then lexicographically."""
    idx = np.argwhere(simplex_mask(K, n))
    order = np.lexsort(tuple(idx[:, a] for a in reversed(range(n))) + (idx.sum(axis=1),))
    return [tuple(int(v) for v in idx[i]) for i in order]


@dataclass(frozen=True)
class HermiteSlice:
    """Hermite coefficients of one frequency slice.

    ``coeffs`` is a dense complex cube of shape (K+1,)^n; slots with
    |alpha| > K exist but are identically zero, so the live content is
    exactly the simplex {alpha : |alpha| <= K}.
    """

    lam: float
    K: int
    coeffs: np.ndarray

    def __post_init__(self):
        lam = float(self.lam)
        if lam == 0.0 or not np.isfinite(lam):
            raise DomainError("slice frequency must be nonzero and finite")
        if self.K < 0:
            raise DomainError("truncation degree must be non-negative")
        arr = np.array(self.coeffs, dtype=complex)
        if arr.ndim < 1 or any(s != self.K + 1 for s in arr.shape):
            raise DomainError(f"coefficient cube must have shape (K+1,)^n, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DataError("coefficients contain non-finite entries")
        if np.any(arr[~simplex_mask(self.K, arr.ndim)] != 0):
            raise DomainError("coefficients outside the simplex |alpha| <= K must be zero")
        arr.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "coeffs", arr)

    @property
    def n(self) -> int:
        return self.coeffs.ndim

    @classmethod
    def zeros(cls, lam: float, K: int, n: int) -> "HermiteSlice":
        return cls(lam=lam, K=K, coeffs=np.zeros((K + 1,) * n, dtype=complex))

    @classmethod
    def unit(cls, lam: float, K: int, alpha) -> "HermiteSlice":
        entries = _as_entries(alpha)
        c = np.zeros((K + 1,) * len(entries), dtype=complex)
        c[entries] = 1.0
        return cls(lam=lam, K=K, coeffs=c)

    def coeff(self, alpha) -> complex:
        return complex(self.coeffs[_as_entries(alpha)])

    def with_coeffs(self, coeffs: np.ndarray, K: int | None = None) -> "HermiteSlice":
        return HermiteSlice(lam=self.lam, K=self.K if K is None else K, coeffs=coeffs)

    @property
    def spectral_values(self) -> np.ndarray:
        """(2|alpha| + n)|lam| over the coefficient cube."""
        return (2 * degree_grid(self.K, self.n) + self.n) * abs(self.lam)

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @property
    def top_degree_mass(self) -> float:
        """Fraction of squared coefficient mass sitting at degree K.

        The truncation indicator: values near one mean the slice is
        under-resolved and downstream results should not be trusted.
        """
        total = np.sum(np.abs(self.coeffs) ** 2)
        if total == 0:
            return 0.0
        edge = degree_grid(self.K, self.n) == self.K
        return float(np.sum(np.abs(self.coeffs[edge]) ** 2) / total)


def hermite_functions(kmax: int, u: np.ndarray) -> np.ndarray:
    """h_k(u) for k = 0..kmax, stacked on axis 0.

    Uses the normalized recurrence
    h_{k+1}(u) = u sqrt(2/(k+1)) h_k(u) - sqrt(k/(k+1)) h_{k-1}(u),
    which stays bounded for every k (no factorials, no overflow).
    """
    u = np.asarray(u, dtype=float)
    out = np.empty((kmax + 1,) + u.shape, dtype=float)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * u * u)
    if kmax >= 1:
        out[1] = np.sqrt(2.0) * u * out[0]
    for k in range(1, kmax):
        out[k + 1] = u * np.sqrt(2.0 / (k + 1)) * out[k] - np.sqrt(k / (k + 1.0)) * out[k - 1]
    return out


def hermite_eval(alpha, lam: float, x) -> float | np.ndarray:
    """Phi_alpha^|lam|(x) = |lam|^(n/4) prod_j h_{alpha_j}(|lam|^(1/2) x_j)."""
    entries = _as_entries(alpha)
    lam = _check_lam(lam)
    n = len(entries)
    pts = np.asarray(x, dtype=float)
    scalar = pts.ndim == 0 or (n > 1 and pts.ndim == 1)
    pts = np.atleast_1d(pts)
    if n == 1:
        axes = pts[None, :] if pts.ndim == 1 else pts.T
    else:
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.shape[-1] != n:
            raise DomainError(f"points must have {n} coordinates, got shape {pts.shape}")
        axes = pts.T
    root = np.sqrt(abs(lam))
    val = np.full(axes.shape[1], abs(lam) ** (n / 4.0))
    for a in range(n):
        val = val * hermite_functions(entries[a], root * axes[a])[entries[a]]
    return float(val[0]) if scalar else val


def _check_lam(lam: float) -> float:
    lam = float(lam)
    if lam == 0.0 or not np.isfinite(lam):
        raise DomainError("frequency lam = 0 is excluded from the spectrum handling")
    return lam


def rule_for_truncation(K: int) -> QuadratureRule:
    """The 2K+2 node rule: exact for every product Phi_a Phi_b, |a|,|b| <= K."""
    return _cached_rule(2 * K + 2)


def analysis_points(lam: float, K: int, n: int = 1) -> np.ndarray:
    """Tensor quadrature points rescaled by |lam|^(-1/2).

    Shape (Q,) for n = 1, else (Q^n, n), ordered with the last axis fastest.
    """
    lam = _check_lam(lam)
    u = rule_for_truncation(K).nodes / np.sqrt(abs(lam))
    if n == 1:
        return u
    grids = np.meshgrid(*([u] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def analysis_weights(lam: float, K: int, n: int = 1) -> np.ndarray:
    """Plain integration weights matching ``analysis_points`` (flat, length Q^n)."""
    lam = _check_lam(lam)
    w1 = rule_for_truncation(K).plain_weights / np.sqrt(abs(lam))
    out = w1
    for _ in range(n - 1):
        out = np.multiply.outer(out, w1)
    return out.ravel()


@lru_cache(maxsize=256)
def _basis_on_rule(K: int, lam_abs: float) -> np.ndarray:
    """Per-axis matrix B[k, i] = |lam|^(1/(4)) h_k(u_i) at the rule nodes, one axis."""
    rule = rule_for_truncation(K)
    u = rule.nodes
    B = lam_abs**0.25 * hermite_functions(K, u)
    B.setflags(write=False)
    return B


def basis_matrix(lam: float, K: int, axis_points: np.ndarray) -> np.ndarray:
    """B[k, i] = |lam|^(1/4) h_k(|lam|^(1/2) p_i) for one coordinate axis."""
    lam = _check_lam(lam)
    pts = np.asarray(axis_points, dtype=float)
    return abs(lam) ** 0.25 * hermite_functions(K, np.sqrt(abs(lam)) * pts)


def _tensor_analyze(values: np.ndarray, B: np.ndarray, w1: np.ndarray, n: int) -> np.ndarray:
    BW = B * w1[None, :]
    out = values
    for _ in range(n):
        # contract the leading point axis against the basis, cycling axes
        out = np.tensordot(BW, out, axes=([1], [0]))
        out = np.moveaxis(out, 0, n - 1)
    return out


def hermite_analyze(values_or_fn, lam: float, K: int, n: int = 1) -> HermiteSlice:
    """Project point data onto {Phi_alpha^|lam| : |alpha| <= K}.

    ``values_or_fn`` is either a callable evaluated at ``analysis_points`` or
    an array of samples already taken there (tensor shape (Q,)^n accepted for
    any n, flat shape (Q^n,) too). The rule makes the projection exact for
    inputs inside the span, up to round-off.
    """
    lam = _check_lam(lam)
    rule = rule_for_truncation(K)
    Q = rule.nodes.size
    if callable(values_or_fn):
        values = np.asarray(values_or_fn(analysis_points(lam, K, n)), dtype=complex)
    else:
        values = np.asarray(values_or_fn, dtype=complex)
    values = values.reshape((Q,) * n)
    if not np.all(np.isfinite(values)):
        raise DataError("samples contain non-finite values")
    B = _basis_on_rule(K, abs(lam))
    w1 = rule.plain_weights / np.sqrt(abs(lam))
    coeffs = _tensor_analyze(values, B, w1, n)
    coeffs[~simplex_mask(K, n)] = 0.0
    return HermiteSlice(lam=lam, K=K, coeffs=coeffs)


def hermite_synthesize(slice_: HermiteSlice, points) -> np.ndarray:
    """Evaluate sum_alpha c_alpha Phi_alpha^|lam| at arbitrary points.

    ``points``: shape (P,) for n = 1, else (P, n). Returns a complex array (P,).
    """
    n = slice_.n
    pts = np.asarray(points, dtype=float)
    if n == 1:
        axes = [pts.ravel()]
    else:
        pts = pts.reshape(-1, n)
        axes = [pts[:, a] for a in range(n)]
    out = slice_.coeffs
    for a in range(n):
        B = basis_matrix(slice_.lam, slice_.K, axes[a])
        if a == 0:
            out = np.tensordot(out, B, axes=([0], [0]))  # remaining cube axes..., P
        else:
            # contract the current leading cube axis with the per-point basis column
            out = np.einsum("a...P,aP->...P", out, B)
    return out


def _raise_axis(coeffs: np.ndarray, axis: int, lam_abs: float, sign: float) -> np.ndarray:
    """Map c_alpha -> sign*sqrt(2(alpha_j+1)|lam|) at alpha+e_j, growing the cube by one."""
    K = coeffs.shape[0] - 1
    n = coeffs.ndim
    out = np.zeros((K + 2,) * n, dtype=complex)
    factors = sign * np.sqrt(2.0 * (np.arange(K + 1) + 1) * lam_abs)
    shape = [1] * n
    shape[axis] = K + 1
    src = [slice(0, K + 1)] * n
    dst = list(src)
    dst[axis] = slice(1, K + 2)
    out[tuple(dst)] = coeffs * factors.reshape(shape)
    return out


def _lower_axis(coeffs: np.ndarray, axis: int, lam_abs: float, sign: float) -> np.ndarray:
    """Map c_alpha -> sign*sqrt(2 alpha_j |lam|) at alpha-e_j, shrinking the cube by one."""
    K = coeffs.shape[0] - 1
    n = coeffs.ndim
    K_out = max(K - 1, 0)
    out = np.zeros((K_out + 1,) * n, dtype=complex)
    if K == 0:
        return out
    factors = sign * np.sqrt(2.0 * np.arange(1, K + 1) * lam_abs)
    shape = [1] * n
    shape[axis] = K
    src = [slice(0, K)] * n
    src[axis] = slice(1, K + 1)
    dst = [slice(0, K)] * n
    dst[axis] = slice(0, K)
    out[tuple(dst)] = coeffs[tuple(src)] * factors.reshape(shape)
    return out


def ladder_apply(slice_: HermiteSlice, j: int, kind: str) -> HermiteSlice:
    """Apply A_j(lam) (kind "creation") or A_j(lam)* (kind "annihilation").

    For lam > 0 creation raises index j with factor sqrt(2(alpha_j+1)|lam|)
    and annihilation lowers with sqrt(2 alpha_j |lam|); for lam < 0 the two
    actions swap and pick up a global minus sign (A_j(lam) = -A_j(|lam|)*).
    """
    if kind not in ("creation", "annihilation"):
        raise DomainError(f"kind must be 'creation' or 'annihilation', got {kind!r}")
    n = slice_.n
    if not 1 <= j <= n:
        raise DomainError(f"axis {j} out of range for dimension {n}")
    axis = j - 1
    lam_abs = abs(slice_.lam)
    raises = (kind == "creation") == (slice_.lam > 0)
    sign = 1.0 if slice_.lam > 0 else -1.0
    if raises:
        out = _raise_axis(slice_.coeffs, axis, lam_abs, sign)
        K_out = slice_.K + 1
    else:
        out = _lower_axis(slice_.coeffs, axis, lam_abs, sign)
        K_out = max(slice_.K - 1, 0)
    out[~simplex_mask(K_out, n)] = 0.0
    return HermiteSlice(lam=slice_.lam, K=K_out, coeffs=out)


def point_batch(x) -> np.ndarray:
    """Normalize point input to shape (P, n).

    Scalars are one 1-d point; a 1-d array is a batch of 1-d points; higher
    dimensions must already carry coordinates on the last axis.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr.reshape(-1, 1)
    return arr.reshape(-1, arr.shape[-1])


def _mehler_unit(s, u, v, n: int):
    """Heat kernel of H(1) at scaled time s for |x+y|^2, |x-y|^2 inputs baked in."""
    plus = np.sum((u + v) ** 2, axis=-1)
    minus = np.sum((u - v) ** 2, axis=-1)
    th = np.tanh(s)
    return (2.0 * np.pi * np.sinh(2.0 * s)) ** (-n / 2.0) * np.exp(
        -0.25 * (plus * th + minus / th)
    )


def mehler_kernel(t: float, lam: float, x, y) -> float | np.ndarray:
    """Kernel of exp(-t H(lam)), positive and symmetric in (x, y).

    Closed form at lam = 1:
    h_t(x,y) = (2 pi sinh 2t)^(-n/2) exp(-(|x+y|^2 tanh t + |x-y|^2 coth t)/4),
    rescaled by h_t^lam(x,y) = |lam|^(n/2) h_{|lam| t}(|lam|^(1/2)x, |lam|^(1/2)y).
    Beyond |lam| t = 12 the ground-state term alone is returned; the relative
    error of that switch is below 1e-10 and it avoids sinh overflow.
    """
    t = float(t)
    if t <= 0:
        raise DomainError(f"time must be positive, got {t}")
    lam = _check_lam(lam)
    xa = point_batch(x)
    ya = point_batch(y)
    if xa.shape != ya.shape:
        raise DomainError("x and y must have matching shapes")
    n = xa.shape[-1]
    u = np.sqrt(abs(lam)) * xa
    v = np.sqrt(abs(lam)) * ya
    s = abs(lam) * t
    if s > MEHLER_TAIL_SWITCH:
        val = (
            np.exp(-n * s)
            * np.pi ** (-n / 2.0)
            * np.exp(-0.5 * (np.sum(u * u, axis=-1) + np.sum(v * v, axis=-1)))
        )
    else:
        val = _mehler_unit(s, u, v, n)
    val = abs(lam) ** (n / 2.0) * val
    return float(val[0]) if np.ndim(x) == 0 else val
