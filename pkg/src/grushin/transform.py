"""Joint diagonalization of G = -Laplacian - |x|^2 d_t^2 on a periodic grid.

The time axis carries a discrete Fourier transform with analysis kernel
exp(+i lam t) and synthesis kernel exp(-i lam t) scaled by 1/(2 pi); per
nonzero frequency lam_m = 2 pi m / T the spatial slice is expanded in the
scaled Hermite basis. The lam = 0 bin is excluded from every spectral
operation (the calculus is singular there); its energy is reported on the
coefficient object instead of being silently dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import CapabilityError, DataError, DomainError
from .hermite import HermiteSlice, basis_matrix, degree_grid, simplex_mask

__all__ = [
    "GridSpec",
    "GridFunction",
    "SpectralCoefficients",
    "DilationParams",
    "forward_transform",
    "inverse_transform",
    "apply_grushin",
    "nonisotropic_dilate",
    "map_slices",
]


def _is_pow2(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid over [-L, L)^n x [0, T).

    Spatial points x_i = -L + i * (2L/Nx); temporal points t_l = l * (T/Nt).
    """

    n: int
    Nx: int
    x_extent: float
    Nt: int
    t_extent: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError(f"spatial dimension must be 1, 2 or 3, got {self.n}")
        for name, m in (("Nx", self.Nx), ("Nt", self.Nt)):
            if not _is_pow2(m) or m < 8:
                raise DomainError(f"{name} must be a power of two >= 8, got {m}")
        if self.x_extent <= 0 or self.t_extent <= 0:
            raise DomainError("extents must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.x_extent / self.Nx

    @property
    def dt(self) -> float:
        return self.t_extent / self.Nt

    @property
    def cell_volume(self) -> float:
        return self.dx**self.n * self.dt

    def x_axis(self) -> np.ndarray:
        return -self.x_extent + self.dx * np.arange(self.Nx)

    def t_axis(self) -> np.ndarray:
        return self.dt * np.arange(self.Nt)

    @property
    def lambda_min(self) -> float:
        return 2.0 * np.pi / self.t_extent

    def frequency_indices(self) -> list[int]:
        """All nonzero m, i.e. {-Nt/2, ..., -1, 1, ..., Nt/2 - 1}."""
        return [m for m in range(-self.Nt // 2, self.Nt // 2) if m != 0]

    def lambda_of(self, m: int) -> float:
        return 2.0 * np.pi * m / self.t_extent

    def resolution_ok(self, K: int) -> bool:
        """Whether the box holds the degree-K mode at the smallest frequency."""
        return self.x_extent >= np.sqrt((2 * K + 1) / self.lambda_min)

    def alias_free_m(self, K: int) -> int:
        """Largest |m| whose degree-K basis products stay below the grid Nyquist."""
        bound = (np.pi / (2.0 * self.dx)) ** 2 / ((2 * K + 1) * self.lambda_min)
        return min(int(bound), self.Nt // 2 - 1)

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.n, self.Nx * factor, self.x_extent, self.Nt * factor, self.t_extent)

    def shape(self) -> tuple[int, ...]:
        return (self.Nt,) + (self.Nx,) * self.n


@dataclass(frozen=True)
class GridFunction:
    """Complex samples f(x, t) with the time index slowest (axis 0)."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=complex)
        if arr.shape != self.spec.shape():
            raise DataError(f"values shape {arr.shape} does not match grid {self.spec.shape()}")
        if not np.all(np.isfinite(arr)):
            raise DataError("grid values contain non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def l2_norm(self) -> float:
        return float(np.sqrt(self.spec.cell_volume * np.sum(np.abs(self.values) ** 2)))


@dataclass(frozen=True)
class DilationParams:
    """Scale r of the nonisotropic dilation D_r f(x,t) = r^(n+2) f(rx, r^2 t)."""

    r: float

    def __post_init__(self):
        if not (self.r > 0) or not np.isfinite(self.r):
            raise DomainError(f"dilation scale must be positive, got {self.r}")


@dataclass(frozen=True)
class SpectralCoefficients:
    """Hermite coefficients per nonzero frequency index m -> lam_m = 2 pi m / T."""

    spec: GridSpec
    K: int
    slices: MappingProxyType
    dropped_dc_energy: float = 0.0

    def __post_init__(self):
        slices = dict(self.slices)
        if 0 in slices:
            raise DomainError("the m = 0 bin is excluded from spectral coefficients")
        for m, sl in slices.items():
            if not isinstance(sl, HermiteSlice):
                raise DomainError(f"slice at m={m} is not a HermiteSlice")
            if sl.n != self.spec.n:
                raise DomainError(f"slice at m={m} has dimension {sl.n}, grid has {self.spec.n}")
            expect = self.spec.lambda_of(m)
            if sl.lam != expect:
                raise DomainError(f"slice at m={m} carries lam={sl.lam}, grid says {expect}")
        object.__setattr__(self, "slices", MappingProxyType(slices))

    def slice_at(self, m: int) -> HermiteSlice:
        return self.slices[m]

    def coefficient_energy(self) -> float:
        return float(sum(np.sum(np.abs(sl.coeffs) ** 2) for sl in self.slices.values()))

    @property
    def top_degree_mass(self) -> float:
        """Worst per-slice truncation indicator over slices with content."""
        frac = 0.0
        for sl in self.slices.values():
            if sl.l2_norm() > 0:
                frac = max(frac, sl.top_degree_mass)
        return frac


def map_slices(c: SpectralCoefficients, fn) -> SpectralCoefficients:
    """Apply an independent per-slice operation; slices may be mapped in parallel."""
    new = {m: fn(sl) for m, sl in c.slices.items()}
    K = max((sl.K for sl in new.values()), default=c.K)
    return SpectralCoefficients(
        spec=c.spec, K=K, slices=new, dropped_dc_energy=c.dropped_dc_energy
    )


_BASIS_CACHE: dict[tuple, np.ndarray] = {}


def _axis_bases(spec: GridSpec, K: int, lam: float) -> np.ndarray:
    key = (K, lam, spec.Nx, spec.x_extent)
    B = _BASIS_CACHE.get(key)
    if B is None:
        B = basis_matrix(lam, K, spec.x_axis())
        B.setflags(write=False)
        if len(_BASIS_CACHE) > 4096:
            _BASIS_CACHE.clear()
        _BASIS_CACHE[key] = B
    return B


def forward_transform(f: GridFunction, K: int) -> SpectralCoefficients:
    """Analyze f into c_alpha(lam_m) = (f^lam_m, Phi_alpha^|lam_m|).

    f^lam(x) is the time integral of f(x,t) exp(+i lam t) over one period,
    computed exactly by the FFT; the spatial projection uses the grid's
    Riemann weights. The m = 0 bin is dropped and its energy recorded.
    """
    spec = f.spec
    if not spec.resolution_ok(K):
        need = np.sqrt((2 * K + 1) / spec.lambda_min)
        raise CapabilityError(
            f"x_extent {spec.x_extent} too small for K={K} at lambda_min="
            f"{spec.lambda_min:.6g} (needs >= {need:.6g})"
        )
    fhat = spec.t_extent * np.fft.ifft(f.values, axis=0)
    w = spec.dx**spec.n
    slices = {}
    for m in spec.frequency_indices():
        lam = spec.lambda_of(m)
        B = _axis_bases(spec, K, lam)
        out = fhat[m % spec.Nt]
        for _ in range(spec.n):
            out = np.tensordot(B, out, axes=([1], [0]))
            out = np.moveaxis(out, 0, spec.n - 1)
        coeffs = w * out
        coeffs[~simplex_mask(K, spec.n)] = 0.0
        slices[m] = HermiteSlice(lam=lam, K=K, coeffs=coeffs)
    dc = float(w * np.sum(np.abs(fhat[0] / spec.t_extent) ** 2))
    return SpectralCoefficients(spec=spec, K=K, slices=slices, dropped_dc_energy=dc)


def inverse_transform(c: SpectralCoefficients) -> GridFunction:
    """Synthesize (1/2pi) sum_m dlam exp(-i lam_m t) sum_alpha c_alpha Phi_alpha."""
    spec = c.spec
    fhat = np.zeros(spec.shape(), dtype=complex)
    for m, sl in c.slices.items():
        B = _axis_bases(spec, sl.K, sl.lam)
        out = sl.coeffs
        for _ in range(spec.n):
            out = np.tensordot(out, B, axes=([0], [0]))
        fhat[m % spec.Nt] = out
    values = np.fft.fft(fhat, axis=0) / spec.t_extent
    return GridFunction(spec=spec, values=values)


def apply_grushin(c: SpectralCoefficients) -> SpectralCoefficients:
    """Multiply each coefficient by its eigenvalue (2|alpha| + n)|lam|."""

    def per_slice(sl: HermiteSlice) -> HermiteSlice:
        return sl.with_coeffs(sl.coeffs * sl.spectral_values)

    return map_slices(c, per_slice)


def _interp_matrix(points: np.ndarray, N: int, period: float, origin: float,
                   inside: np.ndarray) -> np.ndarray:
    """Trigonometric evaluation matrix from DFT coefficients to ``points``.

    Rows for points outside the recorded box are zero: the function is
    extended by zero, not periodized, so dilations match their real-line
    meaning.
    """
    freqs = np.fft.fftfreq(N, d=1.0 / N)
    E = np.exp(2j * np.pi * np.outer(points - origin, freqs) / period)
    E[~inside] = 0.0
    return E


def nonisotropic_dilate(f: GridFunction, d: DilationParams) -> GridFunction:
    """D_r f(x,t) = r^(n+2) f(rx, r^2 t) by band-limited resampling.

    Preimages falling outside [-L, L)^n x [0, T) read as zero; inputs should
    be localized well inside the box so nothing of size is cut.
    """
    r = float(d.r) if isinstance(d, DilationParams) else DilationParams(float(d)).r
    spec = f.spec
    if r == 1.0:
        return f
    tp = r * r * spec.t_axis()
    Et = _interp_matrix(tp, spec.Nt, spec.t_extent, 0.0, (tp >= 0) & (tp < spec.t_extent))
    out = np.tensordot(Et, np.fft.fft(f.values, axis=0) / spec.Nt, axes=([1], [0]))
    xp = r * spec.x_axis()
    L = spec.x_extent
    Ex = _interp_matrix(xp, spec.Nx, 2.0 * L, -L, (xp >= -L) & (xp < L))
    for axis in range(1, spec.n + 1):
        Fx = np.fft.fft(out, axis=axis) / spec.Nx
        out = np.moveaxis(np.tensordot(Fx, Ex, axes=([axis], [1])), -1, axis)
    return GridFunction(spec=spec, values=r ** (spec.n + 2) * out)
