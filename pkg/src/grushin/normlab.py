"""Empirical verification engine: L^p norms, reproducible test functions,
operator-norm probes, and vector-valued square-function (R-bound) probes.

A probe never proves boundedness. It reports the largest observed ratio plus
a refinement series, and calls the pair "stable" when doubling the grid in
both axes and doubling the trial count each move the maximum by less than 25
percent. Every trial draws from a sub-seed (seed, trial index), so parallel
and serial runs, and reruns from a stored report, agree bit for bit.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .bochner import RieszMeanSpec, bochner_riesz_slice_apply
from .calculus import apply_symbol_slice, fractional_power_slice, named_symbol
from .errors import CapabilityError, DataError, DomainError
from .hermite import HermiteSlice, simplex_mask
from .riesz import (
    HigherRieszSpec,
    RieszSpec,
    higher_riesz_slice_apply,
    riesz_slice_apply,
    shifted_power_slice,
)
from .transform import (
    GridFunction,
    GridSpec,
    SpectralCoefficients,
    forward_transform,
    inverse_transform,
    map_slices,
)

__all__ = [
    "TestFunctionSpec",
    "NormReport",
    "lp_norm",
    "lp_norm_values",
    "make_test_function",
    "make_test_slice",
    "build_slice_operator",
    "build_operator",
    "operator_norm_probe",
    "r_bound_probe",
    "fefferman_stein_probe",
    "square_function_ratio",
    "default_probe_grid",
    "STABILITY_MARGIN",
]

# A refinement is "stable" when the maximum ratio moves by less than this.
STABILITY_MARGIN = 0.25

_DEGENERATE = 1e-14


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("GRUSHIN_THREADS", "1")))
    except ValueError:
        return 1


def _map_indexed(fn, count: int) -> list:
    workers = _thread_count()
    if workers == 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def lp_norm_values(values: np.ndarray, cell_volume: float, p: float) -> float:
    if p <= 1 or not np.isfinite(p):
        raise DomainError(f"unsupported exponent p={p}: probes live on 1 < p < inf")
    values = np.asarray(values)
    if not np.all(np.isfinite(values)):
        raise DataError("norm input contains non-finite values")
    return float((cell_volume * np.sum(np.abs(values) ** p)) ** (1.0 / p))


def lp_norm(f, p: float, cell_volume: float | None = None) -> float:
    """Discrete L^p norm with cell-volume weights.

    Accepts a GridFunction, or a plain array together with ``cell_volume``.
    """
    if isinstance(f, GridFunction):
        return lp_norm_values(f.values, f.spec.cell_volume, p)
    if cell_volume is None:
        raise DomainError("plain arrays need an explicit cell_volume")
    return lp_norm_values(f, cell_volume, p)


@dataclass(frozen=True)
class TestFunctionSpec:
    """Reproducible test-function descriptor; generation is pure in the spec."""

    kind: str = "hermite-random"
    K_max: int = 6
    m_max: int = 4
    seed: int = 0
    decay: float = 3.0

    def __post_init__(self):
        if self.kind not in ("hermite-random", "bump", "mode"):
            raise DomainError(f"unknown test function kind {self.kind!r}")
        if self.K_max < 0 or self.m_max < 1:
            raise DomainError("band limits must satisfy K_max >= 0, m_max >= 1")


def _sub_rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0x7FFFFFFF] + [int(p) for p in path])


def _random_simplex_coeffs(rng, K_cube: int, K_max: int, n: int, damp) -> np.ndarray:
    """Damped complex Gaussian draws on the |alpha| <= K_max simplex.

    The draw count depends only on (K_max, n), never on the grid, so
    refinement runs see the same functions.
    """
    mask = simplex_mask(K_max, n)
    count = int(mask.sum())
    draws = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / np.sqrt(2.0)
    small = np.zeros((K_max + 1,) * n, dtype=complex)
    small[mask] = draws * damp(np.argwhere(mask).sum(axis=1))
    out = np.zeros((K_cube + 1,) * n, dtype=complex)
    out[tuple(slice(0, K_max + 1) for _ in range(n))] = small
    return out


def make_test_slice(lam: float, K: int, K_max: int, seed: int, decay: float = 2.0,
                    n: int = 1) -> HermiteSlice:
    """Unit-energy random slice, band-limited to |alpha| <= K_max."""
    if K_max > K:
        raise CapabilityError(f"band limit K_max={K_max} exceeds truncation K={K}")
    rng = _sub_rng(seed)
    coeffs = _random_simplex_coeffs(
        rng, K, K_max, n, lambda deg: (1.0 + deg) ** (-float(decay))
    )
    norm = np.linalg.norm(coeffs)
    if norm > 0:
        coeffs = coeffs / norm
    return HermiteSlice(lam=lam, K=K, coeffs=coeffs)


def make_test_function(tf: TestFunctionSpec, grid: GridSpec, K: int) -> GridFunction:
    """Deterministic unit-L^2 grid function, band-limited per the spec."""
    if tf.K_max > K:
        raise CapabilityError(f"band limit K_max={tf.K_max} exceeds truncation K={K}")
    if tf.m_max > grid.Nt // 2 - 1:
        raise CapabilityError(f"band limit m_max={tf.m_max} exceeds the grid frequencies")
    if tf.kind == "bump":
        x = grid.x_axis()
        t = grid.t_axis()
        envelope = np.exp(-0.5 * ((t - grid.t_extent / 2) / (grid.t_extent / 12.0)) ** 2)
        prof = np.exp(-0.5 * (x / (grid.x_extent / 6.0)) ** 2)
        vals = envelope.reshape((-1,) + (1,) * grid.n).astype(complex)
        for axis in range(grid.n):
            shape = [1] * (grid.n + 1)
            shape[axis + 1] = grid.Nx
            vals = vals * prof.reshape(shape)
        f = GridFunction(spec=grid, values=vals)
        return GridFunction(spec=grid, values=f.values / f.l2_norm())

    slices = {}
    for m in grid.frequency_indices():
        lam = grid.lambda_of(m)
        if abs(m) > tf.m_max:
            slices[m] = HermiteSlice.zeros(lam, K, grid.n)
        elif tf.kind == "mode":
            alpha = (tf.K_max,) + (0,) * (grid.n - 1)
            if m == max(1, min(tf.m_max, grid.Nt // 2 - 1)):
                slices[m] = HermiteSlice.unit(lam, K, alpha)
            else:
                slices[m] = HermiteSlice.zeros(lam, K, grid.n)
        else:
            rng = _sub_rng(tf.seed, m % (1 << 20))
            # separable damping keeps the degree profile identical in every
            # frequency slice, so degree-driven suprema stay reachable
            coeffs = _random_simplex_coeffs(
                rng, K, tf.K_max, grid.n,
                lambda deg, mm=m: (1.0 + deg) ** (-float(tf.decay))
                * (1.0 + abs(mm)) ** (-float(tf.decay)),
            )
            slices[m] = HermiteSlice(lam=lam, K=K, coeffs=coeffs)
    c = SpectralCoefficients(spec=grid, K=K, slices=slices)
    f = inverse_transform(c)
    norm = f.l2_norm()
    if norm < _DEGENERATE:
        return f
    return GridFunction(spec=grid, values=f.values / norm)


def build_slice_operator(name: str):
    """Parse one pipeline stage into a per-slice callable.

    Stages: identity, zero, grushin, riesz:j, riesz*:j, riesz:p,q,
    bochner:R,delta, frac:s, shifted:a,beta, and any named scalar symbol
    (one, heat:s, power:s, cesaro-delta:d, imaginary-power:tau, rational).
    """
    name = name.strip()
    kind, _, arg = name.partition(":")
    kind = kind.strip().lower()
    if kind == "identity":
        return lambda sl: sl
    if kind == "zero":
        return lambda sl: sl.with_coeffs(np.zeros_like(sl.coeffs))
    if kind == "grushin":
        return lambda sl: sl.with_coeffs(sl.coeffs * sl.spectral_values)
    if kind in ("riesz", "riesz*"):
        if "," in arg:
            if kind == "riesz*":
                raise DomainError(f"higher-order transforms use riesz:p,q, got {name!r}")
            p, q = (int(v) for v in arg.split(","))
            spec = HigherRieszSpec(p=p, q=q)
            return lambda sl, s=spec: higher_riesz_slice_apply(s, sl)
        j = int(arg) if arg else 1
        spec = RieszSpec(j=j, kind="star" if kind == "riesz*" else "plain")
        return lambda sl, s=spec: riesz_slice_apply(s, sl)
    if kind == "bochner":
        R, delta = (float(v) for v in arg.split(","))
        spec = RieszMeanSpec(R=R, delta=delta)
        return lambda sl, s=spec: bochner_riesz_slice_apply(s, sl)
    if kind == "frac":
        s = float(arg)
        return lambda sl, e=s: fractional_power_slice(e, sl)
    if kind == "shifted":
        a, beta = (float(v) for v in arg.split(","))
        return lambda sl, aa=a, bb=beta: shifted_power_slice(aa, bb, sl)
    sym = named_symbol(name)
    return lambda sl, m=sym: apply_symbol_slice(m, sl)


def build_operator(pipeline):
    """Compose pipeline stages (string "a|b" or list) left to right on
    SpectralCoefficients."""
    if isinstance(pipeline, str):
        stages = [s for s in pipeline.split("|") if s.strip()]
    else:
        stages = list(pipeline)
    if not stages:
        raise DomainError("empty operator pipeline")
    ops = [build_slice_operator(s) for s in stages]

    def apply(c: SpectralCoefficients) -> SpectralCoefficients:
        for op in ops:
            c = map_slices(c, op)
        return c

    return apply


@dataclass(frozen=True)
class NormReport:
    """Result of a norm or R-bound probe.

    ``refinement`` holds maxima at (base, doubled grid, doubled trials);
    ``stable`` means every refined maximum sits within 25 percent of the
    base maximum. A probe is a lower bound plus stability evidence, never
    a proof.
    """

    operator: str
    p: float
    trials: int
    ratios: tuple[float, ...]
    max_ratio: float
    refinement: tuple[float, ...]
    lambdas: tuple[float, ...]
    stable: bool
    seed: int
    grid: dict
    K: int
    skipped: int = 0
    kind: str = "norm"

    def to_dict(self) -> dict:
        return {
            "schema": "grushin.norm-report/1",
            "kind": self.kind,
            "operator": self.operator,
            "p": self.p,
            "trials": self.trials,
            "seed": self.seed,
            "ratios": list(self.ratios),
            "max_ratio": self.max_ratio,
            "refinement": list(self.refinement),
            "lambdas": list(self.lambdas),
            "stable": self.stable,
            "grid": dict(self.grid),
            "K": self.K,
            "skipped": self.skipped,
            "version": __version__,
        }


def _stable(refinement: tuple[float, ...]) -> bool:
    base = refinement[0]
    if base == 0:
        return all(r == 0 for r in refinement)
    return all(np.isfinite(r) and abs(r - base) <= STABILITY_MARGIN * base
               for r in refinement)


def default_probe_grid() -> GridSpec:
    """Desk-scale grid safe for degree-7 content up to |m| = 4."""
    return GridSpec(n=1, Nx=64, x_extent=6.0, Nt=64, t_extent=2.0 * np.pi)


def _probe_ratios(op, grid: GridSpec, K: int, tf: TestFunctionSpec, p: float,
                  trials: int, seed: int):
    def one(i: int):
        spec_i = TestFunctionSpec(tf.kind, tf.K_max, tf.m_max, ((seed << 20) | i), tf.decay)
        f = make_test_function(spec_i, grid, K)
        den = lp_norm(f, p)
        if den < _DEGENERATE:
            return None
        out = inverse_transform(op(forward_transform(f, K)))
        return lp_norm(out, p) / den

    results = _map_indexed(one, trials)
    ratios = [r for r in results if r is not None]
    return ratios, trials - len(ratios)


def operator_norm_probe(
    operator: str,
    p: float,
    trials: int = 64,
    seed: int = 0,
    grid: GridSpec | None = None,
    K: int = 8,
    tf: TestFunctionSpec | None = None,
    refine: bool = True,
) -> NormReport:
    """Ratio probe of a named operator pipeline on L^p of the full grid."""
    grid = grid or default_probe_grid()
    tf = tf or TestFunctionSpec(K_max=min(7, K - 1), m_max=min(4, grid.alias_free_m(K)),
                                decay=3.0)
    op = build_operator(operator)
    ratios, skipped = _probe_ratios(op, grid, K, tf, p, trials, seed)
    base = max(ratios) if ratios else 0.0
    refinement = [base]
    if refine:
        r2, _ = _probe_ratios(op, grid.refined(), K, tf, p, trials, seed)
        refinement.append(max(r2) if r2 else 0.0)
        r3, _ = _probe_ratios(op, grid, K, tf, p, 2 * trials, seed)
        refinement.append(max(r3) if r3 else 0.0)
    return NormReport(
        operator=operator if isinstance(operator, str) else "|".join(operator),
        p=p,
        trials=trials,
        ratios=tuple(ratios),
        max_ratio=base,
        refinement=tuple(refinement),
        lambdas=(),
        stable=_stable(tuple(refinement)),
        seed=seed,
        grid={"n": grid.n, "Nx": grid.Nx, "x_extent": grid.x_extent,
              "Nt": grid.Nt, "t_extent": grid.t_extent},
        K=K,
        skipped=skipped,
        kind="norm",
    )


def square_function_ratio(transformed, originals, cell_volume: float, p: float) -> float:
    """|| (sum |T f_j|^2)^(1/2) ||_p / || (sum |f_j|^2)^(1/2) ||_p."""
    num = np.sqrt(sum(np.abs(g) ** 2 for g in transformed))
    den = np.sqrt(sum(np.abs(f) ** 2 for f in originals))
    d = lp_norm_values(den, cell_volume, p)
    if d < _DEGENERATE:
        return float("nan")
    return lp_norm_values(num, cell_volume, p) / d


_SPATIAL_BASIS: dict[tuple, np.ndarray] = {}


def _spatial_basis(lam: float, K: int, Nx: int, L: float) -> np.ndarray:
    from .hermite import basis_matrix

    key = (K, lam, Nx, L)
    B = _SPATIAL_BASIS.get(key)
    if B is None:
        B = basis_matrix(lam, K, -L + (2.0 * L / Nx) * np.arange(Nx))
        B.setflags(write=False)
        if len(_SPATIAL_BASIS) > 4096:
            _SPATIAL_BASIS.clear()
        _SPATIAL_BASIS[key] = B
    return B


def _synth_1d(sl: HermiteSlice, Nx: int, L: float) -> np.ndarray:
    return sl.coeffs @ _spatial_basis(sl.lam, sl.K, Nx, L)


def _rbound_ratios(slice_op, lambdas, p, trials, seed, Nx, L, K, K_max, decay):
    cell = 2.0 * L / Nx

    def one(i: int):
        originals, transformed = [], []
        for j, lam in enumerate(lambdas):
            sl = make_test_slice(lam, K, K_max, ((seed << 24) | (i << 8) | j), decay)
            originals.append(_synth_1d(sl, Nx, L))
            transformed.append(_synth_1d(slice_op(sl), Nx, L))
        return square_function_ratio(transformed, originals, cell, p)

    results = _map_indexed(one, trials)
    ratios = [r for r in results if np.isfinite(r)]
    return ratios, trials - len(ratios)


def r_bound_probe(
    operator: str,
    lambdas,
    p: float,
    trials: int = 64,
    seed: int = 0,
    Nx: int = 512,
    x_extent: float = 20.0,
    K: int = 8,
    K_max: int = 7,
    decay: float = 2.0,
    refine: bool = True,
) -> NormReport:
    """Vector-valued square-function probe of a frequency-indexed family.

    The same named stages as ``operator_norm_probe`` act per frequency on
    spatial slices; ratios are symmetric under any permutation of the
    frequency list.
    """
    lambdas = tuple(float(v) for v in lambdas)
    if any(v == 0.0 for v in lambdas):
        raise DomainError("frequencies must be nonzero")
    if not (1 < p < np.inf):
        raise DomainError(f"unsupported exponent p={p}")
    slice_op = build_slice_operator(operator)
    ratios, skipped = _rbound_ratios(slice_op, lambdas, p, trials, seed, Nx,
                                     x_extent, K, K_max, decay)
    base = max(ratios) if ratios else 0.0
    refinement = [base]
    if refine:
        r2, _ = _rbound_ratios(slice_op, lambdas, p, trials, seed, 2 * Nx,
                               x_extent, K, K_max, decay)
        refinement.append(max(r2) if r2 else 0.0)
        r3, _ = _rbound_ratios(slice_op, lambdas, p, 2 * trials, seed, Nx,
                               x_extent, K, K_max, decay)
        refinement.append(max(r3) if r3 else 0.0)
    return NormReport(
        operator=operator,
        p=p,
        trials=trials,
        ratios=tuple(ratios),
        max_ratio=base,
        refinement=tuple(refinement),
        lambdas=lambdas,
        stable=_stable(tuple(refinement)),
        seed=seed,
        grid={"n": 1, "Nx": Nx, "x_extent": x_extent, "Nt": 0, "t_extent": 0.0},
        K=K,
        skipped=skipped,
        kind="rbound",
    )


def _fs_ratios(J, p, trials, seed, Nx, L, K, K_max):
    from .bochner import hardy_littlewood_maximal

    cell = 2.0 * L / Nx

    def one(i: int):
        fams, maxis = [], []
        for j in range(J):
            sl = make_test_slice(1.0, K, K_max, ((seed << 24) | (i << 8) | j), 1.5)
            vals = np.abs(_synth_1d(sl, Nx, L))
            fams.append(vals)
            maxis.append(hardy_littlewood_maximal(vals, cell).values)
        return square_function_ratio(maxis, fams, cell, p)

    results = _map_indexed(one, trials)
    ratios = [r for r in results if np.isfinite(r)]
    return ratios, trials - len(ratios)


def fefferman_stein_probe(
    J: int = 8,
    p: float = 4.0,
    trials: int = 16,
    seed: int = 0,
    Nx: int = 256,
    x_extent: float = 10.0,
    K: int = 16,
    K_max: int = 12,
    refine: bool = True,
) -> NormReport:
    """Vector maximal-function probe: the square-function ratio of (M f_j)
    against (f_j) over random non-negative families."""
    ratios, skipped = _fs_ratios(J, p, trials, seed, Nx, x_extent, K, K_max)
    base = max(ratios) if ratios else 0.0
    refinement = [base]
    if refine:
        r2, _ = _fs_ratios(J, p, trials, seed, 2 * Nx, x_extent, K, K_max)
        refinement.append(max(r2) if r2 else 0.0)
        r3, _ = _fs_ratios(J, p, 2 * trials, seed, Nx, x_extent, K, K_max)
        refinement.append(max(r3) if r3 else 0.0)
    return NormReport(
        operator="fefferman-stein-maximal",
        p=p,
        trials=trials,
        ratios=tuple(ratios),
        max_ratio=base,
        refinement=tuple(refinement),
        lambdas=(1.0,) * J,
        stable=_stable(tuple(refinement)),
        seed=seed,
        grid={"n": 1, "Nx": Nx, "x_extent": x_extent, "Nt": 0, "t_extent": 0.0},
        K=K,
        skipped=skipped,
        kind="fefferman-stein",
    )
