"""Binary grid-file format, JSON/CSV report emission, and run configuration.

The grid format is frozen and version-tagged by its magic: header
"GRUSHIN1" + u32 n, Nx, Nt + f64 x_extent, t_extent (little-endian), then
Nx^n * Nt complex samples as interleaved (re, im) float64, spatial indices
fastest and the temporal index slowest. Reports are deterministic JSON
(identical config, byte-identical bytes); wall-clock metadata goes to a
sidecar file so comparisons can ignore it.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import ConfigError, DataError, FormatError, TruncationError
from .transform import GridFunction, GridSpec

__all__ = [
    "MAGIC",
    "GridFileHeader",
    "save_grid_function",
    "load_grid_function",
    "write_report",
    "validate_report_dict",
    "RunConfig",
]

MAGIC = b"GRUSHIN1"
_HEADER = struct.Struct("<8sIIIdd")


@dataclass(frozen=True)
class GridFileHeader:
    n: int
    Nx: int
    Nt: int
    x_extent: float
    t_extent: float

    def pack(self) -> bytes:
        return _HEADER.pack(MAGIC, self.n, self.Nx, self.Nt, self.x_extent, self.t_extent)

    @classmethod
    def unpack(cls, blob: bytes) -> "GridFileHeader":
        if len(blob) < _HEADER.size:
            raise TruncationError(f"file too short for a header ({len(blob)} bytes)")
        magic, n, Nx, Nt, L, T = _HEADER.unpack_from(blob)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        return cls(n=n, Nx=Nx, Nt=Nt, x_extent=L, t_extent=T)

    def to_spec(self) -> GridSpec:
        try:
            return GridSpec(n=self.n, Nx=self.Nx, x_extent=self.x_extent,
                            Nt=self.Nt, t_extent=self.t_extent)
        except Exception as exc:
            raise FormatError(f"header violates grid invariants: {exc}") from exc


def _atomic_write(path: str, data: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_grid_function(f: GridFunction, path: str) -> None:
    header = GridFileHeader(f.spec.n, f.spec.Nx, f.spec.Nt,
                            f.spec.x_extent, f.spec.t_extent)
    payload = np.ascontiguousarray(f.values, dtype="<c16").tobytes()
    _atomic_write(path, header.pack() + payload)


def load_grid_function(path: str) -> GridFunction:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read grid file {path}: {exc}") from exc
    header = GridFileHeader.unpack(blob)
    spec = header.to_spec()
    expected = int(np.prod(spec.shape())) * 16
    body = blob[_HEADER.size:]
    if len(body) < expected:
        raise TruncationError(
            f"payload holds {len(body)} bytes, header declares {expected}"
        )
    if len(body) > expected:
        raise FormatError(f"payload holds {len(body) - expected} trailing bytes")
    values = np.frombuffer(body, dtype="<c16").reshape(spec.shape())
    if not np.all(np.isfinite(values)):
        raise DataError("payload contains non-finite samples")
    return GridFunction(spec=spec, values=values)


_REPORT_KEYS = {
    "schema", "kind", "operator", "p", "trials", "seed", "ratios", "max_ratio",
    "refinement", "lambdas", "stable", "grid", "K", "skipped", "version",
}


def write_report(report, path: str) -> str:
    """Emit a report as canonical JSON plus a CSV of per-trial ratios.

    ``report`` is any object with ``to_dict`` (or a plain dict). The JSON is
    deterministic; a "<stem>.meta.json" sidecar carries the timestamp. The
    CSV lands at "<stem>.csv" when the report has ratio entries. Returns the
    JSON path.
    """
    doc = report.to_dict() if hasattr(report, "to_dict") else dict(report)
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    _atomic_write(path, text.encode())
    stem = path[:-5] if path.endswith(".json") else path
    stamp = {"written_at": datetime.now(timezone.utc).isoformat()}
    _atomic_write(stem + ".meta.json", (json.dumps(stamp) + "\n").encode())
    if "ratios" in doc:
        lines = ["trial,ratio"] + [f"{i},{r!r}" for i, r in enumerate(doc["ratios"])]
        _atomic_write(stem + ".csv", ("\n".join(lines) + "\n").encode())
    return path


def validate_report_dict(doc: dict) -> None:
    """Schema check for norm reports; raises FormatError on violations."""
    missing = _REPORT_KEYS - set(doc)
    if missing:
        raise FormatError(f"report lacks keys: {sorted(missing)}")
    if len(doc["ratios"]) != doc["trials"] - doc["skipped"]:
        raise FormatError("ratios length must equal trials minus skipped")
    if any(r < 0 for r in doc["ratios"]):
        raise FormatError("ratios must be non-negative")
    ref = doc["refinement"]
    if not ref or abs(ref[0] - doc["max_ratio"]) > 1e-12 * max(1.0, doc["max_ratio"]):
        raise FormatError("refinement[0] must restate max_ratio")
    base = ref[0]
    stable = all(r == 0 for r in ref) if base == 0 else all(
        np.isfinite(r) and abs(r - base) <= 0.25 * base for r in ref
    )
    if bool(doc["stable"]) != bool(stable):
        raise FormatError("stable flag does not match the 25 percent rule")


_GRID_KEYS = {"n": int, "Nx": int, "x_extent": float, "Nt": int, "t_extent": float}
_PROBE_KEYS = {
    "kind": str, "operator": str, "p": float, "trials": int, "seed": int,
    "lambdas": list, "delta": float, "N": int, "mu_range": list, "samples": int,
    "family_size": int, "K_max": int, "decay": float, "Nx": int, "x_extent": float,
}
_TOP_KEYS = {"grid", "K", "pipeline", "input", "output", "report", "probe",
             "figures", "seed", "roundtrip_output"}


def _require(condition: bool, where: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{where}: {message}")


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; unknown keys are rejected with their path."""

    grid: GridSpec | None
    K: int | None
    pipeline: tuple[str, ...]
    input: str | None
    output: str | None
    report: str | None
    probe: dict
    figures: bool
    seed: int
    roundtrip_output: str | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        _require(isinstance(raw, dict), "config", "top level must be an object")
        unknown = set(raw) - _TOP_KEYS
        _require(not unknown, "config", f"unknown keys {sorted(unknown)}")
        grid = None
        if "grid" in raw:
            g = raw["grid"]
            _require(isinstance(g, dict), "grid", "must be an object")
            unknown = set(g) - set(_GRID_KEYS)
            _require(not unknown, "grid", f"unknown keys {sorted(unknown)}")
            missing = set(_GRID_KEYS) - set(g)
            _require(not missing, "grid", f"missing keys {sorted(missing)}")
            try:
                grid = GridSpec(n=int(g["n"]), Nx=int(g["Nx"]),
                                x_extent=float(g["x_extent"]), Nt=int(g["Nt"]),
                                t_extent=float(g["t_extent"]))
            except Exception as exc:
                raise ConfigError(f"grid: {exc}") from exc
        K = raw.get("K")
        if K is not None:
            _require(isinstance(K, int) and 0 <= K <= 120, "K",
                     f"must be an integer in [0, 120], got {K!r}")
        pipeline = raw.get("pipeline", [])
        _require(isinstance(pipeline, list) and all(isinstance(s, str) for s in pipeline),
                 "pipeline", "must be a list of stage strings")
        probe = raw.get("probe", {})
        _require(isinstance(probe, dict), "probe", "must be an object")
        unknown = set(probe) - set(_PROBE_KEYS)
        _require(not unknown, "probe", f"unknown keys {sorted(unknown)}")
        for key, val in probe.items():
            want = _PROBE_KEYS[key]
            ok = isinstance(val, want) or (want is float and isinstance(val, int))
            _require(ok, f"probe.{key}", f"expected {want.__name__}, got {val!r}")
        if "p" in probe:
            _require(1 < float(probe["p"]) < float("inf"), "probe.p",
                     f"must lie in (1, inf), got {probe['p']}")
        if "trials" in probe:
            _require(probe["trials"] >= 1, "probe.trials", "must be >= 1")
        figures = raw.get("figures", True)
        _require(isinstance(figures, bool), "figures", "must be a boolean")
        seed = raw.get("seed", 0)
        _require(isinstance(seed, int) and seed >= 0, "seed", "must be a non-negative integer")
        for key in ("input", "output", "report", "roundtrip_output"):
            if key in raw:
                _require(isinstance(raw[key], str) and raw[key], key,
                         "must be a non-empty path string")
        return cls(
            grid=grid,
            K=K,
            pipeline=tuple(pipeline),
            input=raw.get("input"),
            output=raw.get("output"),
            report=raw.get("report"),
            probe=dict(probe),
            figures=figures,
            seed=seed,
            roundtrip_output=raw.get("roundtrip_output"),
        )

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)
