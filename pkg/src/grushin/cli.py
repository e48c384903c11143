"""Command-line front end: ``grushin <subcommand> --config <path> [--output <dir>]``.

Subcommands: transform (spectrum report for a grid file), apply (operator
pipeline on a grid file), probe (norm | rbound | maximal | hormander |
equivalence), selftest (the full invariant suite). Exit codes: 0 ok,
2 config error, 3 data error, 4 invariant failure. GRUSHIN_THREADS caps
trial parallelism; reports stay bit-identical either way.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .calculus import hormander_check, named_symbol
from .errors import ConfigError, DataError, GrushinError
from .gfunc import g_norm_equivalence_report
from .gridio import RunConfig, load_grid_function, save_grid_function, write_report
from .bochner import maximal_domination_check
from .normlab import (
    build_operator,
    fefferman_stein_probe,
    lp_norm,
    make_test_slice,
    operator_norm_probe,
    r_bound_probe,
)
from .transform import forward_transform, inverse_transform

__all__ = ["main"]


def _out_path(cfg: RunConfig, args, default_name: str) -> str:
    name = cfg.report or default_name
    base = args.output or "."
    return name if os.path.isabs(name) else os.path.join(base, name)


def _emit(cfg: RunConfig, args, doc_or_report, default_name: str) -> str:
    path = _out_path(cfg, args, default_name)
    write_report(doc_or_report, path)
    if cfg.figures:
        from .plots import render_report

        doc = doc_or_report.to_dict() if hasattr(doc_or_report, "to_dict") else doc_or_report
        render_report(doc, path[:-5] + ".png" if path.endswith(".json") else path + ".png")
    return path


def _cmd_transform(cfg: RunConfig, args) -> int:
    if cfg.input is None or cfg.K is None:
        raise ConfigError("transform needs 'input' and 'K'")
    f = load_grid_function(cfg.input)
    c = forward_transform(f, cfg.K)
    energies = {str(m): float(np.sum(np.abs(sl.coeffs) ** 2))
                for m, sl in sorted(c.slices.items())}
    doc = {
        "schema": "grushin.transform-report/1",
        "K": cfg.K,
        "grid": {"n": f.spec.n, "Nx": f.spec.Nx, "x_extent": f.spec.x_extent,
                 "Nt": f.spec.Nt, "t_extent": f.spec.t_extent},
        "slice_energy": energies,
        "dropped_dc_energy": c.dropped_dc_energy,
        "top_degree_mass": c.top_degree_mass,
        "version": __version__,
    }
    if cfg.roundtrip_output:
        back = inverse_transform(c)
        save_grid_function(back, cfg.roundtrip_output)
        doc["roundtrip_max_err"] = float(np.abs(back.values - f.values).max())
    path = _out_path(cfg, args, "transform-report.json")
    write_report(doc, path)
    print(path)
    return 0


def _cmd_apply(cfg: RunConfig, args) -> int:
    if cfg.input is None or cfg.output is None or cfg.K is None or not cfg.pipeline:
        raise ConfigError("apply needs 'input', 'output', 'K' and a 'pipeline'")
    f = load_grid_function(cfg.input)
    op = build_operator(list(cfg.pipeline))
    out = inverse_transform(op(forward_transform(f, cfg.K)))
    save_grid_function(out, cfg.output)
    doc = {
        "schema": "grushin.apply-report/1",
        "pipeline": list(cfg.pipeline),
        "K": cfg.K,
        "input_l2": f.l2_norm(),
        "output_l2": out.l2_norm(),
        "version": __version__,
    }
    if cfg.report:
        write_report(doc, _out_path(cfg, args, "apply-report.json"))
    print(cfg.output)
    return 0


def _default_lambdas(seed: int, count: int = 8) -> list[float]:
    rng = np.random.default_rng([seed & 0x7FFFFFFF, 0xB0])
    return [float(v) for v in 10.0 ** rng.uniform(-1.0, 1.0, count)]


def _cmd_probe(cfg: RunConfig, args) -> int:
    probe = dict(cfg.probe)
    kind = probe.get("kind")
    if kind is None:
        raise ConfigError("probe.kind is required (norm|rbound|maximal|hormander|equivalence)")
    seed = int(probe.get("seed", cfg.seed))
    if kind == "norm":
        if "operator" not in probe:
            raise ConfigError("probe.operator is required for a norm probe")
        rep = operator_norm_probe(
            probe["operator"],
            p=float(probe.get("p", 2.0)),
            trials=int(probe.get("trials", 64)),
            seed=seed,
            grid=cfg.grid,
            K=cfg.K if cfg.K is not None else 8,
        )
        print(_emit(cfg, args, rep, "norm-report.json"))
        return 0
    if kind == "rbound":
        if "operator" not in probe:
            raise ConfigError("probe.operator is required for an rbound probe")
        lambdas = probe.get("lambdas") or _default_lambdas(seed)
        rep = r_bound_probe(
            probe["operator"],
            lambdas,
            p=float(probe.get("p", 4.0)),
            trials=int(probe.get("trials", 64)),
            seed=seed,
            Nx=int(probe.get("Nx", 512)),
            x_extent=float(probe.get("x_extent", 20.0)),
            K=cfg.K if cfg.K is not None else 8,
            K_max=int(probe.get("K_max", 7)),
            decay=float(probe.get("decay", 2.0)),
        )
        print(_emit(cfg, args, rep, "rbound-report.json"))
        return 0
    if kind == "maximal":
        delta = float(probe.get("delta", 1.0))
        size = int(probe.get("family_size", 16))
        K = cfg.K if cfg.K is not None else 16
        reports = [
            maximal_domination_check(
                make_test_slice(1.0, K, max(K - 4, 1), (seed << 8) | i, 1.2),
                delta=delta,
            )
            for i in range(size)
        ]
        fs = fefferman_stein_probe(seed=seed)
        doc = {
            "schema": "grushin.domination-report/1",
            "delta": delta,
            "lam": 1.0,
            "c_emp": max(r.c_emp for r in reports),
            "c_emp_refined": max(r.c_emp_refined for r in reports),
            "stable": all(r.stable for r in reports) and fs.stable,
            "one_sided_max": max(r.one_sided_max for r in reports),
            "r_count": reports[0].r_count,
            "warning": reports[0].warning,
            "fefferman_stein_max": fs.max_ratio,
            "version": __version__,
        }
        print(_emit(cfg, args, doc, "maximal-report.json"))
        return 0
    if kind == "hormander":
        if "operator" not in probe:
            raise ConfigError("probe.operator names the symbol for a hormander probe")
        sym = named_symbol(probe["operator"])
        rng = probe.get("mu_range") or [1.0, 1e6]
        rep = hormander_check(
            sym,
            N=int(probe.get("N", 2)),
            mu_range=(float(rng[0]), float(rng[1])),
            samples=int(probe.get("samples", 257)),
        )
        doc = rep.to_dict()
        doc["operator"] = probe["operator"]
        doc["version"] = __version__
        print(_emit(cfg, args, doc, "hormander-report.json"))
        return 0
    if kind == "equivalence":
        K = cfg.K if cfg.K is not None else 8
        lambdas = probe.get("lambdas") or [0.5, 1.0, 2.0, 4.0]
        per = int(probe.get("trials", 8))
        family = [
            make_test_slice(float(lam), K, K, (seed << 12) | (i << 4) | j, 1.0)
            for i, lam in enumerate(lambdas)
            for j in range(per)
        ]
        rep = g_norm_equivalence_report(family, p=float(probe.get("p", 4.0)))
        doc = rep.to_dict()
        doc["version"] = __version__
        print(_emit(cfg, args, doc, "equivalence-report.json"))
        return 0
    raise ConfigError(f"unknown probe kind {kind!r}")


def _cmd_selftest(cfg: RunConfig | None, args) -> int:
    from .selftest import run_all

    seed = cfg.seed if cfg is not None else 0
    results = run_all(seed=seed)
    failures = [r for r in results if not r.passed]
    if args.output:
        doc = {
            "schema": "grushin.selftest-report/1",
            "passed": not failures,
            "results": [
                {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
            ],
            "seed": seed,
            "version": __version__,
        }
        write_report(doc, os.path.join(args.output, "selftest-report.json"))
    return 4 if failures else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grushin",
        description="Spectral calculus and boundedness lab for the Grushin operator",
    )
    parser.add_argument("--version", action="version", version=f"grushin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("transform", "analyze a grid file and report its joint spectrum"),
        ("apply", "run an operator pipeline over a grid file"),
        ("probe", "norm / rbound / maximal / hormander / equivalence probes"),
        ("selftest", "run the full invariant suite (exit 4 on failure)"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=(name != "selftest"),
                       help="JSON run configuration")
        p.add_argument("--output", default=None, help="directory for reports")
    return parser


_HANDLERS = {
    "transform": _cmd_transform,
    "apply": _cmd_apply,
    "probe": _cmd_probe,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.output:
            os.makedirs(args.output, exist_ok=True)
        if args.command == "selftest":
            cfg = RunConfig.load(args.config) if args.config else None
            return _cmd_selftest(cfg, args)
        cfg = RunConfig.load(args.config)
        return _HANDLERS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except GrushinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
