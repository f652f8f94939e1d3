"""Command-line front end.

Verbs:
  solve     one (k, delta) cell
  table     the full k x delta grid
  scaling   target-accuracy study with log-log slope fits
  diagnose  frame bounds, dual decay, quasi-orthogonality, plane-wave probes

A flat JSON config file can seed any verb; explicit flags override it.
Exits 0 on success; on failure prints one machine-parsable line
``error: <message>`` to stderr and exits 2.
"""

import argparse
import json
import sys

from . import analysis
from .experiments import (
    DEFAULT_SCALING_DELTAS,
    ExperimentConfig,
    emit,
    run_case,
    scaling_study,
)
from .gaussian_states import constant_operator
from .phase_space import LatticeSpec


def _float_list(text):
    return tuple(float(v) for v in text.split(",") if v)


def _build_parser():
    parser = argparse.ArgumentParser(prog="gcshelm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--config", help="flat JSON config file; flags override it")
        p.add_argument("--case", choices=["homogeneous", "heterogeneous"])
        p.add_argument("--k", type=_float_list, help="comma-separated wavenumbers")
        p.add_argument("--delta", type=_float_list, help="comma-separated deltas")
        p.add_argument("--window", type=_float_list, help="error window 'a,b'")
        p.add_argument("--cutoff", type=float, help="relative singular value cutoff")
        p.add_argument("--quad-density", type=int, help="base nodes per wavelength")
        p.add_argument("--fem-xend", type=float, help="FEM truncation point")
        p.add_argument("--out", help="output file path")
        p.add_argument("--format", choices=["csv", "json"], help="output format")

    p_solve = sub.add_parser("solve", help="run one (k, delta) cell")
    common(p_solve)
    p_table = sub.add_parser("table", help="run the k x delta grid")
    common(p_table)
    p_scaling = sub.add_parser("scaling", help="target-accuracy scaling study")
    common(p_scaling)
    p_scaling.add_argument("--target", type=float, help="relative H1_k target accuracy")
    p_diag = sub.add_parser("diagnose", help="frame and decay diagnostics")
    p_diag.add_argument("--hbar", type=_float_list, default=(0.05, 0.01))
    p_diag.add_argument(
        "--box", type=int, default=25, help="frame-operator box half width in lattice steps"
    )
    p_diag.add_argument("--out", help="output file path")
    return parser


def _config_from(args, default_deltas=None):
    data = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data.update(json.load(fh))
    overrides = {
        "case": args.case,
        "ks": args.k,
        "deltas": args.delta,
        "error_window": args.window,
        "cutoff": args.cutoff,
        "quad_density": args.quad_density,
        "fem_x_end": args.fem_xend,
        "output_path": args.out,
        "output_format": args.format,
    }
    if getattr(args, "target", None) is not None:
        overrides["target_accuracy"] = args.target
    data.update({k: v for k, v in overrides.items() if v is not None})
    if default_deltas is not None and "deltas" not in data:
        data["deltas"] = default_deltas
    return ExperimentConfig.from_dict(data)


def _emit_records(records, config):
    text = emit(records, config.output_format or "csv", config.output_path)
    if config.output_path is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(records)} records to {config.output_path}")


def _run_diagnose(args):
    report = {}
    for hbar in args.hbar:
        spec = LatticeSpec(hbar)
        fb = analysis.frame_bounds(spec, box_half_width=args.box)
        pairs, coeffs, residual = analysis.dual_frame_coefficients(
            spec, (0, 0), box_half_width=min(12, args.box)
        )
        rate, r2, _ = analysis.dual_decay_fit(pairs, coeffs, (0, 0))
        probe = analysis.quasi_orthogonality_probe(
            spec, constant_operator(-1.0, 0.0, -1.0)
        )
        report[f"hbar={hbar:g}"] = {
            "alpha_est": fb.alpha_est,
            "beta_est": fb.beta_est,
            "ratio": fb.beta_est / fb.alpha_est,
            "dual_solve_residual": residual,
            "dual_decay_rate": rate,
            "dual_decay_r_squared": r2,
            "quasi_orthogonality": {str(d): v for d, v in probe.items()},
        }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote diagnostics to {args.out}")
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "diagnose":
            _run_diagnose(args)
            return 0
        default_deltas = DEFAULT_SCALING_DELTAS if args.verb == "scaling" else None
        config = _config_from(args, default_deltas)
        if args.verb == "solve":
            if len(config.ks) != 1 or len(config.deltas) != 1:
                raise ValueError("solve expects exactly one k and one delta")
            _emit_records(run_case(config), config)
        elif args.verb == "table":
            _emit_records(run_case(config), config)
        elif args.verb == "scaling":
            if config.target_accuracy is None:
                raise ValueError("scaling needs --target")
            study = scaling_study(config)
            payload = {
                "ks": study.ks,
                "deltas": study.deltas,
                "ndofs": study.ndofs,
                "errors": study.errors,
                "dropped_ks": study.dropped_ks,
                "ndofs_slope": study.ndofs_slope,
                "delta_slope": study.delta_slope,
            }
            text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
            if config.output_path:
                with open(config.output_path, "w") as fh:
                    fh.write(text)
                print(f"wrote scaling study to {config.output_path}")
            else:
                sys.stdout.write(text)
        return 0
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
