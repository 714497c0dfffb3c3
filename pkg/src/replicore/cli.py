"""Command-line front end.

Subcommands: ``power``, ``samplesize``, ``bi``, ``profile``, ``eer`` and
``simulate``. Each prints one flat record. ``--format`` picks the rendering:

* ``table`` -- aligned ``key  value`` lines (default),
* ``csv``   -- a header row of keys and one row of values,
* ``json``  -- a single flat JSON object.

The default format can also be set with the ``REPLICORE_FORMAT`` environment
variable; the flag wins. Floats are printed with 6 significant digits.

Exit codes: 0 success, 2 usage or input error, 3 unattainable sample size,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys

from . import broad, eer, power, profiles, readers, simulate
from .errors import DomainError, StructureError
from .model import (
    DesignSpec,
    EffectContext,
    MixedModelParams,
    TwoSampleSummary,
    cohens_d,
    observed_effect_size,
    t_statistic,
)

EXIT_OK, EXIT_USAGE, EXIT_UNATTAINABLE, EXIT_IO = 0, 2, 3, 4
FORMATS = ("table", "csv", "json")
ENV_FORMAT = "REPLICORE_FORMAT"
UNATTAINABLE = "UNATTAINABLE"


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        if not math.isfinite(v):
            return None
        return float(format(v, ".6g"))
    return v


def render(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({k: _json_value(v) for k, v in record.items()}) + "\n"
    if fmt == "csv":
        return ",".join(record) + "\n" + ",".join(_fmt(v) for v in record.values()) + "\n"
    width = max(len(k) for k in record) + 2
    return "".join(f"{k:<{width}}{_fmt(v)}\n" for k, v in record.items())


def _read_text(path: str, stdin) -> str:
    if path == "-":
        return stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


# -- subcommands -------------------------------------------------------------

def cmd_power(args, out, stdin):
    if args.delta < 0:
        raise DomainError("--delta must be nonnegative; swap the arms for a negative effect")
    design = DesignSpec(args.n1, args.n2, args.alpha)
    ctx = EffectContext(args.delta, args.omega)
    pb = power.replicability_power_exact(ctx, design)
    rec = {
        "delta": args.delta,
        "omega": args.omega,
        "n1": args.n1,
        "n2": args.n2,
        "alpha": args.alpha,
        "p_rep": pb.p_rep,
        "p_wrong_direction": pb.p_wrong_direction,
        "p_nonsig": pb.p_nonsig,
        "initial_power": power.initial_power(args.delta, design),
        "p_rep_normal_approx": power.replicability_power_normal_approx(ctx, design),
        "limiting_power": power.limiting_power(ctx),
    }
    return rec, EXIT_OK


def cmd_samplesize(args, out, stdin):
    ctx = EffectContext(args.delta, args.omega)
    initial = power.initial_sample_size(args.delta, args.alpha, args.power, exact=args.exact)
    follow = power.followup_sample_size(ctx, args.alpha, args.power, exact=args.exact)
    rec = {
        "delta": args.delta,
        "omega": args.omega,
        "alpha": args.alpha,
        "power": args.power,
        "method": "exact" if args.exact else "normal",
        "n_initial": initial.n_per_arm,
        "n_initial_real": initial.n_real,
        "n_followup": follow.n_per_arm if follow.attainable else UNATTAINABLE,
        "n_followup_real": follow.n_real,
        "achieved_power": follow.achieved_power,
        "relative_efficiency": power.relative_efficiency(ctx, args.alpha, args.power),
        "relative_efficiency_real": power.relative_efficiency(ctx, args.alpha, args.power, rounded=False),
        "limiting_power": follow.limit,
    }
    if not follow.attainable:
        print(
            f"unattainable: limiting power Phi(delta/omega) = {follow.limit:.4f} "
            f"does not exceed the target {args.power}",
            file=sys.stderr,
        )
        return rec, EXIT_UNATTAINABLE
    return rec, EXIT_OK


def cmd_bi(args, out, stdin):
    modes = [
        args.data is not None,
        any(v is not None for v in (args.mean1, args.mean2, args.sd)),
        args.delta_star is not None,
    ]
    if sum(modes) != 1:
        raise UsageError("give exactly one of --data, --mean1/--mean2/--sd, or --delta-star")
    rec = {}
    if args.delta_star is not None:
        if args.n1 is None or args.n2 is None:
            raise UsageError("--delta-star needs --n1 and --n2")
        design = DesignSpec(args.n1, args.n2, args.alpha)
        d = args.delta_star
        rec.update(delta_star=d, n1=args.n1, n2=args.n2, alpha=args.alpha, omega=args.omega)
        rec["classical_p_value"] = broad.bi_p_value(d, design, 0.0)
        rec["bi_p_value"] = broad.bi_p_value(d, design, args.omega)
        rec["bi_conf_level"] = broad.bi_confidence_level(design, args.omega)
        if args.omega > 0:
            rec["bi_p_value_asymptotic"] = broad.bi_p_value_asymptotic(d, args.omega)
        return rec, EXIT_OK

    if args.data is not None:
        summary, labels = readers.read_two_sample(_read_text(args.data, stdin), args.arm1_label)
        rec.update(arm1=labels[0], arm2=labels[1])
    else:
        missing = [f for f in ("mean1", "mean2", "sd", "n1", "n2") if getattr(args, f) is None]
        if missing:
            raise UsageError("summary mode needs " + ", ".join("--" + m for m in missing))
        summary = TwoSampleSummary(args.mean1, args.mean2, args.sd, args.n1, args.n2)
    report = broad.broad_inference_report(summary, args.alpha, args.omega)
    lo, hi = broad.classical_interval(summary, args.alpha)
    rec.update(
        mean1=summary.mean1,
        mean2=summary.mean2,
        pooled_sd=summary.pooled_sd,
        n1=summary.n1,
        n2=summary.n2,
        alpha=args.alpha,
        omega=args.omega,
        delta_star=observed_effect_size(summary),
        cohens_d=cohens_d(summary),
        t_statistic=t_statistic(summary),
        classical_p_value=report.classical_p_value,
        classical_low=lo,
        classical_high=hi,
        bi_p_value=report.bi_p_value,
        bi_conf_level=report.bi_conf_level,
        bi_low=report.bi_interval_low,
        bi_high=report.bi_interval_high,
    )
    return rec, EXIT_OK


def cmd_profile(args, out, stdin):
    design = DesignSpec(args.n1, args.n2, args.alpha)
    grid = profiles.build_profile(args.delta_star, design, args.omega_max, args.steps)
    if args.out_csv == "-":
        out.write(profiles.emit_csv(grid).decode("utf-8"))
    elif args.out_csv:
        profiles.emit_csv(grid, args.out_csv)
    if args.out_svg:
        profiles.emit_svg(grid, args.out_svg, reference_lines=(args.alpha, 1.0 - args.alpha))
    p_cross = profiles.crossing_point(grid, "bi_p_value", args.alpha)
    c_cross = profiles.crossing_point(grid, "bi_conf_level", args.conf_threshold)
    rec = {
        "delta_star": args.delta_star,
        "n1": args.n1,
        "n2": args.n2,
        "alpha": args.alpha,
        "omega_max": args.omega_max,
        "steps": args.steps,
        "bi_p_value_at_0": grid.columns["bi_p_value"][0],
        "omega_p_crosses_alpha": p_cross if p_cross is not None else "NONE",
        "conf_threshold": args.conf_threshold,
        "omega_conf_crosses_threshold": c_cross if c_cross is not None else "NONE",
    }
    if args.out_csv == "-":
        # the grid went to stdout; keep the summary off it
        sys.stderr.write(render(rec, "table"))
        return None, EXIT_OK
    return rec, EXIT_OK


def cmd_eer(args, out, stdin):
    if args.source == "icc":
        b = eer.eer_bound_from_icc(args.rho)
        return {"rho": b.rho, "omega_upper": b.omega_upper}, EXIT_OK
    if args.source == "table":
        w = eer.eer_from_variance_proportions(args.interaction, args.error)
        return {"prop_interaction": args.interaction, "prop_error": args.error, "omega": w}, EXIT_OK
    if args.source == "multilab":
        return dict(eer.MULTILAB_EER), EXIT_OK
    records = readers.read_rcb(_read_text(args.data, stdin))
    vc = eer.rcb_variance_components(records, warn=False)
    y, layout = eer.rcb_table_from_records(records)
    rec = {
        "blocks": layout.b,
        "treatments": layout.t,
        "reps": layout.r,
        "sigma2_block": vc.sigma2_block,
        "sigma2_interaction": vc.sigma2_interaction,
        "sigma2_error": vc.sigma2_error,
        "eer_hat": vc.eer_hat,
        "truncated": vc.truncated,
        "ms_block": vc.ms_block,
        "ms_treatment": vc.ms_treatment,
        "ms_interaction": vc.ms_interaction,
        "ms_error": vc.ms_error,
    }
    return rec, EXIT_OK


def cmd_simulate(args, out, stdin):
    effect_mode = args.delta is not None or args.omega is not None
    raw_mode = args.mu1 is not None or args.sigma_delta is not None
    if effect_mode and raw_mode:
        raise UsageError("use either --delta/--omega or --mu1/--sigma-delta, not both")
    if raw_mode:
        params = MixedModelParams(
            args.mu1 if args.mu1 is not None else args.mu2,
            args.mu2,
            args.sigma_e,
            args.sigma_delta or 0.0,
            args.sigma_theta,
        )
    else:
        params = MixedModelParams.from_effect(
            args.delta or 0.0, args.omega or 0.0, args.sigma_e, args.sigma_theta, args.mu2
        )
    design = DesignSpec(args.n1, args.n2, args.alpha)
    cfg = simulate.SimConfig(params, design, args.reps, args.seed)
    tally = simulate.run_tally(cfg, threads=args.threads)
    rec = {
        "delta": params.delta,
        "omega": params.omega,
        "sigma_theta": params.sigma_theta,
        "n1": args.n1,
        "n2": args.n2,
        "alpha": args.alpha,
        "seed": args.seed,
    }
    rec.update(tally.as_dict())
    ctx = EffectContext(abs(params.delta), params.omega)
    pb = power.replicability_power_exact(ctx, design)
    rec.update(
        analytic_p_rep=pb.p_rep,
        analytic_p_wrong_direction=pb.p_wrong_direction,
        analytic_p_nonsig=pb.p_nonsig,
        analytic_coverage_naive=broad.bi_confidence_level(design, params.omega),
    )
    return rec, EXIT_OK


# -- parser ------------------------------------------------------------------

def _prob(text):
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1: {text}")
    return v


def _nonneg(text):
    v = float(text)
    if not (math.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError(f"must be a nonnegative number: {text}")
    return v


def _count(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None, help="output format")

    p = argparse.ArgumentParser(
        prog="replicore",
        description="Replicability of two-sample t-test inferences across research environments.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("power", parents=[common], help="replicability power breakdown")
    s.add_argument("--delta", type=float, required=True, help="treatment effect size")
    s.add_argument("--omega", type=_nonneg, required=True, help="environmental effect ratio")
    s.add_argument("--n1", type=int, required=True)
    s.add_argument("--n2", type=int, required=True)
    s.add_argument("--alpha", type=_prob, default=0.05)
    s.set_defaults(func=cmd_power)

    s = sub.add_parser("samplesize", parents=[common], help="initial and follow-up sample sizes")
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--omega", type=_nonneg, required=True)
    s.add_argument("--alpha", type=_prob, default=0.05)
    s.add_argument("--power", type=_prob, default=0.8)
    s.add_argument("--exact", action="store_true", help="refine sizes with exact t-test power")
    s.set_defaults(func=cmd_samplesize)

    s = sub.add_parser("bi", parents=[common], help="broad-inference p-value, confidence level and interval")
    s.add_argument("--data", help="CSV file with header group,value ('-' for stdin)")
    s.add_argument("--arm1-label", help="group label to treat as arm 1")
    s.add_argument("--mean1", type=float)
    s.add_argument("--mean2", type=float)
    s.add_argument("--sd", type=float, help="pooled standard deviation")
    s.add_argument("--delta-star", type=float, help="observed effect size")
    s.add_argument("--n1", type=int)
    s.add_argument("--n2", type=int)
    s.add_argument("--alpha", type=_prob, default=0.05)
    s.add_argument("--omega", type=_nonneg, default=0.0)
    s.set_defaults(func=cmd_bi)

    s = sub.add_parser("profile", parents=[common], help="EER profile grid, CSV and SVG")
    s.add_argument("--delta-star", type=float, required=True)
    s.add_argument("--n1", type=int, required=True)
    s.add_argument("--n2", type=int, required=True)
    s.add_argument("--alpha", type=_prob, default=0.05)
    s.add_argument("--omega-max", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=101)
    s.add_argument("--conf-threshold", type=_prob, default=0.8)
    s.add_argument("--out-csv", help="write the grid as CSV ('-' for stdout)")
    s.add_argument("--out-svg", help="write an SVG profile plot")
    s.set_defaults(func=cmd_profile)

    s = sub.add_parser("eer", help="plausible EER values")
    esub = s.add_subparsers(dest="source", required=True)
    e = esub.add_parser("icc", parents=[common], help="upper bound from an intraclass correlation")
    e.add_argument("--rho", type=float, required=True)
    e = esub.add_parser("rcb", parents=[common], help="variance components of a balanced RCB design")
    e.add_argument("--data", required=True, help="CSV with header block,treatment,rep,value ('-' for stdin)")
    e = esub.add_parser("table", parents=[common], help="EER from variance proportions")
    e.add_argument("--interaction", type=float, required=True)
    e.add_argument("--error", type=float, required=True)
    esub.add_parser("multilab", parents=[common], help="bundled multi-laboratory EER table")
    s.set_defaults(func=cmd_eer)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo tally of the follow-up model")
    s.add_argument("--delta", type=float, help="treatment effect size (with --omega)")
    s.add_argument("--omega", type=_nonneg)
    s.add_argument("--mu1", type=float)
    s.add_argument("--mu2", type=float, default=0.0)
    s.add_argument("--sigma-e", type=float, default=1.0)
    s.add_argument("--sigma-delta", type=_nonneg)
    s.add_argument("--sigma-theta", type=_nonneg, default=0.0)
    s.add_argument("--n1", type=int, required=True)
    s.add_argument("--n2", type=int, required=True)
    s.add_argument("--alpha", type=_prob, default=0.05)
    s.add_argument("--reps", type=_count, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=_count, default=1)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None, stdout=None, stdin=None) -> int:
    stdout = stdout or sys.stdout
    stdin = stdin or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    fmt = args.format or os.environ.get(ENV_FORMAT) or "table"
    if fmt not in FORMATS:
        print(f"error: {ENV_FORMAT}={fmt!r} is not one of {', '.join(FORMATS)}", file=sys.stderr)
        return EXIT_USAGE
    buf = io.StringIO()
    try:
        rec, code = args.func(args, buf, stdin)
    except (UsageError, DomainError, StructureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    stdout.write(buf.getvalue())
    if rec is not None:
        stdout.write(render(rec, fmt))
    return code


def run():
    sys.exit(main())
