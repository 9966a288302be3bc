"""``fracdim <experiment> --config <path> [--out <dir>]``.

Every run writes ``report.txt`` (resolved config plus all findings) and
one or more CSV tables into the output directory. Failures print a JSON
error record on stderr, write ``error.json`` and exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import coarse, estimators as est, formulas, lq, separation
from .config import KINDS, ExperimentConfig, dump_resolved, load_config
from .errors import DomainError, FracdimError
from .ifs import IFS1D
from .measures import Bernoulli, entropy, lyapunov

CSV_SCHEMAS = """\
CSV outputs (UTF-8, header row first):
  separation.csv        level, min_gap, min_gap_float, witness_1, witness_2
                        (words are space-separated symbol indices; min_gap is
                        exact "p/q" in rational mode, "inf" across ratio classes)
  lq.csv                q, tau, lq_dim, residual, dropped
  coarse_weights.csv    word, good, weight, log2_weight
  dimension_reports.csv name, predicted, flags, warnings
  samples.csv           "# key=value" header lines, then x (or x, y), one point per line
  scales.csv            label, method, scale, log2_scale, value
                        (value: bin entropy in bits, mean log2 ball mass, or
                        pair fraction, by method)
  estimates.csv         label, method, estimate, standard_error, finest_scale,
                        coarsest_scale, predicted, extra
Exit codes: 0 ok, 2 config/parse error, 3 resource budget, 4 guard violation,
5 domain error, 6 cross-check failure, 1 anything else.
"""


class Run:
    """Collects report sections and tables for one experiment."""

    def __init__(self, cfg: ExperimentConfig, out: Path):
        self.cfg = cfg
        self.out = out
        self.lines: list[str] = []
        self.reports: list[formulas.DimensionReport] = []
        self.estimates: list[tuple[str, est.DimensionEstimate, float | None]] = []

    def say(self, text: str = "") -> None:
        self.lines.append(text)

    def add_report(self, rep: formulas.DimensionReport) -> None:
        self.reports.append(rep)
        self.say(f"[{rep.name}] predicted dimension = {rep.predicted:.6f}")
        for k, v in rep.inputs.items():
            self.say(f"    input {k} = {_fmt(v)}")
        for k, v in rep.details.items():
            self.say(f"    detail {k} = {_fmt(v)}")
        for k, v in rep.hypothesis_flags.items():
            self.say(f"    hypothesis {k}: {'unknown' if v is None else v}")
        for w in rep.warnings:
            self.say(f"    WARNING: {w}")

    def add_estimate(self, label: str, e: est.DimensionEstimate, predicted: float | None) -> None:
        self.estimates.append((label, e, predicted))
        extra = ", ".join(f"{k}={_fmt(v)}" for k, v in e.extra.items())
        self.say(f"  {label} {e.method}: {e.estimate:.4f} +/- {e.standard_error:.4f} "
                 f"over scales [{e.scale_range[0]:g}, {e.scale_range[1]:g}]" + (f" ({extra})" if extra else ""))

    def write_table(self, name: str, header: list[str], rows) -> None:
        with open(self.out / name, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)

    def finish(self) -> None:
        if self.reports:
            self.write_table("dimension_reports.csv", ["name", "predicted", "flags", "warnings"], [
                [r.name, repr(r.predicted),
                 ";".join(f"{k}={'unknown' if v is None else v}" for k, v in r.hypothesis_flags.items()),
                 ";".join(r.warnings)] for r in self.reports])
        if self.estimates:
            self.write_table("scales.csv", ["label", "method", "scale", "log2_scale", "value"], [
                [label, e.method, repr(p["scale"]), repr(math.log2(p["scale"])), repr(p["value"])]
                for label, e, _ in self.estimates for p in e.per_scale])
            self.write_table("estimates.csv", ["label", "method", "estimate", "standard_error",
                                               "finest_scale", "coarsest_scale", "predicted", "extra"], [
                [label, e.method, repr(e.estimate), repr(e.standard_error), repr(e.scale_range[0]),
                 repr(e.scale_range[1]), "" if pred is None else repr(pred),
                 ";".join(f"{k}={v}" for k, v in e.extra.items())]
                for label, e, pred in self.estimates])
        header = [
            "fracdim report",
            f"experiment: {self.cfg.experiment}",
            "",
            "resolved configuration (rerun with this to reproduce):",
            *("    " + ln for ln in dump_resolved(self.cfg).rstrip().splitlines()),
            "",
        ]
        (self.out / "report.txt").write_text("\n".join(header + self.lines) + "\n", encoding="utf-8")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _word(w) -> str:
    return " ".join(str(s) for s in w)


def _separation_flag(rep: separation.SeparationReport) -> bool:
    return not rep.has_exact_overlap


def _stats(run: Run, mu, ifs: IFS1D, label: str = "") -> tuple[float, float]:
    h, chi = entropy(mu), lyapunov(mu, ifs)
    run.say(f"entropy{label} h = {h:.6f} bits, Lyapunov exponent{label} chi = {chi:.6f} bits")
    return h, chi


# -- experiments ------------------------------------------------------------

def do_separation(run: Run) -> None:
    cfg = run.cfg
    rep = separation.separation_report(cfg.ifs, cfg.params["max_level"], cfg.params["budget"])
    rows = []
    for lv in rep.per_level:
        w1, w2 = lv.witness_pair if lv.witness_pair else ("", "")
        rows.append([lv.n, str(lv.min_gap), repr(float(lv.min_gap)), _word(w1), _word(w2)])
        run.say(f"level {lv.n}: min gap {lv.min_gap} ({float(lv.min_gap):.6g})"
                + (f", witness {w1} / {w2}" if lv.witness_pair else ""))
    run.write_table("separation.csv", ["level", "min_gap", "min_gap_float", "witness_1", "witness_2"], rows)
    run.say(f"c estimate: {rep.c_estimate}")
    if rep.exact_overlap:
        n, (w1, w2) = rep.exact_overlap
        run.say(f"FINDING: exact overlap at level {n}: words ({_word(w1)}) and ({_word(w2)}) induce the same map")
    for note in rep.notes:
        run.say(f"note: {note}")


def do_dims(run: Run) -> None:
    cfg = run.cfg
    h, chi = _stats(run, cfg.measure, cfg.ifs)
    s = formulas.similarity_dimension(cfg.ifs)
    run.say(f"similarity dimension s = {s:.6f}")
    sep = separation.separation_report(cfg.ifs, cfg.params["max_level"], cfg.params["budget"])
    pred = formulas.projection_dimension(h, chi)
    run.add_report(formulas.DimensionReport(
        "projection", pred, {"h": h, "chi": chi},
        {"exponential_separation_evidence": _separation_flag(sep)},
        {"separation_levels": cfg.params["max_level"], "c_estimate": sep.c_estimate}))
    ratios = [abs(r) for r in cfg.ifs.ratios]
    weights = [float(r) ** s for r in ratios]
    total = math.fsum(weights)
    a = lq.alpha_min([w / total for w in weights], ratios)
    if h / -chi <= s + 1e-12:
        lb = formulas.lq_lower_bound(h, chi, s, min(a.value, s))
        lb.hypothesis_flags["exponential_separation_evidence"] = _separation_flag(sep)
        run.add_report(lb)
    if cfg.ifs2 is not None and cfg.measure2 is not None:
        _convolution_report(run)


def _homogeneous_ratio(ifs: IFS1D, name: str):
    if not ifs.is_homogeneous or ifs.ratios[0] < 0:
        raise DomainError(f"{name} must be homogeneous with a positive ratio for the convolution formula")
    return ifs.ratios[0]


def _convolution_report(run: Run) -> formulas.DimensionReport:
    cfg = run.cfg
    r1 = _homogeneous_ratio(cfg.ifs, "ifs")
    r2 = _homogeneous_ratio(cfg.ifs2, "ifs2")
    h1, h2 = entropy(cfg.measure), entropy(cfg.measure2)
    s1, s2, _ = separation.joint_separation_report(cfg.ifs, cfg.ifs2, cfg.params["max_level"], cfg.params["budget"])
    rep = formulas.convolution_dimension(h1, r1, h2, r2, separation=_separation_flag(s1) and _separation_flag(s2))
    run.add_report(rep)
    return rep


def do_tau(run: Run) -> None:
    cfg = run.cfg
    if not isinstance(cfg.measure, Bernoulli):
        raise DomainError("the moment equation needs Bernoulli weights")
    p, ratios = cfg.measure.p, cfg.ifs.ratios
    rows = []
    for q in cfg.params["q"]:
        pt = lq.solve_tau(p, ratios, float(q))
        rows.append([str(q), repr(pt.tau), repr(pt.lq_dim), repr(pt.residual), pt.dropped])
        run.say(f"q = {q}: tau = {pt.tau:.10f}, L^q dimension = {pt.lq_dim:.10f} (residual {pt.residual:.2e})")
    run.write_table("lq.csv", ["q", "tau", "lq_dim", "residual", "dropped"], rows)
    a = lq.alpha_min(p, ratios)
    run.say(f"alpha_min = {a.value:.10f} (extrapolated {a.extrapolated:.10f}, closed form {a.candidate:.10f})")


def do_coarse(run: Run) -> None:
    cfg = run.cfg
    pr = cfg.params
    cg = coarse.coarse_bernoulli(cfg.measure, cfg.ifs, pr["m"], pr["delta"], pr["epsilon"],
                                 pr["variant"], pr["budget"])
    run.say(f"m = {cg.m}, delta = {cg.delta}, epsilon = {cg.epsilon}, variant = {cg.variant}")
    run.say(f"entropy h = {cg.entropy:.6f}, Lyapunov chi = {cg.lyapunov:.6f}")
    run.say(f"good words: {len(cg.good_words)} of {len(cg.words)}; good mass = {float(cg.good_mass):.6f}")
    run.say(f"normalizer c = {float(cg.normalizer):.6f}; in [1/2, 2]: {cg.c_in_bounds}")
    run.say(f"hypothesis good_mass > 1 - delta: {cg.good_mass_ok}")
    run.say(f"hypothesis 1/epsilon > log2|alphabet|: {cg.epsilon_ok}")
    run.say(f"sum of weights - 1 = {float(sum(cg.weights)) - 1:.3e}")
    run.write_table("coarse_weights.csv", ["word", "good", "weight", "log2_weight"], [
        [_word(w), int(w in cg.good_words), repr(float(x)), repr(float(lw))]
        for w, x, lw in zip(cg.words, cg.weights, cg.log2_weights)])
    if cg.variant == "full" and cg.delta < 1:
        chk = lq.tau_lower_bound_check(cg, cfg.ifs)
        run.say(f"tau lower bound at q = {chk.q:g}: tau/(q-1) = {chk.lhs:.6f} >= {chk.rhs:.6f}: {chk.holds}")
        for k, v in chk.side_conditions.items():
            run.say(f"    side condition {k}: {v}")
        run.say(f"    asserted: {chk.asserted}")


def _estimate_all(run: Run, label: str, samples: est.SampleSet, predicted: float | None, methods=None):
    fns = {
        "coarse-entropy": est.coarse_entropy_dimension,
        "local-dimension": est.local_dimension_stats,
        "correlation": est.correlation_dimension,
    }
    scales = run.cfg.scales()
    out = {}
    for name in methods or run.cfg.params["estimators"]:
        e = fns[name](samples, scales)
        run.add_estimate(label, e, predicted)
        out[name] = e
    return out


def do_sample(run: Run) -> None:
    cfg, pr = run.cfg, run.cfg.params
    s = est.push_samples(cfg.measure, cfg.ifs, pr["depth"], pr["count"], cfg.seed)
    s.to_csv(run.out / "samples.csv")
    run.say(f"wrote {len(s)} samples, depth {s.truncation_depth}, truncation error bound {s.error_bound:.3e}")


def do_estimate(run: Run) -> None:
    cfg, pr = run.cfg, run.cfg.params
    h, chi = _stats(run, cfg.measure, cfg.ifs)
    pred = formulas.projection_dimension(h, chi)
    sep = separation.separation_report(cfg.ifs, pr["max_level"], pr["budget"])
    run.add_report(formulas.DimensionReport("projection", pred, {"h": h, "chi": chi},
                                            {"exponential_separation_evidence": _separation_flag(sep)}))
    finest = cfg.scales()[0]
    s = est.push_samples(cfg.measure, cfg.ifs, pr["depth"], pr["count"], cfg.seed, resolution=finest)
    _estimate_all(run, "line", s, pred)


def do_convolve(run: Run) -> None:
    cfg, pr = run.cfg, run.cfg.params
    rep = _convolution_report(run)
    t = float(pr["t"])
    finest = cfg.scales()[0]
    s = est.convolution_samples(cfg.measure, cfg.ifs, cfg.measure2, cfg.ifs2, t, pr["depth"], pr["count"],
                                cfg.seed, resolution=finest)
    _estimate_all(run, f"t={pr['t']}", s, rep.predicted)


def do_project(run: Run) -> None:
    cfg, pr = run.cfg, run.cfg.params
    h = entropy(cfg.measure)
    pred = formulas.orthogonal_projection_dimension(h, cfg.planar.ratio)
    run.add_report(formulas.DimensionReport(
        "orthogonal_projection", pred, {"h": h, "r": cfg.planar.ratio},
        {"rotation_aperiodic": cfg.planar.aperiodic, "open_set_condition": cfg.planar_osc}))
    finest = cfg.scales()[0]
    by_method: dict[str, list[float]] = {}
    for z in pr["z_angles"]:
        s = est.planar_projection_samples(cfg.measure, cfg.planar, float(z), pr["depth"], pr["count"],
                                          cfg.seed, resolution=finest)
        for name, e in _estimate_all(run, f"z={z}", s, pred).items():
            by_method.setdefault(name, []).append(e.estimate)
    for name, vals in by_method.items():
        run.say(f"  spread of {name} across z: {max(vals) - min(vals):.4f}")


def do_affine(run: Run) -> None:
    cfg, pr = run.cfg, run.cfg.params
    h = entropy(cfg.measure)
    cx, cy = cfg.diagonal.lyapunov_exponents(cfg.measure)
    run.say(f"entropy h = {h:.6f}; chi_x = {cx:.6f}, chi_y = {cy:.6f}")
    rep = formulas.lyapunov_dimension_diagonal(h, min(cx, cy), max(cx, cy), cfg.diagonal_finite_to_one)
    run.add_report(rep)
    finest = cfg.scales()[0]
    s = est.diagonal_affine_samples(cfg.measure, cfg.diagonal, pr["depth"], pr["count"], cfg.seed,
                                    resolution=finest)
    _estimate_all(run, "plane", s, rep.predicted, ["coarse-entropy"])


EXPERIMENTS = {
    "separation": do_separation,
    "dims": do_dims,
    "tau": do_tau,
    "coarse": do_coarse,
    "sample": do_sample,
    "estimate": do_estimate,
    "convolve": do_convolve,
    "project": do_project,
    "affine": do_affine,
}


def run_config(cfg: ExperimentConfig, out: Path) -> Run:
    out.mkdir(parents=True, exist_ok=True)
    run = Run(cfg, out)
    EXPERIMENTS[cfg.experiment](run)
    run.finish()
    return run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracdim",
        description="Dimension formulas and Monte Carlo checks for projected invariant measures.",
        epilog=CSV_SCHEMAS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    for kind in KINDS:
        p = sub.add_parser(kind, help=(EXPERIMENTS[kind].__doc__ or kind).strip().splitlines()[0],
                           epilog=CSV_SCHEMAS, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", required=True, help="YAML experiment configuration")
        p.add_argument("--out", default="fracdim_out", help="output directory (default: %(default)s)")
    return parser


def _error_record(exc: BaseException) -> dict:
    if isinstance(exc, FracdimError):
        rec = {"error": exc.kind, "exit_code": exc.exit_code, "message": str(exc)}
        if getattr(exc, "position", None):
            rec["position"] = exc.position
        return rec
    return {"error": "internal_error", "exit_code": 1, "message": f"{type(exc).__name__}: {exc}"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        cfg = load_config(args.config, args.experiment)
        run_config(cfg, out)
    except (FracdimError, OSError, ValueError, ArithmeticError) as exc:
        rec = _error_record(exc)
        print(json.dumps(rec), file=sys.stderr)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "error.json").write_text(json.dumps(rec, indent=2) + "\n", encoding="utf-8")
        except OSError:
            pass
        return rec["exit_code"]
    print(f"wrote {out / 'report.txt'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
