"""Command-line front end.

Four subcommands wrap the library: ``synth`` writes a synthetic dataset,
``estimate`` denoises a single signal, ``benchmark`` cross-validates a
classification pipeline on a dataset file, and ``experiment`` runs the
canned Monte-Carlo studies.  Options resolve as defaults < config file
(flat key=value with dotted prefixes) < command-line flags, and unknown
config keys are rejected.  Exit codes: 0 success, 2 validation or IO
error, 3 runtime or numeric error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import fileio
from .basis import SampledSignal, forward_transform, reconstruct
from .classify import (
    PipelineConfig,
    ShrinkageProfile,
    bjs_coefficient_count,
    cross_validate,
    grid_search,
)
from .experiments import (
    adaptivity_ratio_bjs,
    consistency_experiment,
    phase_ablation,
    risk_curve_pinsker,
)
from .shrinkage import (
    EllipsoidSpec,
    bjs_estimate,
    dyadic_blocks,
    pinsker_mu,
    pinsker_shrink,
)
from .synth import (
    ClassConstructionError,
    NoiseModel,
    generate_dataset,
    make_class_model,
    make_magnitude_class_model,
    make_phase_class_model,
)

__all__ = ["main", "build_parser"]


@dataclass(frozen=True)
class Opt:
    """One resolvable option: config-file key, flag, type and default."""

    key: str
    kind: str  # int | float | str | bool | float_or_auto | int_list | float_list
    default: object
    help: str = ""
    choices: tuple = ()
    flag: str = ""

    @property
    def dest(self) -> str:
        return self.key.replace(".", "_")

    @property
    def flag_name(self) -> str:
        if self.flag:
            return self.flag
        return "--" + self.key.rsplit(".", 1)[-1].replace("_", "-")


def _parse_value(opt: Opt, raw: str):
    kind = opt.kind
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "float_or_auto":
            return None if raw == "auto" else float(raw)
        if kind == "int_list":
            return [int(tok) for tok in raw.split(",") if tok.strip()]
        if kind == "float_list":
            return [float(tok) for tok in raw.split(",") if tok.strip()]
        if kind == "bool":
            lowered = raw.strip().lower()
            if lowered in {"true", "1", "yes", "on"}:
                return True
            if lowered in {"false", "0", "no", "off"}:
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        return raw
    except ValueError as exc:
        raise ValueError(f"config key {opt.key}: {exc}") from None


def _add_opts(parser: argparse.ArgumentParser, opts: list[Opt]) -> None:
    for opt in opts:
        kwargs: dict = {"dest": opt.dest, "default": None, "help": opt.help}
        if opt.kind == "bool":
            kwargs.update(action="store_const", const=True)
        elif opt.kind == "int":
            kwargs.update(type=int)
        elif opt.kind == "float":
            kwargs.update(type=float)
        else:
            kwargs.update(type=str)
        parser.add_argument(opt.flag_name, **kwargs)


def _resolve(args: argparse.Namespace, opts: list[Opt]) -> dict:
    """Merge defaults, config file and flags; reject unknown config keys."""
    file_cfg: dict[str, str] = {}
    if getattr(args, "config", None):
        file_cfg = fileio.read_config(args.config)
    known = {opt.key for opt in opts}
    unknown = sorted(set(file_cfg) - known)
    if unknown:
        raise ValueError(
            f"unknown config keys: {', '.join(unknown)}; "
            f"valid keys: {', '.join(sorted(known))}"
        )
    out: dict = {}
    for opt in opts:
        value = getattr(args, opt.dest, None)
        if value is None:
            if opt.key in file_cfg:
                value = _parse_value(opt, file_cfg[opt.key])
            else:
                value = opt.default
        elif opt.kind in {"int_list", "float_list", "float_or_auto"} and isinstance(
            value, str
        ):
            value = _parse_value(opt, value)
        if opt.choices and value not in opt.choices:
            raise ValueError(
                f"{opt.key} must be one of {', '.join(map(str, opt.choices))}"
            )
        out[opt.key] = value
    return out


# ---------------------------------------------------------------------------
# synth

_GEOMETRIES = ("random", "phase", "magnitude")

SYNTH_OPTS = [
    Opt("synth.classes", "int", 8, "number of classes"),
    Opt("synth.trials_per_class", "int", 10, "trials per class"),
    Opt("synth.channels", "int", 4, "channels per trial"),
    Opt("synth.samples", "int", 500, "samples per channel (N)"),
    Opt("synth.sessions", "int", 3, "number of recording sessions"),
    Opt("synth.truncation", "int", 5, "harmonics per prototype (T)"),
    Opt("synth.separation", "float", 0.5, "half the guaranteed class gap (s)"),
    Opt("synth.spread", "float", 0.1, "within-class ball radius"),
    Opt("synth.geometry", "str", "random", "prototype geometry", _GEOMETRIES),
    Opt("ellipsoid.alpha", "float", 2.0, "smoothness exponent"),
    Opt("ellipsoid.radius", "float", 10.0, "ellipsoid radius"),
    Opt("noise.sigma", "float", 1.0, "sample noise sd"),
    Opt("noise.seed", "int", 0, "noise stream id", flag="--noise-seed"),
    Opt("seed", "int", 0, "master seed"),
]


def _build_model(cfg: dict):
    spec = EllipsoidSpec(cfg["ellipsoid.alpha"], cfg["ellipsoid.radius"])
    maker = {
        "random": make_class_model,
        "phase": make_phase_class_model,
        "magnitude": make_magnitude_class_model,
    }[cfg["synth.geometry"]]
    return maker(
        cfg["synth.classes"],
        spec,
        cfg["synth.truncation"],
        cfg["synth.separation"],
        cfg["synth.spread"],
        cfg["seed"],
    )


def _build_dataset(cfg: dict):
    model = _build_model(cfg)
    noise = NoiseModel(sigma=cfg["noise.sigma"], seed=cfg["noise.seed"])
    dataset = generate_dataset(
        model,
        cfg["synth.trials_per_class"],
        cfg["synth.channels"],
        cfg["synth.samples"],
        cfg["synth.sessions"],
        noise,
        cfg["seed"],
    )
    dataset.params["geometry"] = cfg["synth.geometry"]
    return dataset


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _resolve(args, SYNTH_OPTS)
    dataset = _build_dataset(cfg)
    fileio.write_dataset(dataset, args.out)
    print(
        f"wrote {args.out}: {dataset.n_trials} trials, "
        f"{dataset.n_classes} classes, {dataset.n_channels} channels, "
        f"N={dataset.n_samples}"
    )
    return 0


# ---------------------------------------------------------------------------
# estimate

ESTIMATE_OPTS = [
    Opt("estimate.method", "str", "pinsker", "estimator", ("pinsker", "bjs")),
    Opt("estimate.truncation", "int", 5, "harmonic truncation T (pinsker)"),
    Opt("estimate.block_limit", "int", 2, "blocks passed through unshrunk (bjs)"),
    Opt("ellipsoid.alpha", "float", 2.0, "smoothness exponent (pinsker)"),
    Opt("ellipsoid.radius", "float", 10.0, "ellipsoid radius (pinsker)"),
]


def cmd_estimate(args: argparse.Namespace) -> int:
    cfg = _resolve(args, ESTIMATE_OPTS)
    samples = fileio.read_signal(args.input)
    signal = SampledSignal(samples)
    n = signal.n_samples
    if cfg["estimate.method"] == "pinsker":
        observed = forward_transform(signal, cfg["estimate.truncation"])
        spec = EllipsoidSpec(cfg["ellipsoid.alpha"], cfg["ellipsoid.radius"])
        mu = pinsker_mu(spec, observed.epsilon)
        shrunk = pinsker_shrink(observed, spec, mu)
    else:
        count = bjs_coefficient_count(n)
        observed = forward_transform(signal, (count - 1) // 2)
        partition = dyadic_blocks(
            cfg["estimate.block_limit"], int(np.floor(np.log2(n)))
        )
        shrunk = bjs_estimate(observed, partition)
    padded = np.zeros(len(shrunk))
    padded[: len(observed)] = observed.coeffs
    rows = [
        (k + 1, padded[k], shrunk.coeffs[k]) for k in range(len(shrunk))
    ]
    fileio.write_table(
        f"{args.out}_coefficients.csv", ["k", "observed", "shrunk"], rows
    )
    recon = reconstruct(shrunk, n)
    fileio.write_signal(recon.samples, f"{args.out}_reconstruction.csv")
    print(f"wrote {args.out}_coefficients.csv and {args.out}_reconstruction.csv")
    return 0


# ---------------------------------------------------------------------------
# benchmark

BENCHMARK_OPTS = [
    Opt("benchmark.pipeline", "str", "pinsker", "feature pipeline",
        ("pinsker", "bjs"), flag="--pipeline"),
    Opt("benchmark.scheme", "str", "loso", "loso or kfold:<k>", flag="--scheme"),
    Opt("pipeline.truncation", "int", 5, "harmonic truncation T (pinsker)"),
    Opt("pipeline.components", "int", -1,
        "PCA components; 0 skips PCA, -1 picks the pipeline default"),
    Opt("pipeline.ridge", "float_or_auto", None, "LDA ridge or 'auto'"),
    Opt("pipeline.block_limit", "int", 2, "blocks passed through unshrunk (bjs)"),
    Opt("grid.enabled", "bool", False, "grid-search shrinkage profiles",
        flag="--grid"),
    Opt("grid.truncations", "int_list", None, "grid of T values"),
    Opt("grid.components", "int_list", None, "grid of PCA sizes",
        flag="--grid-components"),
    Opt("grid.mu_values", "float_list", [], "water-filling levels to try"),
    Opt("grid.low_pass_only", "bool", False, "restrict masks to low-pass"),
    Opt("seed", "int", 0, "recorded in the report"),
]

_PIPELINE_DEFAULT_COMPONENTS = {"pinsker": 165, "bjs": 190}


def _full_band_profile(truncation: int) -> ShrinkageProfile:
    count = 2 * truncation + 1
    return ShrinkageProfile(
        np.ones(count), truncation, label=f"mask[1:{count}]"
    )


def _summary_lines(dataset, scheme, label, report) -> list[str]:
    per_class = " ".join(
        f"{k + 1}={report.per_class_accuracy[k]:.4f}"
        for k in range(report.per_class_accuracy.size)
    )
    lines = [
        f"scheme: {scheme}",
        f"trials: {dataset.n_trials}",
        f"classes: {dataset.n_classes}",
        f"channels: {dataset.n_channels}",
        f"n_samples: {dataset.n_samples}",
        f"config: {label}",
        f"overall accuracy: {report.overall_accuracy:.4f}",
        f"worst-class error: {report.worst_class_error:.4f}",
        f"per-class accuracy: {per_class}",
    ]
    for note in report.notes:
        lines.append(f"note: {note}")
    return lines


def _write_confusion(path: str, confusion: np.ndarray) -> None:
    k = confusion.shape[0]
    header = ["true_label"] + [f"pred_{j + 1}" for j in range(k)]
    rows = [[i + 1, *confusion[i]] for i in range(k)]
    fileio.write_table(path, header, rows)


def cmd_benchmark(args: argparse.Namespace) -> int:
    cfg = _resolve(args, BENCHMARK_OPTS)
    dataset = fileio.read_dataset(args.dataset)
    pipeline = cfg["benchmark.pipeline"]
    scheme = cfg["benchmark.scheme"]
    components = cfg["pipeline.components"]
    if components < 0:
        components = _PIPELINE_DEFAULT_COMPONENTS[pipeline]
    ridge = cfg["pipeline.ridge"]
    grid_requested = cfg["grid.enabled"] or cfg["grid.truncations"] is not None
    if pipeline == "bjs":
        if grid_requested or cfg["grid.mu_values"]:
            raise ValueError(
                "grid search applies only to the pinsker pipeline; "
                "the bjs pipeline has no shrinkage profile to tune"
            )
        config = PipelineConfig.bjs(
            dataset.n_samples,
            pass_limit=cfg["pipeline.block_limit"],
            components=components,
            ridge=ridge,
        )
        report = cross_validate(dataset, config, scheme=scheme)
        rows = [("-", config.label, components, report.overall_accuracy)]
        best_label = config.label
    elif grid_requested:
        truncations = cfg["grid.truncations"] or [cfg["pipeline.truncation"]]
        comp_grid = cfg["grid.components"] or [components]
        spec = None
        if cfg["grid.mu_values"]:
            params = dataset.params
            if "alpha" not in params or "radius" not in params:
                raise ValueError(
                    "grid.mu_values needs ellipsoid alpha/radius in the "
                    "dataset metadata"
                )
            spec = EllipsoidSpec(float(params["alpha"]), float(params["radius"]))
        result = grid_search(
            dataset,
            scheme=scheme,
            truncations=truncations,
            components=comp_grid,
            spec=spec,
            mu_values=cfg["grid.mu_values"],
            ridge=ridge,
            low_pass_only=cfg["grid.low_pass_only"],
        )
        rows = [
            (r.truncation, r.pattern, r.components, r.accuracy)
            for r in result.rows
        ]
        report = cross_validate(dataset, result.best_config, scheme=scheme)
        best_label = result.best_config.label
    else:
        profile = _full_band_profile(cfg["pipeline.truncation"])
        config = PipelineConfig.pinsker(
            dataset.n_samples, profile, components=components, ridge=ridge
        )
        report = cross_validate(dataset, config, scheme=scheme)
        rows = [
            (cfg["pipeline.truncation"], config.label, components,
             report.overall_accuracy)
        ]
        best_label = config.label

    fileio.write_table(
        f"{args.out}_report.csv",
        ["truncation", "pattern", "components", "overall_accuracy"],
        rows,
    )
    _write_confusion(f"{args.out}_confusion.csv", report.confusion)
    lines = [f"pipeline: {pipeline}"] + _summary_lines(
        dataset, scheme, best_label, report
    )
    fileio.atomic_write_text(f"{args.out}_summary.txt", "\n".join(lines) + "\n")
    print(
        f"{pipeline} {scheme}: accuracy {report.overall_accuracy:.4f} "
        f"({best_label})"
    )
    return 0


# ---------------------------------------------------------------------------
# experiment

RATES_OPTS = [
    Opt("ellipsoid.alpha", "float", 2.0, "smoothness exponent"),
    Opt("ellipsoid.radius", "float", 10.0, "ellipsoid radius"),
    Opt("experiment.epsilons", "float_list", [0.5, 0.2, 0.1, 0.05],
        "decreasing noise levels"),
    Opt("experiment.trials", "int", 200, "noise draws per parameter"),
    Opt("experiment.thetas", "int", 50, "random boundary parameters"),
    Opt("seed", "int", 0, "master seed"),
]

ADAPTIVITY_OPTS = [
    Opt("experiment.alphas", "float_list", [1.0, 2.0, 3.0], "smoothness grid"),
    Opt("experiment.radii", "float_list", [5.0, 10.0], "radius grid"),
    Opt("experiment.epsilon", "float", 0.02, "noise level"),
    Opt("experiment.trials", "int", 200, "noise draws per parameter"),
    Opt("experiment.thetas", "int", 30, "random boundary parameters"),
    Opt("seed", "int", 0, "master seed"),
]

CONSISTENCY_OPTS = [
    Opt("synth.classes", "int", 8, "number of classes"),
    Opt("synth.truncation", "int", 5, "harmonics per prototype"),
    Opt("synth.separation", "float", 0.5, "half the guaranteed class gap"),
    Opt("synth.spread", "float", 0.1, "within-class ball radius"),
    Opt("ellipsoid.alpha", "float", 2.0, "smoothness exponent"),
    Opt("ellipsoid.radius", "float", 10.0, "ellipsoid radius"),
    Opt("experiment.samples", "int_list", [64, 256, 1024],
        "increasing sample counts", flag="--sample-grid"),
    Opt("experiment.trials", "int", 500, "trials per class and sample count"),
    Opt("noise.sigma", "float", 1.0, "sample noise sd"),
    Opt("noise.seed", "int", 0, "noise stream id", flag="--noise-seed"),
    Opt("seed", "int", 0, "master seed"),
]

PHASE_OPTS = [
    Opt("synth.classes", "int", 8, "number of classes"),
    Opt("synth.trials_per_class", "int", 40, "trials per class"),
    Opt("synth.channels", "int", 8, "channels per trial"),
    Opt("synth.samples", "int", 256, "samples per channel"),
    Opt("synth.sessions", "int", 8, "number of sessions"),
    Opt("synth.truncation", "int", 5, "harmonics per prototype"),
    Opt("synth.separation", "float", 0.6, "half the guaranteed class gap"),
    Opt("synth.spread", "float", 0.02, "within-class ball radius"),
    Opt("synth.geometry", "str", "phase", "class geometry",
        ("phase", "magnitude")),
    Opt("ellipsoid.alpha", "float", 2.0, "smoothness exponent"),
    Opt("ellipsoid.radius", "float", 10.0, "ellipsoid radius"),
    Opt("noise.sigma", "float", 1.0, "sample noise sd"),
    Opt("noise.seed", "int", 0, "noise stream id", flag="--noise-seed"),
    Opt("pipeline.truncation", "int", 5, "classifier truncation",
        flag="--pipeline-truncation"),
    Opt("pipeline.components", "int", 0, "PCA components (0 skips PCA)"),
    Opt("pipeline.ridge", "float_or_auto", None, "LDA ridge or 'auto'"),
    Opt("benchmark.scheme", "str", "loso", "loso or kfold:<k>", flag="--scheme"),
    Opt("seed", "int", 0, "master seed"),
]


def _experiment_rates(cfg: dict, out_dir: str) -> int:
    spec = EllipsoidSpec(cfg["ellipsoid.alpha"], cfg["ellipsoid.radius"])
    curve = risk_curve_pinsker(
        spec,
        cfg["experiment.epsilons"],
        cfg["experiment.trials"],
        seed=cfg["seed"],
        n_thetas=cfg["experiment.thetas"],
    )
    rows = [(p.epsilon, p.risk, p.std_error, p.trials) for p in curve.points]
    fileio.write_table(
        os.path.join(out_dir, "rates.csv"),
        ["epsilon", "risk", "std_error", "trials"],
        rows,
    )
    eps = np.array([p.epsilon for p in curve.points])
    risk = np.array([p.risk for p in curve.points])
    lines = [
        f"alpha: {fileio.fmt_float(spec.alpha)}",
        f"radius: {fileio.fmt_float(spec.radius)}",
        f"first risk (eps={fileio.fmt_float(eps[0])}): {fileio.fmt_float(risk[0])}",
        f"last risk (eps={fileio.fmt_float(eps[-1])}): {fileio.fmt_float(risk[-1])}",
    ]
    if eps.size >= 2:
        slope = float(np.polyfit(np.log(eps), np.log(risk), 1)[0])
        lines.append(
            f"log-log slope (informational): {fileio.fmt_float(slope)}"
        )
    fileio.atomic_write_text(
        os.path.join(out_dir, "rates_summary.txt"), "\n".join(lines) + "\n"
    )
    print(f"rates: risk {fileio.fmt_float(risk[0])} -> {fileio.fmt_float(risk[-1])}")
    return 0


def _experiment_adaptivity(cfg: dict, out_dir: str) -> int:
    specs = [
        EllipsoidSpec(alpha, radius)
        for alpha in cfg["experiment.alphas"]
        for radius in cfg["experiment.radii"]
    ]
    rows = adaptivity_ratio_bjs(
        specs,
        cfg["experiment.epsilon"],
        cfg["experiment.trials"],
        seed=cfg["seed"],
        n_thetas=cfg["experiment.thetas"],
    )
    table = [
        (r.alpha, r.radius, r.bjs_risk, r.bjs_se, r.pinsker_risk, r.pinsker_se,
         r.ratio)
        for r in rows
    ]
    fileio.write_table(
        os.path.join(out_dir, "adaptivity.csv"),
        ["alpha", "radius", "bjs_risk", "bjs_se", "pinsker_risk", "pinsker_se",
         "ratio"],
        table,
    )
    worst = max(r.ratio for r in rows)
    lines = [
        f"epsilon: {fileio.fmt_float(cfg['experiment.epsilon'])}",
        f"specs: {len(specs)}",
        f"max risk ratio: {fileio.fmt_float(worst)}",
    ]
    fileio.atomic_write_text(
        os.path.join(out_dir, "adaptivity_summary.txt"), "\n".join(lines) + "\n"
    )
    print(f"adaptivity: max ratio {fileio.fmt_float(worst)}")
    return 0


def _experiment_consistency(cfg: dict, out_dir: str) -> int:
    spec = EllipsoidSpec(cfg["ellipsoid.alpha"], cfg["ellipsoid.radius"])
    model = make_class_model(
        cfg["synth.classes"],
        spec,
        cfg["synth.truncation"],
        cfg["synth.separation"],
        cfg["synth.spread"],
        cfg["seed"],
    )
    rows = consistency_experiment(
        model,
        cfg["experiment.samples"],
        cfg["experiment.trials"],
        NoiseModel(sigma=cfg["noise.sigma"], seed=cfg["noise.seed"]),
        seed=cfg["seed"],
    )
    table = [
        (r.n_samples, r.worst_class_error, r.error_se, r.chebyshev_bound,
         r.bound_se)
        for r in rows
    ]
    fileio.write_table(
        os.path.join(out_dir, "consistency.csv"),
        ["n_samples", "worst_class_error", "error_se", "chebyshev_bound",
         "bound_se"],
        table,
    )
    lines = [
        f"classes: {cfg['synth.classes']}",
        f"trials per class: {cfg['experiment.trials']}",
        f"final worst-class error (N={rows[-1].n_samples}): "
        f"{fileio.fmt_float(rows[-1].worst_class_error)}",
    ]
    fileio.atomic_write_text(
        os.path.join(out_dir, "consistency_summary.txt"), "\n".join(lines) + "\n"
    )
    print(
        "consistency: final worst-class error "
        f"{fileio.fmt_float(rows[-1].worst_class_error)}"
    )
    return 0


def _experiment_phase(cfg: dict, out_dir: str) -> int:
    synth_cfg = dict(cfg)
    dataset = _build_dataset(synth_cfg)
    profile = _full_band_profile(cfg["pipeline.truncation"])
    config = PipelineConfig.pinsker(
        dataset.n_samples,
        profile,
        components=cfg["pipeline.components"],
        ridge=cfg["pipeline.ridge"],
    )
    result = phase_ablation(
        dataset, config, scheme=cfg["benchmark.scheme"], seed=cfg["seed"]
    )
    table = [
        ("full", result.full.overall_accuracy, result.full.worst_class_error),
        ("magnitude", result.magnitude.overall_accuracy,
         result.magnitude.worst_class_error),
    ]
    fileio.write_table(
        os.path.join(out_dir, "phase.csv"),
        ["variant", "overall_accuracy", "worst_class_error"],
        table,
    )
    lines = [
        f"geometry: {cfg['synth.geometry']}",
        f"full accuracy: {fileio.fmt_float(result.full.overall_accuracy)}",
        f"magnitude accuracy: {fileio.fmt_float(result.magnitude.overall_accuracy)}",
        f"accuracy drop: {fileio.fmt_float(result.accuracy_drop)}",
    ]
    fileio.atomic_write_text(
        os.path.join(out_dir, "phase_summary.txt"), "\n".join(lines) + "\n"
    )
    print(f"phase: accuracy drop {fileio.fmt_float(result.accuracy_drop)}")
    return 0


_EXPERIMENTS = {
    "rates": (RATES_OPTS, _experiment_rates),
    "adaptivity": (ADAPTIVITY_OPTS, _experiment_adaptivity),
    "consistency": (CONSISTENCY_OPTS, _experiment_consistency),
    "phase": (PHASE_OPTS, _experiment_phase),
}


def cmd_experiment(args: argparse.Namespace) -> int:
    opts, runner = _EXPERIMENTS[args.name]
    cfg = _resolve(args, opts)
    os.makedirs(args.out, exist_ok=True)
    return runner(cfg, args.out)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lfpdecode",
        description="shrinkage estimation and classification of sampled signals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--config", help="flat key=value config file")
    p_synth.add_argument("--out", required=True, help="dataset CSV path")
    _add_opts(p_synth, SYNTH_OPTS)
    p_synth.set_defaults(func=cmd_synth)

    p_est = sub.add_parser("estimate", help="denoise a single signal file")
    p_est.add_argument("--config", help="flat key=value config file")
    p_est.add_argument("--input", required=True, help="signal CSV path")
    p_est.add_argument("--out", required=True, help="output path prefix")
    _add_opts(p_est, ESTIMATE_OPTS)
    p_est.set_defaults(func=cmd_estimate)

    p_bench = sub.add_parser("benchmark", help="cross-validate a pipeline")
    p_bench.add_argument("--config", help="flat key=value config file")
    p_bench.add_argument("--dataset", required=True, help="dataset CSV path")
    p_bench.add_argument("--out", required=True, help="output path prefix")
    _add_opts(p_bench, BENCHMARK_OPTS)
    p_bench.set_defaults(func=cmd_benchmark)

    p_exp = sub.add_parser("experiment", help="run a canned study")
    p_exp.add_argument(
        "--name", required=True, choices=sorted(_EXPERIMENTS),
        help="experiment to run",
    )
    p_exp.add_argument("--config", help="flat key=value config file")
    p_exp.add_argument("--out", required=True, help="output directory")
    all_opts: dict[str, Opt] = {}
    for opts, _ in _EXPERIMENTS.values():
        for opt in opts:
            all_opts.setdefault(opt.dest, opt)
    _add_opts(p_exp, list(all_opts.values()))
    p_exp.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return int(args.func(args))
    except (ValueError, OSError, ClassConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
