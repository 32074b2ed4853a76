"""Command-line front end.

Four subcommands map onto the library workflows:

* ``compare``  - decide which of two parameter values has the larger
  marginal likelihood; JSON report.
* ``maximize`` - comparison-driven ascent; CSV trace, JSON report, and
  (by default) a rendered figure next to the CSV.
* ``verify``   - randomized sign-equivalence and identity checks on
  table models; JSON report, nonzero exit on any failing instance.
* ``em``       - EM baseline on the mixture model; CSV trace, JSON
  report, figure.

Every run is driven by a YAML config (see README for the grammar); the
few sampler flags below override the config's sampler block so chains
can be re-seeded without editing files.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .ascent import maximize as run_maximize
from .config import RunConfig, build_model, parse_config
from .errors import ConfigError, TruncratioError
from .estimator import compare_likelihoods
from .models import GaussianMixtureModel, em_step
from .oracle import verify_theorem
from .report import (
    build_report,
    comparison_result_to_dict,
    write_ascent_trace_csv,
    write_em_trace_csv,
    write_json_report,
)

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truncratio",
        description="Marginal-likelihood comparison and ascent for latent-variable models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("compare", "compare the marginal likelihood at two parameter values"),
        ("maximize", "run the comparison-driven ascent optimizer"),
        ("verify", "run randomized exact-oracle checks"),
        ("em", "run the EM baseline on a mixture model"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the YAML run config")
        cmd.add_argument("--output", help="override output.path from the config")
        cmd.add_argument("--burn-in", type=int, dest="burn_in",
                         help="override sampler.burn_in")
        cmd.add_argument("--thin", type=int, help="override sampler.thinning")
        cmd.add_argument("--step", type=float, help="override sampler.initial_step")
        cmd.add_argument("--seed", type=int, help="override sampler.seed")
    return parser


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    if args.output is not None:
        config = replace(config, output_path=args.output)
    sampler_overrides = {
        "burn_in": args.burn_in,
        "thinning": args.thin,
        "initial_step": args.step,
        "seed": args.seed,
    }
    requested = {k: v for k, v in sampler_overrides.items() if v is not None}
    if requested:
        if config.sampler is None:
            raise ConfigError(
                f"'{config.command}' runs take no sampler settings; "
                "sampler flags do not apply"
            )
        config = replace(config, sampler=replace(config.sampler, **requested))
    return config


def _prepare_output(path_text: str) -> Path:
    path = Path(path_text)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _run_compare(config: RunConfig):
    model, seeds = build_model(config.model)
    seeds["sampler"] = config.sampler.seed
    spec = config.compare
    result = compare_likelihoods(model, np.array(spec.theta1), np.array(spec.theta2),
                                 sampler_config=config.sampler,
                                 confidence=spec.confidence,
                                 max_samples=spec.max_samples)
    payload = comparison_result_to_dict(result)
    print(f"decision: {result.decision.value} "
          f"(i1={result.est1.mean:.6f}, i2={result.est2.mean:.6f}, "
          f"samples={result.samples_spent})")
    return payload, seeds, {}, 0


def _run_verify(config: RunConfig):
    spec = config.verify
    report = verify_theorem(spec.instance_count, spec.seed)
    payload = {
        "instances": report.instances,
        "passes": report.passes,
        "failures": report.failures,
        "failed_instances": report.failed_instances,
    }
    print(f"verify: {report.passes}/{report.instances} instances passed")
    return payload, {"verify": spec.seed}, {}, 0 if report.all_passed else 1


def _trace_log_marginals(model, trace):
    if not model.capabilities.has_analytic_marginal:
        return None
    return [model.log_marginal_analytic(r.theta) for r in trace.iterations]


def _run_maximize(config: RunConfig, output_path: Path):
    model, seeds = build_model(config.model)
    seeds["sampler"] = config.sampler.seed
    seeds["ascent"] = config.maximize.ascent.seed
    trace = run_maximize(model, np.array(config.maximize.theta0),
                         config.maximize.ascent, sampler_config=config.sampler)
    write_ascent_trace_csv(output_path, trace, model)
    files = {"trace_csv": str(output_path)}
    if config.plot and trace.iterations:
        from .plots import render_ascent_figure

        figure_path = output_path.with_suffix(".png")
        render_ascent_figure(trace, figure_path,
                             log_marginals=_trace_log_marginals(model, trace))
        files["figure"] = str(figure_path)
    payload = {
        "final_theta": trace.final_theta.tolist(),
        "terminated_by": trace.terminated_by,
        "iterations": len(trace.iterations),
        "accepted": trace.accepted_count,
    }
    if model.capabilities.has_analytic_marginal:
        payload["final_log_marginal"] = model.log_marginal_analytic(trace.final_theta)
    print(f"maximize: {trace.accepted_count}/{len(trace.iterations)} proposals accepted, "
          f"stopped by {trace.terminated_by}")
    return payload, seeds, files, 0, model


def _run_em(config: RunConfig, output_path: Path):
    model, seeds = build_model(config.model)
    if not isinstance(model, GaussianMixtureModel):
        raise ConfigError("'em' requires a mixture model")
    spec = config.em
    theta = model.validate_theta(np.array(spec.theta0))
    thetas = [theta]
    log_marginals = [model.log_marginal_analytic(theta)]
    for _ in range(spec.max_iterations):
        new_theta = em_step(model, theta)
        thetas.append(new_theta)
        log_marginals.append(model.log_marginal_analytic(new_theta))
        change = float(np.max(np.abs(new_theta - theta)))
        theta = new_theta
        if change < spec.tolerance:
            break
    write_em_trace_csv(output_path, thetas, log_marginals)
    files = {"trace_csv": str(output_path)}
    if config.plot:
        from .plots import render_em_figure

        figure_path = output_path.with_suffix(".png")
        render_em_figure(log_marginals, figure_path)
        files["figure"] = str(figure_path)
    payload = {
        "final_theta": theta.tolist(),
        "iterations": len(thetas) - 1,
        "final_log_marginal": log_marginals[-1],
    }
    print(f"em: {len(thetas) - 1} steps, final log marginal {log_marginals[-1]:.6f}")
    return payload, seeds, files, 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config_text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    started = time.perf_counter()
    try:
        config = parse_config(config_text)
        if config.command != args.command:
            raise ConfigError(
                f"config declares a '{config.command}' block but the "
                f"'{args.command}' subcommand was invoked"
            )
        config = _apply_overrides(config, args)
        output_path = _prepare_output(config.output_path)

        if config.command == "compare":
            payload, seeds, files, status = _run_compare(config)
            report_path = output_path
        elif config.command == "verify":
            payload, seeds, files, status = _run_verify(config)
            report_path = output_path
        elif config.command == "maximize":
            payload, seeds, files, status, _ = _run_maximize(config, output_path)
            report_path = output_path.with_suffix(".report.json")
        else:
            payload, seeds, files, status = _run_em(config, output_path)
            report_path = output_path.with_suffix(".report.json")

        report = build_report(
            command=config.command,
            version=__version__,
            config_echo=config.to_dict(),
            seeds=seeds,
            result=payload,
            wall_clock_seconds=time.perf_counter() - started,
            files=files or None,
        )
        write_json_report(report_path, report)
        print(f"report written to {report_path}")
        return status
    except TruncratioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
