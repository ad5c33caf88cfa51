"""Command-line entry points: impute-analyze, simulate, predict.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np
import pandas as pd
import yaml

from .exceptions import ConfigError, DataError, FgImputeError, NumericalError
from .io import AnalysisSpec, load_pooled_model, read_competing_risks_csv, save_pooled_model
from .pipeline import pool_predictions, run_pipeline
from .report import render_pooled_cuminc_figure, render_simulation_figures
from .simulation.study import ScenarioConfig, run_scenario

METHOD_CHOICES = ["fg-smc", "cs-smc", "fg-approx", "cs-approx", "cca", "full"]


def _method_key(method: str) -> str:
    return method.replace("-", "_")


def _parse_covariates(text: str) -> dict:
    out = {}
    for item in text.split(","):
        if ":" not in item:
            raise ConfigError(f"covariate spec {item!r} must look like name:binary or name:continuous")
        name, kind = item.split(":", 1)
        out[name.strip()] = kind.strip()
    return out


def _parse_reference(text: str) -> dict:
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise ConfigError(f"reference entry {item!r} must look like name=value")
        name, value = item.split("=", 1)
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"reference value for {name.strip()!r} is not numeric")
    return out


def _parse_floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}")


@click.group()
def cli():
    """Missing-covariate multiple imputation for subdistribution-hazard models."""


@cli.command("impute-analyze")
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--time-col", default="time", show_default=True)
@click.option("--status-col", default="D", show_default=True)
@click.option("--id-col", default=None)
@click.option("--covariates", required=True, help="e.g. X:binary,Z:continuous")
@click.option("--strata", default="", help="comma-separated censoring-model strata columns")
@click.option("--method", type=click.Choice(METHOD_CHOICES), default="fg-smc", show_default=True)
@click.option("--m", default=10, show_default=True)
@click.option("--iterations", default=10, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--threads", default=1, show_default=True)
@click.option("--horizons", default="", help="comma-separated prediction times")
@click.option("--reference", "references", multiple=True, help="e.g. X=1,Z=0.5 (repeatable)")
@click.option(
    "--censoring-mode",
    type=click.Choice(["random", "administrative", "none"]),
    default="random",
    show_default=True,
)
@click.option("--output-dir", type=click.Path(path_type=Path), default=Path("."), show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
def impute_analyze(
    input_path,
    time_col,
    status_col,
    id_col,
    covariates,
    strata,
    method,
    m,
    iterations,
    seed,
    threads,
    horizons,
    references,
    censoring_mode,
    output_dir,
    figures,
):
    """Impute missing covariates, fit the substantive model, pool the results."""
    del threads  # analysis path is sequential; kept for interface symmetry
    spec = AnalysisSpec(
        input_path=input_path,
        time_column=time_col,
        status_column=status_col,
        id_column=id_col,
        covariate_columns=_parse_covariates(covariates),
        strata_columns=tuple(s.strip() for s in strata.split(",") if s.strip()),
        method=_method_key(method),
        m=m,
        iterations=iterations,
        seed=seed,
        horizons=_parse_floats(horizons),
        reference_rows=tuple(_parse_reference(r) for r in references),
        censoring_mode=censoring_mode,
        output_dir=Path(output_dir),
    )
    if spec.method == "full":
        raise ConfigError("method 'full' is only available inside the simulation harness")

    data = read_competing_risks_csv(spec)
    result = run_pipeline(
        data,
        method=spec.method,
        formula=list(spec.covariate_columns),
        m=spec.m,
        iterations=spec.iterations,
        seed=spec.seed,
        horizons=spec.horizons,
        references=spec.reference_rows,
        strata=spec.strata_columns,
        censoring_mode=spec.censoring_mode,
        covariate_models=spec.covariate_models,
    )

    out = spec.output_dir
    out.mkdir(parents=True, exist_ok=True)
    coef_cols = ["term", "estimate", "std.error", "statistic", "df", "p.value"]
    result.coefficients[coef_cols].to_csv(out / "pooled_coefficients.csv", index=False)
    result.cuminc.to_csv(out / "pooled_cuminc.csv", index=False)
    save_pooled_model(result.fits, result.n_complete_df, out / "pooled_model.json")
    _write_imputed_datasets(result, out / "imputed_datasets.csv")
    if figures and not result.cuminc.empty:
        render_pooled_cuminc_figure(result.cuminc, out / "pooled_cuminc.png")
    click.echo(f"wrote pooled results for method {method} ({result.n_imputations} imputations) to {out}")


def _write_imputed_datasets(result, path: Path) -> None:
    frames = []
    for k, sd in enumerate(result.completed_datasets, start=1):
        df = pd.DataFrame({"imp": k, "id": sd.ids, "v_time": sd.v_time, "event1": sd.event1.astype(int)})
        frames.append(pd.concat([df, sd.covariates.reset_index(drop=True)], axis=1))
    pd.concat(frames, ignore_index=True).to_csv(path, index=False)


def _scenario_from_dict(d: dict) -> ScenarioConfig:
    known = set(ScenarioConfig.__dataclass_fields__)
    bad = sorted(set(d) - known)
    if bad:
        raise ConfigError(f"invalid config keys: {bad}")
    for key in ("methods", "horizons"):
        if key in d and isinstance(d[key], list):
            d[key] = tuple(d[key])
    if "references" in d and isinstance(d["references"], list):
        d["references"] = tuple(tuple(r) for r in d["references"])
    return ScenarioConfig(**d)


@cli.command("simulate")
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
@click.option("--output-dir", type=click.Path(path_type=Path), default=Path("."), show_default=True)
@click.option("--threads", default=1, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
def simulate(config_path, output_dir, threads, figures):
    """Run the Monte Carlo scenarios described in a YAML config file."""
    try:
        payload = yaml.safe_load(Path(config_path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {config_path}")
    except yaml.YAMLError as err:
        raise ConfigError(f"malformed config: {err}")
    if not isinstance(payload, dict) or "scenarios" not in payload:
        raise ConfigError("config must be a mapping with a 'scenarios' list")
    defaults = payload.get("defaults", {})
    scenarios = [_scenario_from_dict({**defaults, **s}) for s in payload["scenarios"]]

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    perf_frames, raw_frames, fail_frames = [], [], []
    for config in scenarios:
        click.echo(f"running scenario {config.name!r} ({config.n_sim} replications)")
        perf, raw, fails = run_scenario(config, threads=threads)
        perf_frames.append(perf)
        raw_frames.append(raw)
        if not fails.empty:
            fails.insert(0, "scenario", config.name)
            fail_frames.append(fails)
    perf = pd.concat(perf_frames, ignore_index=True)
    raw = pd.concat(raw_frames, ignore_index=True)
    perf.to_csv(out / "performance.csv", index=False)
    raw.to_csv(out / "replications.csv", index=False)
    if fail_frames:
        pd.concat(fail_frames, ignore_index=True).to_csv(out / "failures.csv", index=False)
    if figures:
        render_simulation_figures(perf, out / "figures")
    click.echo(f"wrote performance tables to {out}")


@cli.command("predict")
@click.option("--model", "model_path", required=True, type=click.Path(path_type=Path))
@click.option("--horizons", required=True, help="comma-separated prediction times")
@click.option("--reference", "references", multiple=True, required=True, help="e.g. X=1,Z=0.5")
@click.option("--output", type=click.Path(path_type=Path), default=Path("predicted_cuminc.csv"), show_default=True)
def predict(model_path, horizons, references, output):
    """Pooled cumulative incidence at user horizons from a saved pooled model."""
    fits, n_complete = load_pooled_model(model_path)
    table = pool_predictions(
        fits,
        _parse_floats(horizons),
        [_parse_reference(r) for r in references],
        n_complete=n_complete,
    )
    table.to_csv(output, index=False)
    click.echo(f"wrote predictions to {output}")


def main():
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(1)
    except click.exceptions.ClickException as err:
        err.show()
        sys.exit(2)
    except ConfigError as err:
        click.echo(f"configuration error: {err}", err=True)
        sys.exit(2)
    except DataError as err:
        click.echo(f"data error: {err}", err=True)
        sys.exit(3)
    except (NumericalError, FgImputeError) as err:
        click.echo(f"numerical failure: {err}", err=True)
        sys.exit(4)


if __name__ == "__main__":
    main()
