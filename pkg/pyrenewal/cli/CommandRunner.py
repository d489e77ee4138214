import logging
import math
import platform
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
import scipy

from cli.ConfigError import ConfigError
from cli.ConfigParser import ConfigParser
from cli.ReportWriter import ReportWriter
from cli.RunConfig import Command, RunConfig
from law.LawTools import LawTools
from metrics.Metrics import Metrics
from mgf.MgfCalculator import MgfCalculator
from montecarlo.PathSimulator import PathSimulator
from montecarlo.TailEstimator import TailEstimator
from renewal.KeyRenewal import KeyRenewal
from renewal.LawFamily import LawFamily
from renewal.NonlatticeBracket import NonlatticeBracket
from renewal.RenewalMeasure import RenewalMeasure
from tilt.Tilting import Tilting


@dataclass(frozen=True)
class Check:
    """ One pass/fail verdict of a run """
    name: str
    value: float
    threshold: Optional[float]
    passed: bool


@dataclass
class CommandResult:
    frames: Dict[str, pd.DataFrame] = field(default_factory=dict)
    details: Dict[str, object] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)


class CommandRunner:
    """
    Dispatch a run config to the computational modules and write the report:
    <command>.csv, <command>-summary.json and metrics.prom, or error.json on failure.
    Exit status is 0 iff every configured check passed, 2 for a bad config, 1 for other errors.
    """

    app_name = "pyrenewal"

    def __init__(self, config: Dict = None):
        self._logger = logging.getLogger(self.__class__.__name__)
        self.config = config or {}

    def execute(self, text: str, base_dir: str = ".", seed: Optional[int] = None, out: Optional[str] = None,
                threads: Optional[int] = None) -> int:
        """ Parse and run a json run config """
        try:
            run_config = ConfigParser(self.config).parse_config(text, base_dir, seed=seed, out=out, threads=threads)
        except ConfigError as e:
            self._logger.error(str(e))
            out_dir = out or self.config.get("pyrenewal.out.dir", "./out")
            ReportWriter(out_dir).write_error(e, raw_config=text)
            return 2
        return self.run(run_config)

    def run(self, run_config: RunConfig) -> int:
        writer = ReportWriter(run_config.out_dir)
        metrics = Metrics(CommandRunner.app_name, run_config.command.value)
        start = time.monotonic()
        self._logger.info(f"Running {run_config.command.value} on {run_config.law}, seed={run_config.seed}")
        try:
            result = self._dispatch(run_config, metrics)
        except Exception as e:
            self._logger.exception(f"{run_config.command.value} failed")
            writer.write_error(e, raw_config=run_config.raw)
            return 2 if isinstance(e, ConfigError) else 1

        duration = time.monotonic() - start
        failed = [check for check in result.checks if not check.passed]
        for check in failed:
            self._logger.warning(f"Check {check.name} failed: {check.value} vs threshold {check.threshold}")
        metrics.run.duration_sec.set(duration)
        metrics.run.checks_total.set(len(result.checks))
        metrics.run.checks_failed.set(len(failed))

        name = run_config.command.value
        for frame_name, frame in result.frames.items():
            writer.write_frame(frame_name, frame)
        writer.write_json(f"{name}-summary", self._summary(run_config, result, duration))
        if self.config.get("pyrenewal.metrics.textfile", True):
            writer.write_metrics(metrics)
        self._logger.info(f"{name} finished in {duration:.3f}s, {len(failed)} of {len(result.checks)} checks failed")
        return 0 if not failed else 1

    def _summary(self, run_config: RunConfig, result: CommandResult, duration: float) -> dict:
        return {"command": run_config.command.value,
                "law": run_config.law_ref,
                "law_description": str(run_config.law),
                "moments": LawTools.validate(run_config.law).to_dict(),
                "seed": run_config.seed,
                "threads": run_config.threads,
                "params": run_config.params,
                "thresholds": run_config.thresholds,
                "config": run_config.raw,
                "versions": CommandRunner.versions(),
                "details": result.details,
                "checks": [asdict(check) for check in result.checks],
                "passed": all(check.passed for check in result.checks),
                "duration_sec": duration}

    @staticmethod
    def versions() -> dict:
        return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__,
                "pandas": pd.__version__}

    def _module_config(self, run_config: RunConfig) -> dict:
        config = dict(self.config)
        config["pyrenewal.threads"] = run_config.threads
        return config

    def _dispatch(self, run_config: RunConfig, metrics: Metrics) -> CommandResult:
        handlers = {Command.eta: self._eta,
                    Command.mgf: self._mgf,
                    Command.identity_check: self._identity_check,
                    Command.renewal: self._renewal,
                    Command.blackwell: self._blackwell,
                    Command.dri: self._dri,
                    Command.mdp: self._mdp}
        return handlers[run_config.command](run_config, metrics)

    @staticmethod
    def _threshold_check(name: str, value: float, thresholds: Dict[str, float]) -> Optional[Check]:
        """ value <= threshold when the threshold is configured """
        if name not in thresholds:
            return None
        return Check(name, value, thresholds[name], bool(value <= thresholds[name]))

    @staticmethod
    def _add(result: CommandResult, check: Optional[Check]):
        if check is not None:
            result.checks.append(check)

    def _eta(self, run_config: RunConfig, metrics: Metrics) -> CommandResult:
        tilting = Tilting.of_config(self._module_config(run_config))
        law, params = run_config.law, run_config.params
        result = CommandResult()
        table = tilting.eta_table(law, params["lambda"])
        result.frames["eta"] = table
        residual = float(table["residual"].abs().max())
        result.details["max_residual"] = residual
        CommandRunner._add(result, CommandRunner._threshold_check("eta_residual", residual, run_config.thresholds))

        if "a" in params:
            grid = params.get("small_lambda", [0.2, 0.1, 0.05, 0.025, 0.01])
            frames = []
            for a in params["a"]:
                frame = tilting.small_lambda_limit_check(law, a, grid)
                frame.insert(0, "a", a)
                frames.append(frame)
            small = pd.concat(frames, ignore_index=True)
            result.frames["eta-small-lambda"] = small
            # Gap at the smallest |lambda| of the grid, per a
            smallest = small["lambda"].abs() == small["lambda"].abs().min()
            gap = float((small.loc[smallest, "value"] - small.loc[smallest, "limit"]).abs().max())
            result.details["small_lambda_gap"] = gap
            CommandRunner._add(result, CommandRunner._threshold_check("small_lambda_gap", gap, run_config.thresholds))
        return result

    def _mgf(self, run_config: RunConfig, metrics: Metrics) -> CommandResult:
        calculator = MgfCalculator.of_config(self._module_config(run_config))
        params = run_config.params
        series = calculator.series_list(run_config.law, params["lambda"], params["t"])
        result = CommandResult(frames={"mgf": MgfCalculator.series_frame(series)})
        gap = max(MgfCalculator.identity_gap(s) for s in series)
        uniformity = max(float(np.max(np.abs(s.log_normalized))) for s in series)
        per_lambda = []
        for s in series:
            fit = MgfCalculator.rate_fit(s) if np.count_nonzero(s.t > 0) >= 2 else math.nan
            per_lambda.append({"lambda": s.lam, "eta": s.eta, "limit": s.limit,
                               "identity_gap": MgfCalculator.identity_gap(s), "rate_fit": fit})
        result.details.update({"identity_gap": gap, "uniformity_statistic": uniformity, "series": per_lambda})
        metrics.mgf.identity_gap.set(gap)
        metrics.mgf.uniformity.set(uniformity)
        CommandRunner._add(result, CommandRunner._threshold_check("identity_gap", gap, run_config.thresholds))
        return result

    def _identity_check(self, run_config: RunConfig, metrics: Metrics) -> CommandResult:
        calculator = MgfCalculator.of_config(self._module_config(run_config))
        params = run_config.params
        series = calculator.series_list(run_config.law, params["lambda"], params["t"])
        frame = pd.DataFrame({"lambda": [s.lam for s in series],
                              "eta": [s.eta for s in series],
                              "identity_gap": [MgfCalculator.identity_gap(s) for s in series]})
        gap = float(frame["identity_gap"].max())
        metrics.mgf.identity_gap.set(gap)
        result = CommandResult(frames={"identity-check": frame}, details={"identity_gap": gap})
        CommandRunner._add(result, CommandRunner._threshold_check("identity_gap", gap, run_config.thresholds))
        return result

    def _renewal(self, run_config: RunConfig, metrics: Metrics) -> CommandResult:
        measure = RenewalMeasure.of_config(self._module_config(run_config))
        params = run_config.params
        table = measure.renewal_table(run_config.law.tau_marginal(), params.get("delta"), params["n_max"])
        report = measure.renewal_inequality_check(table, params["trials"], np.random.default_rng(run_config.seed))
        metrics.renewal.inequality_ok.set(1 if report.passed else 0)
        result = CommandResult(frames={"renewal": table.to_frame()},
                               details={"delta": table.delta, "inv_mean": table.inv_mean,
                                        "inequality_trials": report.trials, "inequality_witness": report.witness})
        result.checks.append(Check("renewal_inequality", 0.0 if report.passed else 1.0, None, report.passed))
        return result

    def _blackwell(self, run_config: RunConfig, metrics: Metrics) -> CommandResult:
        config = self._module_config(run_config)
        law, params = run_config.law, run_config.params
        measure = RenewalMeasure.of_config(config)
        if law.is_discrete:
            if "lambda" in params:
                family = LawFamily.of_tilts(Tilting.of_config(config).eta_curve(law, params["lambda"]))
            else:
                family = LawFamily.of_marginals({0.0: law.tau_marginal()})
            frame = measure.blackwell_gap(family, params["v"], params["u"])
            gap = float(frame["gap"].max())
        else:
            if "delta" not in params:
                raise ConfigError(["delta: required for the blackwell command on a nonlattice law"])
            horizon = params.get("horizon", max(params["u"]) + params["v"] + 1)
            pair = NonlatticeBracket(measure).nonlattice_bracket(law.family.tau_distribution(), params["delta"],
                                                                 horizon)
            frame = NonlatticeBracket.bracket_gap(pair, params["v"], params["u"])
            gap = float(frame["gap_bound"].max())
        metrics.renewal.blackwell_gap.set(gap)
        result = CommandResult(frames={"blackwell": frame}, details={"blackwell_gap": gap})
        CommandRunner._add(result, CommandRunner._threshold_check("blackwell_gap", gap, run_config.thresholds))
        return result

    def _dri(self, run_config: RunConfig, metrics: Metrics) -> CommandResult:
        config = self._module_config(run_config)
        law, params = run_config.law, run_config.params
        tilts = Tilting.of_config(config).eta_curve(law, params["lambda"])
        if law.is_discrete:
            hs = [Tilting.h_function(tilt, math.ceil(tilt.tau_marginal.max_location / tilt.tau_marginal.span))
                  for tilt in tilts]
        else:
            hs = [Tilting.h_function(tilt, []) for tilt in tilts]
        report = KeyRenewal().dri_check(hs, params["delta"], params["n"], horizon=params.get("horizon"))
        result = CommandResult(frames={"dri": report.tail_index_curve, "dri-riemann": report.riemann_gap_curve},
                               details={"sup_block_sum": report.sup_block_sum,
                                        "block_sum_bound": report.block_sum_bound,
                                        "monotone": report.monotone})
        finite = bool(np.isfinite(report.sup_block_sum))
        result.checks.append(Check("dri_block_sum_finite", report.sup_block_sum, None, finite))
        last_tail = float(report.tail_index_curve["tail"].iloc[-1])
        CommandRunner._add(result, CommandRunner._threshold_check("dri_tail", last_tail, run_config.thresholds))
        return result

    def _mdp(self, run_config: RunConfig, metrics: Metrics) -> CommandResult:
        config = self._module_config(run_config)
        params = run_config.params
        estimator = TailEstimator(simulator=PathSimulator.of_config(config), tilting=Tilting.of_config(config))
        scan = estimator.mdp_rate_scan(run_config.law, params["schedule"], params["n_samples"], run_config.seed,
                                       methods=params.get("methods", ["tilted"]))
        last = scan.iloc[-1]
        metrics.montecarlo.p_hat.set(float(last["p_hat"]))
        metrics.montecarlo.rate.set(float(last["rate"]))
        result = CommandResult(frames={"mdp": scan})
        thresholds = run_config.thresholds
        if "rate_trend" in thresholds:
            decreasing = all(bool(np.all(np.diff(group["rate"].to_numpy()) < 0))
                             for _, group in scan.groupby("method"))
            result.checks.append(Check("rate_trend", 0.0 if decreasing else 1.0, thresholds["rate_trend"],
                                       decreasing))
        deviation = float((scan["rate"] - scan["reference"]).abs().max())
        result.details["max_reference_deviation"] = deviation
        CommandRunner._add(result, CommandRunner._threshold_check("rate_reference", deviation, thresholds))
        return result
