import json
import logging
import math
from fractions import Fraction
from typing import Dict, List, Optional

from cli.ConfigError import ConfigError
from cli.RunConfig import Command, RunConfig
from law.LawError import LawError
from law.LawReader import LawReader
from law.LawTools import LawTools


class ConfigParser:
    """
    Parse the json document of one batch run. Every problem found is collected,
    so a bad document is reported with all its violated fields at once.

    Grids are lists of numbers or rational strings, or {"start": .., "stop": .., "step": ..}
    with the stop point included.
    """

    max_grid_points = 1_000_000
    known_thresholds = ["identity_gap", "blackwell_gap", "eta_residual", "small_lambda_gap", "dri_tail",
                        "rate_trend", "rate_reference"]
    required_params = {Command.eta: ["lambda"],
                       Command.mgf: ["lambda", "t"],
                       Command.identity_check: ["lambda", "t"],
                       Command.renewal: [],
                       Command.blackwell: ["v", "u"],
                       Command.dri: ["lambda", "delta", "n"],
                       Command.mdp: ["schedule", "n_samples", "seed"]}

    def __init__(self, config: Dict = None):
        self._logger = logging.getLogger(self.__class__.__name__)
        self.config = config or {}

    def parse_config(self, text: str, base_dir: str = ".", seed: Optional[int] = None, out: Optional[str] = None,
                     threads: Optional[int] = None) -> RunConfig:
        """ Validated run config. Command line values of seed, out and threads win over the document. """
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError([f"document: not valid json, {e}"]) from e
        if not isinstance(raw, dict):
            raise ConfigError(["document: must be a json object"])

        errors: List[str] = []
        command = self._command(raw, errors)
        law = self._law(raw, base_dir, errors)

        params: Dict[str, object] = {}
        if seed is not None:
            raw_seed = seed
        else:
            raw_seed = raw.get("seed")
        if command is not None:
            for name in ConfigParser.required_params[command]:
                if name == "seed":
                    if raw_seed is None:
                        errors.append("seed: required for the mdp command")
                elif name not in raw:
                    errors.append(f"{name}: required for the {command.value} command")
        if raw_seed is not None and (not ConfigParser._is_int(raw_seed) or raw_seed < 0):
            errors.append(f"seed: must be a nonnegative integer, got {raw_seed!r}")
            raw_seed = None

        if "lambda" in raw:
            params["lambda"] = [float(v) for v in self._grid(raw["lambda"], "lambda", errors)]
        for name in ("t", "u"):
            if name in raw:
                params[name] = self._grid(raw[name], name, errors)
        if "delta" in raw:
            if command == Command.dri:
                params["delta"] = [float(v) for v in self._grid(raw["delta"], "delta", errors)]
            else:
                params["delta"] = self._positive_rational(raw["delta"], "delta", errors)
        if "n" in raw:
            ns = self._grid(raw["n"], "n", errors)
            if any(v.denominator != 1 or v < 0 for v in ns):
                errors.append(f"n: expected nonnegative integers, got {raw['n']!r}")
            params["n"] = [int(v) for v in ns]
        if "v" in raw:
            params["v"] = self._positive_rational(raw["v"], "v", errors)
        if "horizon" in raw:
            params["horizon"] = self._positive_rational(raw["horizon"], "horizon", errors)
        if "a" in raw:
            params["a"] = [float(v) for v in self._grid(raw["a"], "a", errors)]
        if "small_lambda" in raw:
            params["small_lambda"] = [float(v) for v in self._grid(raw["small_lambda"], "small_lambda", errors)]
        for name, default in (("n_max", 100),
                              ("trials", int(self.config.get("pyrenewal.renewal.inequality.trials", 10_000))),
                              ("n_samples", None)):
            value = raw.get(name, default)
            if value is None:
                continue
            if not ConfigParser._is_int(value) or value < 1:
                errors.append(f"{name}: must be an integer >= 1, got {value!r}")
            else:
                params[name] = value
        if "schedule" in raw:
            params["schedule"] = self._schedule(raw["schedule"], errors)
        if "methods" in raw:
            params["methods"] = self._methods(raw["methods"], errors)
        params["standardize"] = bool(raw.get("standardize", False))

        thresholds = self._thresholds(raw.get("thresholds", {}), command, errors)
        threads = threads if threads is not None else raw.get("threads", self.config.get("pyrenewal.threads", 1))
        if not ConfigParser._is_int(threads) or threads < 1:
            errors.append(f"threads: must be an integer >= 1, got {threads!r}")
        out_dir = out or raw.get("out") or self.config.get("pyrenewal.out.dir", "./out")

        if errors:
            raise ConfigError(errors)
        if params["standardize"]:
            law = LawTools.standardize(law)
        self._logger.info(f"Parsed {command.value} config for law {raw['law']}")
        return RunConfig(command=command, law_ref=raw["law"], law=law, params=params,
                         seed=int(raw_seed) if raw_seed is not None else 0,
                         out_dir=str(out_dir), threads=int(threads), thresholds=thresholds, raw=raw)

    @staticmethod
    def _is_int(value) -> bool:
        return isinstance(value, int) and not isinstance(value, bool)

    @staticmethod
    def _command(raw: dict, errors: List[str]) -> Optional[Command]:
        try:
            return Command(raw.get("command"))
        except ValueError:
            errors.append(f"command: unknown command {raw.get('command')!r}, "
                          f"expected one of {[c.value for c in Command]}")
            return None

    @staticmethod
    def _law(raw: dict, base_dir: str, errors: List[str]):
        ref = raw.get("law")
        if not isinstance(ref, str):
            errors.append("law: required, a law file path or builtin:<name>")
            return None
        try:
            return LawReader.resolve(ref, base_dir)
        except (LawError, OSError) as e:
            errors.append(f"law: {e}")
            return None

    @staticmethod
    def rational(value) -> Fraction:
        """ Exact value of a json number or rational string, decimals taken as written """
        if isinstance(value, bool):
            raise ValueError(f"{value!r} is not a number")
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"{value!r} is not finite")
            return Fraction(repr(value))
        if isinstance(value, str):
            try:
                return Fraction(value.strip())
            except (ValueError, ZeroDivisionError) as e:
                raise ValueError(f"malformed rational {value!r}") from e
        raise ValueError(f"{value!r} is not a number")

    def _positive_rational(self, value, name: str, errors: List[str]) -> Optional[Fraction]:
        try:
            result = ConfigParser.rational(value)
        except ValueError as e:
            errors.append(f"{name}: {e}")
            return None
        if result <= 0:
            errors.append(f"{name}: must be positive, got {value!r}")
            return None
        return result

    def _grid(self, entry, name: str, errors: List[str]) -> List[Fraction]:
        try:
            if isinstance(entry, list):
                points = [ConfigParser.rational(v) for v in entry]
            elif isinstance(entry, dict) and {"start", "stop", "step"} <= set(entry):
                start, stop, step = (ConfigParser.rational(entry[key]) for key in ("start", "stop", "step"))
                if step <= 0 or stop < start:
                    raise ValueError("needs step > 0 and stop >= start")
                count = math.floor((stop - start) / step) + 1
                if count > ConfigParser.max_grid_points:
                    raise ValueError(f"{count} points exceed the cap of {ConfigParser.max_grid_points}")
                points = [start + k * step for k in range(count)]
            else:
                raise ValueError("expected a list or an object with start, stop and step")
        except ValueError as e:
            errors.append(f"{name}: {e}")
            return []
        if not points:
            errors.append(f"{name}: grid is empty")
        return points

    def _schedule(self, entry, errors: List[str]) -> List[tuple]:
        if not isinstance(entry, list) or not entry:
            errors.append("schedule: expected a non-empty list of [t, x] pairs")
            return []
        schedule = []
        for i, pair in enumerate(entry):
            try:
                t, x = (float(ConfigParser.rational(v)) for v in pair)
            except (TypeError, ValueError) as e:
                errors.append(f"schedule[{i}]: expected [t, x], {e}")
                continue
            if t <= 0:
                errors.append(f"schedule[{i}]: t must be positive, got {t}")
            schedule.append((t, x))
        return schedule

    @staticmethod
    def _methods(entry, errors: List[str]) -> List[str]:
        allowed = ["naive", "tilted"]
        if not isinstance(entry, list) or not entry or any(m not in allowed for m in entry):
            errors.append(f"methods: expected a non-empty subset of {allowed}, got {entry!r}")
            return []
        return list(entry)

    def _thresholds(self, entry, command: Optional[Command], errors: List[str]) -> Dict[str, float]:
        thresholds = {}
        if command in (Command.mgf, Command.identity_check):
            thresholds["identity_gap"] = float(self.config.get("pyrenewal.threshold.identity.gap", 1e-9))
        if not isinstance(entry, dict):
            errors.append("thresholds: expected an object of name: value")
            return thresholds
        for name, value in entry.items():
            if name not in ConfigParser.known_thresholds:
                errors.append(f"thresholds.{name}: unknown threshold, expected one of {ConfigParser.known_thresholds}")
            elif isinstance(value, bool) or not isinstance(value, (int, float)):
                errors.append(f"thresholds.{name}: must be a number, got {value!r}")
            else:
                thresholds[name] = float(value)
        return thresholds
