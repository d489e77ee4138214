import argparse
import logging.config
import os
import sys
from collections import defaultdict
from typing import Dict, List, Optional

import pandas as pd
import yaml

from cli.CommandRunner import CommandRunner
from cli.ConfigError import ConfigError
from cli.ReportWriter import ReportWriter


class App:
    """
    Command line entry point: read the json run config given by --config, run its command
    and exit with the status of the run checks.
    """

    def __init__(self, argv: Optional[List[str]] = None):
        self._init_logger()

        self._logger.info("\n--------------------------------------------------------------"
                          "\n--------------   Starting pyrenewal App   --------------------"
                          "\n--------------------------------------------------------------")
        # For pandas printing to log
        pd.set_option('display.max_columns', None)
        pd.set_option("expand_frame_repr", False)

        self.args = self._parse_args(argv)
        self.config = self._load_config()
        self._logger.info("App initialized")

    def _init_logger(self):
        cfgpaths = ["cfg/log.yaml", "cfg/log-dev.yaml"]
        for cfgpath in cfgpaths:
            cfgdict = self._read_config_file(cfgpath)
            if cfgdict:
                logging.config.dictConfig(cfgdict)
        self._logger = logging.getLogger(self.__class__.__name__)
        self._logger.info("Logging configured")

    @staticmethod
    def _read_config_file(path: str, required=False):
        if os.path.exists(path):
            with open(path, "r") as file:
                print(f"Reading config from {path}")
                conf = yaml.safe_load(file) or {}
        elif required:
            sys.exit(f"Obligatory config {path} not found.")
        else:
            print(f"Config {path} not found, that could be ok.")
            conf = {}
        return conf

    def _load_config(self) -> dict:
        """
        Load app config from cfg folder respecting the order: defaults, app.yaml, app-dev.yaml, command line
        """
        config: Dict[str, object] = defaultdict()
        config.update(self._read_config_file("cfg/app-defaults.yaml", required=True))
        config.update(self._read_config_file("cfg/app.yaml"))
        config.update(self._read_config_file("cfg/app-dev.yaml"))
        if self.args.get("out"):
            config["pyrenewal.out.dir"] = self.args["out"]
        if self.args.get("threads") is not None:
            config["pyrenewal.threads"] = self.args["threads"]

        self._logger.info(self._config_msg(config))
        return config

    @staticmethod
    def _config_msg(config):
        """ Print config parameters to log """
        msg = "\n" + "\n".join([f"{key}: {config[key]}" for key in sorted(config) if key.startswith("pyrenewal")])
        return msg

    @staticmethod
    def _parse_args(argv: Optional[List[str]] = None) -> Dict[str, object]:
        """ Parse command line arguments"""
        parser = argparse.ArgumentParser(prog="pyrenewal",
                                         description="Renewal-reward moment generating function checks")
        parser.add_argument("--config", required=True,
                            help="Json run config, example: --config cfg/runs/identity-check.json")
        parser.add_argument("--out", help="Output directory, overrides the run config")
        parser.add_argument("--seed", type=int, help="Random seed, overrides the run config")
        parser.add_argument("--threads", type=int, help="Worker threads, overrides the run config")
        return vars(parser.parse_args(argv))

    def run(self) -> int:
        """
        Application entry point, returns the exit status
        """
        path = self.args["config"]
        runner = CommandRunner(self.config)
        if not os.path.exists(path):
            error = ConfigError([f"config: file {path} not found"])
            self._logger.error(str(error))
            ReportWriter(self.config.get("pyrenewal.out.dir", "./out")).write_error(error)
            return 2
        with open(path, "r", encoding="utf-8") as file:
            text = file.read()
        status = runner.execute(text, base_dir=os.path.dirname(os.path.abspath(path)), seed=self.args.get("seed"),
                                out=self.args.get("out"), threads=self.args.get("threads"))
        self._logger.info(f"Exit status {status}")
        return status


if __name__ == "__main__":
    sys.exit(App().run())
