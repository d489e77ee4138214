import json
import logging
import os

from law.JointLaw import JointLaw, LawKind
from law.LawError import LawError
from law.ScaledSqrtFamily import ScaledSqrtFamily
from law.StandardLaws import StandardLaws


class LawReader:
    """
    Read law files:
    {"kind":"discrete","atoms":[{"tau":"3/2","x":-1.0,"p":0.5}, ...]}
    {"kind":"parametric","family":"scaled-sqrt","params":{"a":1,"b":0,"tau_law":"exponential","rate":1}}
    or builtin:<name> references to StandardLaws.
    """
    builtin_prefix = "builtin:"
    _logger = logging.getLogger("LawReader")

    @staticmethod
    def resolve(ref: str, base_dir: str = ".") -> JointLaw:
        """ Law from builtin:<name> or from a json file path, relative paths resolved against base_dir """
        if ref.startswith(LawReader.builtin_prefix):
            return StandardLaws.by_name(ref[len(LawReader.builtin_prefix):])
        path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
        return LawReader.from_json_file(path)

    @staticmethod
    def from_json_file(path: str) -> JointLaw:
        if not os.path.exists(path):
            raise LawError(f"Law file {path} not found")
        LawReader._logger.info(f"Reading law from {path}")
        with open(path, "r", encoding="utf-8") as file:
            return LawReader.from_text(file.read())

    @staticmethod
    def from_text(text: str) -> JointLaw:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise LawError(f"Law is not valid json: {e}") from e
        return LawReader.from_dict(data)

    @staticmethod
    def from_dict(data: dict) -> JointLaw:
        if not isinstance(data, dict):
            raise LawError("Law must be a json object")
        kind = data.get("kind")
        if kind == LawKind.discrete.value:
            return LawReader._discrete_of(data)
        if kind == LawKind.parametric.value:
            return LawReader._parametric_of(data)
        raise LawError(f"Unknown law kind {kind!r}, expected discrete or parametric")

    @staticmethod
    def _discrete_of(data: dict) -> JointLaw:
        atoms = data.get("atoms")
        if not isinstance(atoms, list) or not atoms:
            raise LawError("Discrete law needs a non-empty atoms list")
        triples = []
        for i, atom in enumerate(atoms):
            missing = [key for key in ("tau", "x", "p") if key not in atom]
            if missing:
                raise LawError(f"Atom {i} misses {missing}")
            if not isinstance(atom["tau"], (str, int)):
                # Binary floats make the span meaningless
                raise LawError(f"Atom {i}: tau must be a rational string or an integer, got {atom['tau']!r}")
            triples.append((atom["tau"], atom["x"], atom["p"]))
        return JointLaw.discrete(triples)

    @staticmethod
    def _parametric_of(data: dict) -> JointLaw:
        family = data.get("family")
        if family != ScaledSqrtFamily.name:
            raise LawError(f"Parametric family {family!r} cannot be read from a file, "
                           f"only {ScaledSqrtFamily.name} is supported")
        params = dict(data.get("params") or {})
        missing = [key for key in ("a", "b", "tau_law") if key not in params]
        if missing:
            raise LawError(f"Family {family} misses parameters {missing}")
        a, b, tau_law = params.pop("a"), params.pop("b"), params.pop("tau_law")
        try:
            return JointLaw.parametric(ScaledSqrtFamily.of(float(a), float(b), tau_law, **params))
        except LawError:
            raise
        except (TypeError, ValueError) as e:
            raise LawError(f"Bad parameters for {family}: {e}") from e
