from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from law.JointLaw import JointLaw


class Command(str, Enum):
    eta = "eta"
    mgf = "mgf"
    renewal = "renewal"
    blackwell = "blackwell"
    dri = "dri"
    mdp = "mdp"
    identity_check = "identity-check"


@dataclass(frozen=True)
class RunConfig:
    """
    One validated batch run. params holds the parsed command parameters (grids as lists),
    raw the document as given, both go to the report for provenance.
    """
    command: Command
    law_ref: str
    law: JointLaw
    params: Dict[str, object]
    seed: int
    out_dir: str
    threads: int = 1
    thresholds: Dict[str, float] = field(default_factory=dict)
    raw: Optional[dict] = None
