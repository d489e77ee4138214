from dataclasses import dataclass

import pandas as pd


@dataclass(frozen=True, eq=False)
class DRIReport:
    """
    Direct Riemann integrability witness for a family of functions h on [0, inf).
    sup_block_sum: sup over the family of sum_n sup_[n, n+1) |h|
    block_sum_bound: h(0) + integral of h, the monotone bound of the block sum (nan if not monotone)
    tail_index_curve: columns N, tail
    riemann_gap_curve: columns delta, gap (upper minus lower Riemann sum)
    """
    sup_block_sum: float
    block_sum_bound: float
    tail_index_curve: pd.DataFrame
    riemann_gap_curve: pd.DataFrame
    monotone: bool

    def to_dict(self) -> dict:
        return {"sup_block_sum": self.sup_block_sum,
                "block_sum_bound": self.block_sum_bound,
                "monotone": self.monotone,
                "tail_index_curve": self.tail_index_curve.to_dict(orient="list"),
                "riemann_gap_curve": self.riemann_gap_curve.to_dict(orient="list")}
