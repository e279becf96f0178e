"""Necessary condition for LOCC distinguishability of orthogonal pure states.

If the states of an ensemble can be perfectly distinguished by LOCC, the sum
of their tensor ranks (Schmidt numbers for two parties) cannot exceed the
dimension of the whole space. :func:`check` certifies indistinguishability
when the sum of *lower* bounds already exceeds it; it never claims that an
ensemble is distinguishable.
"""
from dataclasses import dataclass

from .tensor_rank import RankConfig, rank_certificate

CERTIFIED = "CertifiedLoccIndistinguishable"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True, eq=False)
class CriterionReport:
    per_state: tuple  # (label, RankCertificate) pairs in ensemble order
    total_dim: int

    @property
    def sum_lower(self):
        return sum(c.lower_bound for _, c in self.per_state)

    @property
    def sum_upper(self):
        return sum(c.upper_bound for _, c in self.per_state)

    @property
    def verdict(self):
        return CERTIFIED if self.sum_lower > self.total_dim else INCONCLUSIVE

    @property
    def certified(self):
        return self.verdict == CERTIFIED

    def to_dict(self):
        return {
            "per_state": [{"label": label, **cert.to_dict()} for label, cert in self.per_state],
            "sum_lower": self.sum_lower,
            "sum_upper": self.sum_upper,
            "total_dim": self.total_dim,
            "verdict": self.verdict,
        }


def check(ensemble, config=None):
    """Compare the summed tensor-rank bounds of ``ensemble`` with its total dimension.

    Probabilities play no role. Per-state certificates are exact Schmidt
    numbers for two parties and :func:`~loccsum.tensor_rank.rank_certificate`
    intervals otherwise.
    """
    config = config or RankConfig()
    per_state = tuple(
        (label, rank_certificate(state, config)) for label, state in zip(ensemble.labels, ensemble.states)
    )
    return CriterionReport(per_state, ensemble.shape.total_dim)
