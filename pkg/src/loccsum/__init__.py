"""Certificates of LOCC indistinguishability for orthogonal multipartite pure states.

An ensemble of orthogonal states that LOCC can distinguish perfectly has
tensor ranks (Schmidt numbers, for two parties) summing to at most the
dimension of the whole space. ``loccsum`` computes rigorous lower bounds on
those ranks and reports when the sum exceeds the dimension, alongside the
supporting tools: product-measurement reduction and indication tables,
protocol simulation and search, and accessible-information bounds.
"""
from .criterion import CERTIFIED, INCONCLUSIVE, CriterionReport, check
from .info_bounds import InfoBoundReport, bounds
from .numerics import KERNEL
from .schmidt import entanglement_entropy, schmidt_decompose, schmidt_number
from .states import Ensemble, PureState, SystemShape, catalog, parse_ensemble, random_orthogonal_ensemble
from .tensor_rank import RankCertificate, RankConfig, rank_certificate

__version__ = "0.1.0"

__all__ = [
    "CERTIFIED",
    "INCONCLUSIVE",
    "KERNEL",
    "CriterionReport",
    "Ensemble",
    "InfoBoundReport",
    "PureState",
    "RankCertificate",
    "RankConfig",
    "SystemShape",
    "bounds",
    "catalog",
    "check",
    "entanglement_entropy",
    "parse_ensemble",
    "random_orthogonal_ensemble",
    "rank_certificate",
    "schmidt_decompose",
    "schmidt_number",
]
