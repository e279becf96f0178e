"""Upper bounds on LOCC-accessible information of an orthogonal ensemble.

``I_acc <= ln(total_dim) - E`` and, given the average entanglement ``E_f`` left
in the measurement outputs, ``I_acc <= ln(total_dim) - E - E_f``, where ``E``
is the probability-weighted entropy of entanglement of the members. All values
are in nats unless converted with :func:`to_bits`.
"""
import math
from dataclasses import asdict, dataclass

from .errors import InvalidInput
from .schmidt import entanglement_entropy, parse_cut


@dataclass(frozen=True)
class InfoBoundReport:
    total_dim_log: float
    average_entanglement: float
    output_entanglement: float
    bound_basic: float
    bound_refined: float
    units: str = "nats"

    def to_dict(self):
        return asdict(self)


def bounds(ensemble, cut=None, output_entanglement=0.0):
    if output_entanglement < 0 or not math.isfinite(output_entanglement):
        raise InvalidInput("output entanglement must be a finite number >= 0")
    cut = parse_cut(cut, ensemble.shape.n_parties)
    log_dim = math.log(ensemble.shape.total_dim)
    avg = math.fsum(p * entanglement_entropy(s, cut) for p, s in zip(ensemble.probabilities, ensemble.states))
    basic = log_dim - avg
    return InfoBoundReport(log_dim, avg, float(output_entanglement), basic, basic - output_entanglement)


def to_bits(report):
    k = 1.0 / math.log(2)
    return InfoBoundReport(
        report.total_dim_log * k,
        report.average_entanglement * k,
        report.output_entanglement * k,
        report.bound_basic * k,
        report.bound_refined * k,
        units="bits",
    )
