"""Command-line interface: every analysis as a subcommand printing JSON.

Exit codes: 0 success / inconclusive, 3 certified LOCC-indistinguishable
(``check`` only), 1 usage or input error, 2 internal numerical failure.
"""
import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import criterion, info_bounds, product_povm, protocol_search, schmidt, states, tensor_rank
from .errors import LoccError, NumericalError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_CERTIFIED = 3
SEED_ENV = "LOCCSUM_SEED"

_CERT = {
    "type": "object",
    "required": ["lower_bound", "upper_bound", "lower_method", "upper_method"],
    "properties": {
        "label": {"type": "string"},
        "lower_bound": {"type": "integer", "minimum": 1},
        "upper_bound": {"type": "integer", "minimum": 1},
        "lower_method": {"enum": list(tensor_rank.LOWER_METHODS)},
        "upper_method": {"enum": list(tensor_rank.UPPER_METHODS)},
        "witness_terms": {"type": ["integer", "null"]},
        "witness_residual": {"type": ["number", "null"]},
    },
}

SCHEMAS = {
    "check": {
        "type": "object",
        "required": ["per_state", "sum_lower", "sum_upper", "total_dim", "verdict"],
        "properties": {
            "per_state": {"type": "array", "items": _CERT},
            "sum_lower": {"type": "integer"},
            "sum_upper": {"type": "integer"},
            "total_dim": {"type": "integer"},
            "verdict": {"enum": [criterion.CERTIFIED, criterion.INCONCLUSIVE]},
        },
    },
    "schmidt": {
        "type": "array",
        "items": {
            "type": "object",
            "required": ["label", "cut", "schmidt_number", "coefficients", "entropy", "units"],
            "properties": {
                "label": {"type": "string"},
                "cut": {"type": "string"},
                "schmidt_number": {"type": "integer", "minimum": 1},
                "coefficients": {"type": "array", "items": {"type": "number"}},
                "entropy": {"type": "number", "minimum": 0},
                "units": {"enum": ["nats", "bits"]},
            },
        },
    },
    "rank": {"type": "array", "items": _CERT},
    "bounds": {
        "type": "object",
        "required": ["total_dim_log", "average_entanglement", "output_entanglement",
                     "bound_basic", "bound_refined", "units"],
        "properties": {
            "total_dim_log": {"type": "number"},
            "average_entanglement": {"type": "number", "minimum": 0},
            "output_entanglement": {"type": "number", "minimum": 0},
            "bound_basic": {"type": "number"},
            "bound_refined": {"type": "number"},
            "units": {"enum": ["nats", "bits"]},
        },
    },
    "search": {
        "type": "object",
        "required": ["found", "best_defect", "candidates"],
        "properties": {
            "found": {"type": "boolean"},
            "verified": {"type": "boolean"},
            "best_defect": {"type": "number"},
            "candidates": {"type": "integer"},
            "protocol": {"type": "object", "required": ["party_dims", "root"]},
        },
    },
    "verify-povm": {
        "type": "object",
        "required": ["completeness_defect", "complete", "indication"],
        "properties": {
            "completeness_defect": {"type": "number", "minimum": 0},
            "complete": {"type": "boolean"},
            "indication": {
                "type": "object",
                "required": ["assignment", "liips_per_state", "valid"],
            },
            "liips_check": {"type": "array"},
        },
    },
    "catalog": {"type": "array", "items": {"type": "object", "required": ["name", "description"]}},
}


@dataclass(frozen=True)
class RunConfig:
    rank_eps: float = 1e-8
    als_restarts: int = 64
    als_iters: int = 500
    als_tol: float = 1e-8
    seed: int = 0
    grid_depth: int = 4
    refine_iters: int = 30
    units: str = "nats"

    def __post_init__(self):
        for name in ("rank_eps", "als_tol"):
            if not getattr(self, name) > 0:
                raise LoccError(f"{name} must be > 0")
        if not -(2**63) <= self.seed < 2**64:
            raise LoccError("seed must be a 64-bit integer")
        if self.units not in ("nats", "bits"):
            raise LoccError("units must be nats or bits")

    def rank_config(self):
        return tensor_rank.RankConfig(
            eps=self.rank_eps, restarts=self.als_restarts, iters=self.als_iters, tol=self.als_tol, seed=self.seed
        )


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise LoccError(f"{SEED_ENV}={raw!r} is not an integer")


def _parse_params(text):
    if not text:
        return ()
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise LoccError(f"--params expects integers like 3,4, got {text!r}")


def _load_ensemble(args):
    if args.catalog:
        return states.catalog(args.catalog, _parse_params(args.params))
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise LoccError(f"cannot read {args.file}: {exc}")
    return states.parse_ensemble(text)


def _config(args):
    return RunConfig(
        rank_eps=args.rank_eps,
        als_restarts=args.als_restarts,
        als_iters=args.als_iters,
        als_tol=args.als_tol,
        seed=args.seed if args.seed is not None else _default_seed(),
        grid_depth=getattr(args, "grid_depth", 4),
        refine_iters=getattr(args, "refine_iters", 30),
        units=getattr(args, "units", "nats"),
    )


def _cut_label(cut):
    left, right = cut
    sep = "," if max(left + right) > 9 else ""
    return sep.join(map(str, left)) + "|" + sep.join(map(str, right))


def _unit_scale(units):
    return 1.0 if units == "nats" else 1.0 / math.log(2)


def _cert_dict(label, state, cert):
    out = {"label": label, **cert.to_dict()}
    out["witness_residual"] = None if cert.witness is None else tensor_rank.witness_residual(state, cert.witness)
    return out


def cmd_check(args, cfg):
    ens = _load_ensemble(args)
    report = criterion.check(ens, cfg.rank_config())
    out = report.to_dict()
    for entry, (label, cert), state in zip(out["per_state"], report.per_state, ens.states):
        entry.update(_cert_dict(label, state, cert))
    print(
        f"{report.verdict}: sum of rank lower bounds {report.sum_lower} vs dimension {report.total_dim}"
        f" (upper bounds sum to {report.sum_upper})",
        file=sys.stderr,
    )
    return out, EXIT_CERTIFIED if report.certified else EXIT_OK


def cmd_schmidt(args, cfg):
    ens = _load_ensemble(args)
    scale = _unit_scale(cfg.units)
    out = []
    for label, state in zip(ens.labels, ens.states):
        sd = schmidt.schmidt_decompose(state, args.cut, cfg.rank_eps)
        out.append({
            "label": label,
            "cut": _cut_label(sd.cut),
            "schmidt_number": sd.schmidt_number,
            "coefficients": [float(c) for c in sd.coefficients],
            "entropy": schmidt.entropy_from_coefficients(sd.singular_values) * scale,
            "units": cfg.units,
        })
    print("schmidt numbers: " + ", ".join(str(e["schmidt_number"]) for e in out), file=sys.stderr)
    return out, EXIT_OK


def cmd_rank(args, cfg):
    ens = _load_ensemble(args)
    out = []
    for label, state in zip(ens.labels, ens.states):
        cert = tensor_rank.rank_certificate(state, cfg.rank_config())
        out.append(_cert_dict(label, state, cert))
    print("rank intervals: " + ", ".join(f"[{e['lower_bound']},{e['upper_bound']}]" for e in out), file=sys.stderr)
    return out, EXIT_OK


def cmd_search(args, cfg):
    ens = _load_ensemble(args)
    res = protocol_search.search_report(ens, cfg.grid_depth, cfg.refine_iters, cfg.seed)
    out = {"found": res.protocol is not None, "best_defect": res.best_defect, "candidates": res.candidates}
    if res.protocol is not None:
        out["verified"] = protocol_search.verify_distinguishes(res.protocol, ens)
        out["protocol"] = protocol_search.protocol_to_dict(res.protocol)
        print("found a verified one-way protocol", file=sys.stderr)
    else:
        print(f"no protocol found (best branch defect {res.best_defect:.3g}); this is not a proof", file=sys.stderr)
    return out, EXIT_OK


def cmd_bounds(args, cfg):
    ens = _load_ensemble(args)
    rep = info_bounds.bounds(ens, args.cut, args.ef)
    if cfg.units == "bits":
        rep = info_bounds.to_bits(rep)
    print(f"I_acc <= {rep.bound_basic:.6g} ({rep.bound_refined:.6g} with E_f) {rep.units}", file=sys.stderr)
    return rep.to_dict(), EXIT_OK


def cmd_catalog(args, cfg):
    if args.show:
        ens = states.catalog(args.show, _parse_params(args.params))
        return states.ensemble_to_dict(ens), EXIT_OK
    return [{"name": k, "description": v[1]} for k, v in states.CATALOG.items()], EXIT_OK


def cmd_verify_povm(args, cfg):
    ens = _load_ensemble(args)
    try:
        with open(args.povm, encoding="utf-8") as fh:
            povm = product_povm.parse_povm(fh.read())
    except OSError as exc:
        raise LoccError(f"cannot read {args.povm}: {exc}")
    defect = product_povm.verify_completeness(povm)
    table = product_povm.indication_table(povm, ens, cfg.rank_eps)
    out = {
        "completeness_defect": defect,
        "complete": defect <= product_povm.COMPLETENESS_TOL,
        "indication": {
            "assignment": list(table.assignment),
            "liips_per_state": list(table.liips_per_state),
            "valid": table.valid,
            "conflicts": [[i, list(js)] for i, js in table.conflicts],
            "near_threshold": [list(w) for w in table.near_threshold],
        },
    }
    if table.valid:
        res = product_povm.liips_check(povm, ens, cfg.rank_eps, cfg.rank_config())
        out["liips_check"] = [
            {"label": lab, "liips_count": r.liips_count, "schmidt_number": r.schmidt_number, "satisfied": r.satisfied}
            for lab, r in zip(ens.labels, res)
        ]
    status = "valid" if table.valid else f"invalid ({len(table.conflicts)} conflicting operators)"
    print(f"completeness defect {defect:.3g}; indication table {status}", file=sys.stderr)
    return out, EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "schmidt": cmd_schmidt,
    "rank": cmd_rank,
    "search": cmd_search,
    "bounds": cmd_bounds,
    "catalog": cmd_catalog,
    "verify-povm": cmd_verify_povm,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="loccsum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--catalog", help="named example ensemble (see `loccsum catalog`)")
    src.add_argument("--file", help="ensemble JSON file")
    common.add_argument("--params", help="catalog parameters, e.g. 3,4")

    tuning = argparse.ArgumentParser(add_help=False)
    tuning.add_argument("--rank-eps", type=float, default=1e-8, help="relative singular value cutoff")
    tuning.add_argument("--als-restarts", type=int, default=64)
    tuning.add_argument("--als-iters", type=int, default=500)
    tuning.add_argument("--als-tol", type=float, default=1e-8)
    tuning.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or 0)")

    units = argparse.ArgumentParser(add_help=False)
    units.add_argument("--units", choices=["nats", "bits"], default="nats")
    units.add_argument("--bits", dest="units", action="store_const", const="bits")

    cut = argparse.ArgumentParser(add_help=False)
    cut.add_argument("--cut", default=None, help="bipartition such as 0|12 (default: first party | rest)")

    sub.add_parser("check", parents=[common, tuning], help="sum-of-ranks indistinguishability certificate")
    sub.add_parser("schmidt", parents=[common, tuning, cut, units], help="per-state Schmidt data across a cut")
    sub.add_parser("rank", parents=[common, tuning], help="tensor rank certificates")
    p = sub.add_parser("search", parents=[common, tuning], help="heuristic one-way LOCC protocol search")
    p.add_argument("--grid-depth", type=int, default=4)
    p.add_argument("--refine-iters", type=int, default=30)
    p = sub.add_parser("bounds", parents=[common, tuning, cut, units], help="accessible information bounds")
    p.add_argument("--ef", type=float, default=0.0, help="average output entanglement E_f in nats")
    p = sub.add_parser("catalog", parents=[tuning], help="list catalog entries or dump one as JSON")
    p.add_argument("--show", metavar="NAME", help="print the named ensemble as JSON")
    p.add_argument("--params", help="catalog parameters for --show")
    p = sub.add_parser("verify-povm", parents=[common, tuning], help="completeness, indication and LIIPS checks")
    p.add_argument("--povm", required=True, help="rank-one product POVM JSON file")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        cfg = _config(args)
        out, code = COMMANDS[args.command](args, cfg)
    except LoccError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(json.dumps(out, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
