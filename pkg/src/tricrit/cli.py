"""``tricrit`` command-line entry point.

Every report is a JSON object ``{"tool", "version", "config", "result"}``.
Exit codes: 0 success, 2 validation failure, 3 capacity limit.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, dense
from .errors import CapacityError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY = 0, 2, 3
RANDOM_COMMANDS = {"search", "conjecture-scan", "ball", "sample-detect"}


@dataclass
class RunConfig:
    subcommand: str
    qubits: list[int] | None = None
    tolerance: float = 1e-9
    seed: int | None = None
    trials: int | None = None
    input: str | None = None
    output: str | None = None
    cache_dir: str | None = None
    format: str = "json"
    two_copies: bool = False
    mode: str | None = None
    options: dict = field(default_factory=dict)

    def validate(self):
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be positive")
        if self.format not in ("json", "csv"):
            raise ValidationError(f"unknown format {self.format!r}")
        # purity --conjecture-scan carries its own seed argument
        if self.subcommand in RANDOM_COMMANDS and self.seed is None:
            raise ValidationError(f"'{self.subcommand}' uses randomness and needs --seed")
        if self.input is not None and not Path(self.input).is_file():
            raise ValidationError(f"input file not found: {self.input}")
        if self.output is not None and not Path(self.output).resolve().parent.is_dir():
            raise ValidationError(f"output directory does not exist: {Path(self.output).parent}")
        if self.trials is not None and self.trials < 1:
            raise ValidationError("trials must be positive")


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        if np.iscomplexobj(o):
            return [[z.real, z.imag] for z in o.ravel().tolist()]
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _load_state(cfg: RunConfig):
    from .files import bundled_path, parse_state_file

    return parse_state_file(cfg.input or bundled_path())


def _one(cfg: RunConfig, name: str = "--qubits") -> int:
    if not cfg.qubits or len(cfg.qubits) != 1:
        raise ValidationError(f"this subcommand needs exactly one {name} value")
    return cfg.qubits[0]


def _cache_dir(cfg: RunConfig):
    from .cache import default_cache_dir

    return Path(cfg.cache_dir) if cfg.cache_dir else default_cache_dir()


# -- subcommands ---------------------------------------------------------


def cmd_enumerate(cfg: RunConfig) -> dict:
    from .cache import ensure_cache
    from .stabilizer import check_capacity, enumerate_stabilizer_states, triple_array

    n = _one(cfg)
    check_capacity(n)
    st = enumerate_stabilizer_states(n)
    status = ensure_cache(_cache_dir(cfg), n)
    out = {"n": n, "state_count": len(st), "cache": status.to_dict()}
    if cfg.options.get("triples", True):
        out["triple_count"] = int(triple_array(n).shape[0])
    return out


def cmd_detect(cfg: RunConfig) -> dict:
    from .cache import ensure_cache
    from .criterion import detect, detect_two_copies

    rho = _load_state(cfg)
    n = dense.n_qubits(rho)
    if cfg.two_copies:
        from .stabilizer import check_capacity

        check_capacity(2 * n)
        cache = ensure_cache(_cache_dir(cfg), 2 * n)
        rep = detect_two_copies(rho, cfg.tolerance)
    else:
        cache = ensure_cache(_cache_dir(cfg), n)
        rep = detect(rho, cfg.tolerance, with_negativity=cfg.options.get("negativity", False))
    out = rep.to_dict()
    out["two_copies"] = cfg.two_copies
    out["cache_status"] = cache.status
    return out


def cmd_negativity(cfg: RunConfig) -> dict:
    from .criterion import LOG_BASE, negativity_denominator, triangle_negativity

    rho = _load_state(cfg)
    n = dense.n_qubits(rho)
    return {"n": n, "negativity": triangle_negativity(rho), "log_base": LOG_BASE,
            "normalization": negativity_denominator(n)}


def cmd_reduce(cfg: RunConfig) -> dict:
    from .criterion import canonical_facet_value, detect, reduce_to_single_qubit, witness_value

    rho = _load_state(cfg)
    rep = detect(rho, cfg.tolerance)
    w = rep.argmin
    sigma, p, circ = reduce_to_single_qubit(rho, w)
    out = {"witness": w.to_dict(), "witness_value": witness_value(rho, w), "probability": p,
           "circuit": circ.to_list()}
    if sigma is None:
        out.update(empty=True, bloch=None)
    else:
        out.update(empty=False, bloch=dense.bloch_vector(sigma).tolist(),
                   reduced_value=p * canonical_facet_value(sigma))
    return out


def cmd_distill(cfg: RunConfig) -> dict:
    from .distill import build_fig_s1_circuit, h_distillable, run_two_copy_distill

    rho = _load_state(cfg)
    proto = build_fig_s1_circuit()
    res = run_two_copy_distill(rho, proto)
    out = {"outcome": res.to_dict(), "protocol": proto.to_dict()}
    if res.output is not None:
        ok, margin = h_distillable(res.output)
        out["outcome"]["h_margin"] = margin
    return out


def cmd_search(cfg: RunConfig) -> dict:
    from .distill import SearchConfig, search_activation_state

    init = _load_state(cfg) if cfg.input else None
    rng = np.random.default_rng(cfg.seed)
    res = search_activation_state(rng, cfg.trials or 200, SearchConfig(init=init))
    return res.to_dict()


def cmd_purity(cfg: RunConfig) -> dict:
    from . import bounds

    o = cfg.options
    out: dict = {}
    if o.get("construct") is not None:
        n = o["construct"]
        rho = bounds.minimal_purity_state(n)
        top, arg = bounds.boundary_check(rho, n)
        out["construct"] = {"n": n, "purity": dense.purity(rho), "expected": bounds.minimal_purity_purity(1 << n),
                            "min_eigenvalue": dense.eigen_min(rho), "max_stabilizer_overlap": top,
                            "maximizers": arg}
    if o.get("check"):
        from .files import parse_state_file

        rho = parse_state_file(o["check"])
        n = dense.n_qubits(rho)
        top, arg = bounds.boundary_check(rho, n)
        cert = bounds.pauli_l1_certificate(rho)
        d = 1 << n
        chk = {"n": n, "purity": dense.purity(rho), "minimal_magic_purity": bounds.minimal_purity_purity(d),
               "mixture_threshold": bounds.purity_lower_threshold(d), "max_stabilizer_overlap": top,
               "maximizers": arg, "certificate": None if cert is None else cert.to_dict()}
        if n <= 3:
            chk["membership"] = bounds.polytope_membership(rho, n).to_dict()
        out["check"] = chk
    if o.get("lift"):
        try:
            n, m = (int(v) for v in o["lift"].split(":"))
        except ValueError as exc:
            raise ValidationError("--lift expects n:m") from exc
        res = bounds.lift_boundary_state(bounds.minimal_purity_state(n), m)
        top, _ = bounds.boundary_check(res.state, m)
        out["lift"] = {"n": n, "m": m, "purity": res.purity, "expected": res.expected_purity,
                       "max_stabilizer_overlap": top, "warning": res.warning}
    if o.get("conjecture_scan"):
        n, trials, seed = o["conjecture_scan"]
        mode = "membership" if n <= 3 else "criterion"
        out["conjecture_scan"] = bounds.conjecture_scan(n, trials, np.random.default_rng(seed), mode).to_dict()
    if not out:
        raise ValidationError("purity needs one of --construct, --check, --lift, --conjecture-scan")
    return out


def cmd_conjecture_scan(cfg: RunConfig) -> dict:
    from .bounds import conjecture_scan

    n = _one(cfg)
    mode = cfg.mode or ("membership" if n <= 3 else "criterion")
    return conjecture_scan(n, cfg.trials or 100, np.random.default_rng(cfg.seed), mode, cfg.tolerance).to_dict()


def cmd_ball(cfg: RunConfig) -> dict:
    from .bounds import absolute_ball_reduction

    rho = _load_state(cfg) if cfg.input else dense.maximally_mixed(4)
    rep = absolute_ball_reduction(rho, cfg.options.get("dim_a", 2), cfg.trials or 1000,
                                  np.random.default_rng(cfg.seed))
    return rep.to_dict()


def cmd_witness_bounds(cfg: RunConfig) -> dict:
    from . import stats

    ks = cfg.options.get("k") or [0, 1, 2, 4, 8, 16]
    ns = cfg.qubits or [1, 2, 3]
    rows = []
    for n in ns:
        for k in ks:
            rows.append({"n": n, "k": k, "single_witness": stats.single_witness_bound(k),
                         "union": stats.criterion_union_bound(n, k),
                         "linear": stats.linear_method_bound(cfg.options.get("m", 1), k, 1 << n)})
    return {"rows": rows}


def cmd_sample_detect(cfg: RunConfig) -> dict:
    from . import stats

    ns = cfg.qubits or [2, 3]
    ks = cfg.options.get("k") or [1, 2, 4, 8, 16]
    mode = cfg.mode or "single-witness"
    rows = stats.sweep(ns, ks, cfg.trials or 10_000, cfg.seed, mode)
    return {"rows": [r.row() for r in rows]}


def cmd_cache(cfg: RunConfig) -> dict:
    from .cache import manage_cache

    ns = cfg.qubits or [1, 2, 3]
    res = manage_cache(_cache_dir(cfg), cfg.options["action"], ns)
    return {"action": cfg.options["action"], "entries": [r.to_dict() for r in res],
            "ok": all(r.status in ("ok", "built", "rebuilt", "purged", "missing") for r in res)
            and not (cfg.options["action"] == "verify" and any(r.status != "ok" for r in res))}


COMMANDS = {
    "enumerate": cmd_enumerate,
    "detect": cmd_detect,
    "negativity": cmd_negativity,
    "reduce": cmd_reduce,
    "distill": cmd_distill,
    "search": cmd_search,
    "purity": cmd_purity,
    "conjecture-scan": cmd_conjecture_scan,
    "ball": cmd_ball,
    "witness-bounds": cmd_witness_bounds,
    "sample-detect": cmd_sample_detect,
    "cache": cmd_cache,
}


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Dispatch one subcommand; never raises for expected failures."""
    report = {"tool": "tricrit", "version": __version__, "config": asdict(cfg)}
    try:
        cfg.validate()
        report["result"] = COMMANDS[cfg.subcommand](cfg)
        code = EXIT_OK
        if cfg.subcommand == "cache" and not report["result"]["ok"]:
            code = EXIT_VALIDATION
    except CapacityError as exc:
        report["error"] = {"kind": "capacity", "message": str(exc)}
        code = EXIT_CAPACITY
    except ValidationError as exc:
        report["error"] = {"kind": "validation", "message": str(exc)}
        code = EXIT_VALIDATION
    report["exit_code"] = code
    return code, report


def _csv_text(report: dict) -> str:
    rows = report.get("result", {}).get("rows")
    if rows is None:
        raise ValidationError("csv output is available for row-based subcommands only")
    buf = io.StringIO()
    if report["config"]["subcommand"] == "sample-detect":
        from .stats import CSV_FIELDS

        fields = CSV_FIELDS
    else:
        fields = list(rows[0]) if rows else []
    wr = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    wr.writeheader()
    wr.writerows(rows)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--qubits", type=int, nargs="+")
    common.add_argument("--in", dest="input")
    common.add_argument("--out", dest="output")
    common.add_argument("--format", default="json", choices=["json", "csv"])
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--cache-dir")
    common.add_argument("--two-copies", action="store_true")
    common.add_argument("--mode")

    p = argparse.ArgumentParser(prog="tricrit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"tricrit {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "enumerate":
            sp.add_argument("--no-triples", dest="triples", action="store_false")
        elif name == "detect":
            sp.add_argument("--negativity", action="store_true")
        elif name == "purity":
            sp.add_argument("--construct", type=int)
            sp.add_argument("--check")
            sp.add_argument("--lift")
            sp.add_argument("--conjecture-scan", type=int, nargs=3, metavar=("N", "TRIALS", "SEED"))
        elif name == "ball":
            sp.add_argument("--dim-a", type=int, default=2)
        elif name in ("witness-bounds", "sample-detect"):
            sp.add_argument("--k", type=int, nargs="+")
            if name == "witness-bounds":
                sp.add_argument("--m", type=int, default=1)
        elif name == "cache":
            sp.add_argument("action", choices=["build", "verify", "purge"])
    return p


_COMMON = {"subcommand", "qubits", "input", "output", "format", "tolerance", "seed", "trials",
           "cache_dir", "two_copies", "mode"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns)
    return RunConfig(**{k: d[k] for k in _COMMON}, options={k: v for k, v in d.items() if k not in _COMMON})


def main(argv=None) -> int:
    cfg = config_from_args(build_parser().parse_args(argv))
    code, report = run(cfg)
    try:
        text = _csv_text(report) if cfg.format == "csv" and code == EXIT_OK else \
            json.dumps(report, indent=2, default=_json_default)
    except ValidationError as exc:
        report.pop("result", None)
        report["error"] = {"kind": "validation", "message": str(exc)}
        code = report["exit_code"] = EXIT_VALIDATION
        text = json.dumps(report, indent=2, default=_json_default)
    if cfg.output and code == EXIT_OK:
        Path(cfg.output).write_text(text + ("" if text.endswith("\n") else "\n"))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
