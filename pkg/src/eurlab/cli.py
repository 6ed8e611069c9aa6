"""Command-line interface: ``eurlab check | scan | bound | minimize | verify-csv``.

Exit status is 0 on success, 1 on usage or configuration errors and 2 when
``--fail-on-detect`` is given and some criterion is violated.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .bounds import certify_tightness, multi_observable_bound, scenario_bounds
from .criteria import CRITERION_IDS, NAMED_CRITERIA, evaluate
from .errors import DomainError
from .observables import ObservableScenario, bases_from_names, mub_set
from .scan import SCAN_IDS, ScanConfig, verify_csv, write_scan
from .states import StateFamilySpec, make_state

EXIT_OK, EXIT_USAGE, EXIT_DETECTED = 0, 1, 2

FAMILY_ALIASES = {
    "bell": "bell_phi_plus",
    "eps": "eps_family",
    "qudit": "qudit_schmidt",
    "ghz": "ghz",
    "w": "w",
    "general": "three_qubit_general",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bool(text) -> bool:
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _split(text) -> list[str]:
    if text is None:
        return []
    if isinstance(text, (list, tuple)):
        return list(text)
    return [t.strip() for t in str(text).split(",") if t.strip()]


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment. Keys use flag spelling."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def merged_options(args: argparse.Namespace, casts: dict) -> dict:
    """Config-file values overlaid by explicitly given flags."""
    opts = read_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(opts) - set(casts)
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    for key, cast in casts.items():
        if key in opts:
            try:
                opts[key] = cast(opts[key])
            except ValueError:
                raise UsageError(f"config key {key}: cannot parse {opts[key]!r}") from None
    for key, value in vars(args).items():
        if value is not None and key in casts:
            opts[key] = value
    return opts


# ---------------------------------------------------------------------------
# check


_STATE_KEYS = {
    "family": str,
    "eps": float,
    "lambdas": str,
    "l0": float,
    "l1": float,
    "l2": float,
    "l3": float,
    "l4": float,
    "phi": float,
}


def state_spec_from_options(opts: dict) -> StateFamilySpec:
    fam = opts.get("family")
    if fam is None:
        raise UsageError("missing --family")
    family = FAMILY_ALIASES.get(fam, fam)
    params = {k: opts[k] for k in ("eps", "l0", "l1", "l2", "l3", "l4", "phi") if k in opts}
    if family == "qudit_schmidt":
        if "lambdas" not in opts:
            raise UsageError("family qudit needs --lambdas")
        try:
            lam = np.array([float(x) for x in _split(opts["lambdas"])])
        except ValueError:
            raise UsageError(f"--lambdas: cannot parse {opts['lambdas']!r}") from None
        if lam.size < 2 or np.any(lam < 0) or not np.any(lam > 0):
            raise UsageError("--lambdas needs at least two nonnegative weights, not all zero")
        params["lambdas"] = list(lam / np.linalg.norm(lam))
    if family == "three_qubit_general":
        lam = np.array([params.get(f"l{i}", 0.0) for i in range(5)])
        if np.any(lam < 0) or not np.any(lam > 0):
            raise UsageError("--l0..--l4 must be nonnegative and not all zero")
        lam = lam / np.linalg.norm(lam)
        params.update({f"l{i}": float(lam[i]) for i in range(5)})
    return StateFamilySpec(family, params)


def _resolve_criterion(name: str, default_bases: list[str]) -> tuple[str, list[str]]:
    if name in NAMED_CRITERIA:
        cid, names = NAMED_CRITERIA[name]
        return cid, list(names)
    if name in CRITERION_IDS:
        return name, default_bases
    raise UsageError(f"unknown criterion {name!r}; choose from {', '.join(CRITERION_IDS + tuple(NAMED_CRITERIA))}")


def format_report(name: str, rep) -> str:
    label = name if name == rep.criterion_id else f"{name} ({rep.criterion_id})"
    return (
        f"{label}: lhs {rep.lhs:.9f} threshold {rep.threshold:.9f} "
        f"{rep.verdict.upper()} margin {rep.margin:+.9f}"
    )


def run_check(args) -> int:
    opts = merged_options(args, _STATE_KEYS | {"criteria": str, "bases": str, "fail_on_detect": _bool, "json": _bool})
    spec = state_spec_from_options(opts)
    state = make_state(spec)
    d = state.dims[0]
    default_bases = _split(opts.get("bases")) or (["Z", "X", "Y"] if d == 2 else ["comp", "fourier"])
    names = _split(opts.get("criteria"))
    if not names:
        raise UsageError("missing --criteria")
    reports = []
    for name in names:
        cid, basis_names = _resolve_criterion(name, default_bases)
        scenario = ObservableScenario.uniform(bases_from_names(d, basis_names), len(state.dims))
        reports.append((name, evaluate(cid, state, scenario)))
    if opts.get("json"):
        print(json.dumps([{"name": n} | r.as_dict() for n, r in reports], indent=2))
    else:
        for name, rep in reports:
            print(format_report(name, rep))
    if opts.get("fail_on_detect") and any(r.violated for _, r in reports):
        return EXIT_DETECTED
    return EXIT_OK


# ---------------------------------------------------------------------------
# scan


_SCAN_KEYS = {
    "scan": str,
    "steps": int,
    "criteria": str,
    "bases": str,
    "output": str,
    "seed": int,
    "min": float,
    "max": float,
    "family": str,
    "param": str,
    "threads": int,
} | {k: float for k in ("eps", "l0", "l1", "l2", "l3", "l4", "phi")}


def scan_config_from_options(opts: dict) -> ScanConfig:
    scan_id = opts.get("scan")
    if scan_id is None:
        raise UsageError("missing --scan")
    family = opts.get("family")
    if family is not None:
        family = FAMILY_ALIASES.get(family, family)
    fixed = {k: opts[k] for k in ("eps", "l0", "l1", "l2", "l3", "l4", "phi") if k in opts}
    config = ScanConfig(
        scan_id=scan_id,
        steps=opts.get("steps", 99),
        criteria=tuple(_split(opts.get("criteria"))),
        bases=tuple(_split(opts.get("bases")) or ("Z", "X", "Y")),
        output_path=opts.get("output"),
        seed=opts.get("seed", 0),
        family=family,
        param=opts.get("param"),
        fixed=fixed,
    )
    if "min" in opts or "max" in opts:
        lo, hi = opts.get("min", 0.0), opts.get("max", 1.0)
        config = replace(config, ranges={p: (lo, hi) for p in config.parameters})
    return config


def run_scan_cmd(args) -> int:
    opts = merged_options(args, _SCAN_KEYS)
    config = scan_config_from_options(opts)
    try:
        text = write_scan(config, opts.get("threads"))
    except OSError as exc:
        raise UsageError(f"cannot write {config.output_path}: {exc}") from None
    if not config.output_path:
        sys.stdout.write(text)
    else:
        n_rows = text.count("\r\n") - 1
        print(f"wrote {n_rows} rows to {config.output_path}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bound / minimize


def _bases_from_args(opts: dict):
    d = opts.get("d")
    if d is None:
        raise UsageError("missing --d")
    if opts.get("mubs") is not None and opts.get("bases"):
        raise UsageError("give either --mubs or --bases, not both")
    if opts.get("mubs") is not None:
        return d, mub_set(d, opts["mubs"])
    names = _split(opts.get("bases"))
    if not names:
        raise UsageError("missing --mubs or --bases")
    return d, bases_from_names(d, names)


def run_bound(args) -> int:
    opts = merged_options(args, {"d": int, "mubs": int, "bases": str, "sites": int})
    _, bases = _bases_from_args(opts)
    print(multi_observable_bound(bases))
    sites = opts.get("sites") or 1
    if sites >= 2:
        sb = scenario_bounds([bases] * sites)
        print(
            f"F1 {sb.F1:.9f} {'tight' if sb.F1_tight else 'loose'} "
            f"F2 {sb.F2:.9f} {'tight' if sb.F2_tight else 'loose'}"
        )
    return EXIT_OK


def run_minimize(args) -> int:
    opts = merged_options(
        args, {"d": int, "mubs": int, "bases": str, "sites": int, "restarts": int, "seed": int}
    )
    _, bases = _bases_from_args(opts)
    sites = opts.get("sites") or 1
    if sites == 1:
        reference = multi_observable_bound(bases)
        ref_value, ref_text = reference.value, str(reference)
    elif sites == 2:
        sb = scenario_bounds([bases, bases])
        ref_value = sb.F2
        ref_text = f"{sb.F2:.9f} {'tight' if sb.F2_tight else 'loose'} pair_F2"
    else:
        ref_value, ref_text = float("nan"), "none"
    cert = certify_tightness([bases] * sites, ref_value, opts.get("restarts", 64), opts.get("seed", 0))
    print(f"min_found {cert.min_found:.9f}")
    print(f"bound {ref_text}")
    print(f"gap {cert.gap:+.9f}")
    print(f"iteration_cap_hit {str(cert.hit_iteration_cap).lower()}")
    amps = " ".join(f"{a.real:+.6f}{a.imag:+.6f}j" for a in cert.argmin.amplitudes)
    print(f"argmin {amps}")
    return EXIT_OK


def run_verify(args) -> int:
    try:
        with open(args.path, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc}") from None
    problems = verify_csv(text)
    for p in problems:
        print(p)
    if problems:
        return EXIT_USAGE
    print("ok")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eurlab", description="Entropic uncertainty bounds and entanglement criteria.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="evaluate criteria on one state")
    p.add_argument("--config")
    p.add_argument("--family", choices=sorted(FAMILY_ALIASES) + sorted(FAMILY_ALIASES.values()))
    p.add_argument("--eps", type=float)
    p.add_argument("--lambdas", help="comma-separated Schmidt weights (renormalized)")
    for k in ("l0", "l1", "l2", "l3", "l4", "phi"):
        p.add_argument(f"--{k}", type=float)
    p.add_argument("--criteria", help="comma-separated criterion ids or names")
    p.add_argument("--bases", help="comma-separated basis names for prop*/steer_* ids")
    p.add_argument("--fail-on-detect", action="store_true", default=None)
    p.add_argument("--json", action="store_true", default=None)
    p.set_defaults(func=run_check)

    p = sub.add_parser("scan", help="grid scan over a state family, written as CSV")
    p.add_argument("--config")
    p.add_argument("--scan", choices=SCAN_IDS)
    p.add_argument("--steps", type=int)
    p.add_argument("--criteria")
    p.add_argument("--bases")
    p.add_argument("--output", help="CSV path (stdout when omitted)")
    p.add_argument("--seed", type=int)
    p.add_argument("--min", type=float)
    p.add_argument("--max", type=float)
    p.add_argument("--family")
    p.add_argument("--param")
    for k in ("eps", "l0", "l1", "l2", "l3", "l4", "phi"):
        p.add_argument(f"--{k}", type=float, help=argparse.SUPPRESS)
    p.add_argument("--threads", type=int, help="worker processes (default: EURLAB_THREADS or CPU count)")
    p.set_defaults(func=run_scan_cmd)

    for name, func, help_text in (
        ("bound", run_bound, "print the best known entropy-sum bound"),
        ("minimize", run_minimize, "numerically minimize the entropy sum"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config")
        p.add_argument("--d", type=int)
        p.add_argument("--mubs", type=int)
        p.add_argument("--bases")
        p.add_argument("--sites", type=int)
        if name == "minimize":
            p.add_argument("--restarts", type=int)
            p.add_argument("--seed", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("verify-csv", help="recompute every verdict in a scan CSV")
    p.add_argument("path")
    p.set_defaults(func=run_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"eurlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
