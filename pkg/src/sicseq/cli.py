"""Command-line entry point ``sicseq``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import FORMAT_VERSION, __version__
from . import catalog, serialize
from .core import DEFAULT_TOL, pure_density, random_density
from .fuzzy import CONDITION_TOL, AnsatzScheme, check_conditions, check_sic_directly
from .hwsic import decompose_hw, hw_sic_from_fiducial
from .optics import build_apparatus, sample_clicks
from .povm import compose_sequential, is_ic, is_sic, validate_pom
from .tomography import counts_to_frequencies, reconstruct, self_test


class UsageError(Exception):
    pass


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _read_json(path):
    try:
        return serialize.loads(_read(path))
    except serialize.FormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _emit(text, args):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_pom(source, gamma):
    if source in catalog.BUILTIN_NAMES:
        return catalog.catalog_pom(catalog.builtin_dim(source), gamma)
    try:
        return serialize.pom_from_json(_read_json(source))
    except (serialize.FormatError, ValueError) as exc:
        raise UsageError(f"{source}: {exc}") from exc


def _load_scheme(source, gamma, ansatz=False):
    if source in catalog.BUILTIN_NAMES:
        d = catalog.builtin_dim(source)
        if ansatz:
            try:
                return catalog.catalog_ansatz(d, gamma)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
        return catalog.catalog_scheme(d, gamma)
    try:
        return serialize.scheme_from_json(_read_json(source))
    except (serialize.FormatError, ValueError) as exc:
        raise UsageError(f"{source}: {exc}") from exc


def _load_state(path, d):
    if path is None:
        return np.eye(d, dtype=complex) / d
    obj = _read_json(path)
    try:
        if "entries" in obj and len(obj["entries"]) == int(obj["dim"]):
            rho = pure_density(serialize.ket_from_json(obj))
        else:
            rho = serialize.operator_from_json(obj)
    except (serialize.FormatError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from exc
    if rho.shape != (d, d):
        raise UsageError(f"{path}: state has dimension {rho.shape[0]}, expected {d}")
    return rho


# --- subcommands ------------------------------------------------------------


def cmd_hw(args):
    if args.fiducial:
        try:
            fid = serialize.ket_from_json(_read_json(args.fiducial))
        except serialize.FormatError as exc:
            raise UsageError(str(exc)) from exc
        if args.dim is not None and fid.size != args.dim:
            raise UsageError(f"fiducial has dimension {fid.size}, --dim says {args.dim}")
    else:
        if args.dim is None:
            raise UsageError("hw needs --dim or --fiducial")
        try:
            fid = catalog.hw_fiducial(args.dim, args.gamma)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    try:
        if args.decompose:
            obj = serialize.scheme_to_json(decompose_hw(fid, args.tol))
        else:
            obj = serialize.pom_to_json(hw_sic_from_fiducial(fid, args.tol))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(serialize.dumps(obj), args)
    return 0


def cmd_catalog(args):
    d = args.dim
    try:
        if args.what == "pom":
            obj = serialize.pom_to_json(catalog.catalog_pom(d, args.gamma))
        elif args.what == "scheme":
            obj = serialize.scheme_to_json(catalog.catalog_scheme(d, args.gamma))
        elif args.what == "ansatz":
            obj = serialize.scheme_to_json(catalog.catalog_ansatz(d, args.gamma))
        elif args.what == "fiducial":
            obj = serialize.ket_to_json(catalog.hw_fiducial(d, args.gamma))
        else:
            mubs = catalog.catalog_mubs(d)
            obj = {"dim": d, "bases": [[serialize.ket_to_json(k) for k in b.kets] for b in mubs.bases]}
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(serialize.dumps(obj), args)
    return 0


def cmd_fuzzy_check(args):
    scheme = _load_scheme(args.scheme, args.gamma, ansatz=True)
    if not isinstance(scheme, AnsatzScheme):
        raise UsageError("fuzzy-check needs an ansatz scheme (with 'lambda' and 'bases')")
    report = check_conditions(scheme, args.tol)
    direct = check_sic_directly(scheme)
    lines = [f"{'condition':<10} {'verdict':<7} worst deviation"]
    for name, ok, dev in report.rows():
        lines.append(f"{name:<10} {'pass' if ok else 'FAIL':<7} {dev:.3e}")
    lines.append(f"{'overall':<10} {'pass' if report.ok else 'FAIL':<7} (cross form: {report.cross_form})")
    lines.append(f"{'direct':<10} {'pass' if direct else 'FAIL':<7} is_sic on the composed POM")
    for note in report.notes:
        lines.append(f"note: {note}")
    _emit("\n".join(lines) + "\n", args)
    return 0 if report.ok and direct else 1


def cmd_verify(args):
    pom = _load_pom(args.pom, args.gamma)
    check = validate_pom(pom, args.tol)
    sic = is_sic(pom, args.tol) if check.ok else None
    ic = is_ic(pom, args.tol) if check.ok else False
    out = {
        "dim": pom.dim,
        "outcomes": len(pom),
        "valid": bool(check.ok),
        "worst_eigenvalue": check.worst_eigenvalue,
        "completeness_deviation": check.completeness_deviation,
        "ic": bool(ic),
        "sic": bool(sic.ok) if sic is not None else False,
    }
    if sic is not None:
        out.update(
            sic_self_deviation=sic.self_deviation,
            sic_pair_deviation=sic.pair_deviation,
            sic_max_second_eigenvalue=sic.max_second_eigenvalue,
        )
    _emit(json.dumps(out, indent=1, default=str) + "\n", args)
    required = {"valid": out["valid"], "ic": out["valid"] and out["ic"], "sic": out["valid"] and out["sic"]}
    return 0 if required[args.expect] else 1


def cmd_optics(args):
    scheme = _load_scheme(args.scheme, args.gamma)
    if isinstance(scheme, AnsatzScheme):
        scheme = scheme.sequential()
    try:
        app = build_apparatus(scheme, args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rho = _load_state(args.state, scheme.dim)
    if args.circuit_out:
        circuits = {
            "stage1": serialize.circuit_to_json(app.stage1),
            "stage2": [serialize.circuit_to_json(c) for c in app.stage2],
        }
        with open(args.circuit_out, "w") as fh:
            fh.write(serialize.dumps(circuits))
    try:
        if args.shots:
            counts = sample_clicks(app, rho, args.shots, args.seed)
            text = serialize.table_to_csv(app.labels, counts, "count")
        else:
            text = serialize.table_to_csv(app.labels, app.distribution(rho), "probability")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(text, args)
    return 0


def cmd_tomography(args):
    if args.self_test:
        if args.dim is None:
            raise UsageError("--self-test needs --dim")
        try:
            pom = catalog.catalog_pom(args.dim, args.gamma)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        rng = np.random.default_rng(args.seed)
        states = [random_density(args.dim, rng) for _ in range(args.states)]
        exact = self_test(pom, states)
        out = {"dim": args.dim, "states": args.states, "exact_max_trace_distance": float(exact.max())}
        ok = bool(exact.max() < 1e-8)
        if args.shots:
            sampled = self_test(pom, states, rng, args.shots)
            out.update(shots=args.shots, sampled_median_trace_distance=float(np.median(sampled)))
        out["pass"] = ok
        _emit(json.dumps(out, indent=1) + "\n", args)
        return 0 if ok else 1

    if not args.counts or bool(args.pom) == bool(args.scheme):
        raise UsageError("tomography needs --counts and one of --pom / --scheme (or --self-test)")
    if args.scheme:
        scheme = _load_scheme(args.scheme, args.gamma)
        if isinstance(scheme, AnsatzScheme):
            scheme = scheme.sequential()
        pom = compose_sequential(scheme)
    else:
        pom = _load_pom(args.pom, args.gamma)
    try:
        labels, values = serialize.csv_to_table(_read(args.counts))
    except serialize.FormatError as exc:
        raise UsageError(f"{args.counts}: {exc}") from exc
    index = {lab: i for i, lab in enumerate(pom.labels)}
    if sorted(map(str, labels)) != sorted(map(str, pom.labels)):
        raise UsageError("count labels do not match the POM outcome labels")
    ordered = np.zeros(len(pom))
    for lab, v in zip(labels, values):
        ordered[index[lab]] = v
    try:
        report = reconstruct(counts_to_frequencies(ordered), pom, project_psd=args.project_psd)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = {
        "reconstructed": serialize.operator_to_json(report.reconstructed),
        "residual_norm": report.residual_norm,
        "min_eigenvalue": report.min_eigenvalue,
        "psd_projected": report.psd_projected,
    }
    if args.truth:
        truth = _load_state(args.truth, pom.dim)
        report.compare(truth)
        out.update(trace_distance=report.trace_distance, fidelity=report.fidelity)
    _emit(serialize.dumps(out), args)
    return 0


# --- parser ------------------------------------------------------------------


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive, help="absolute tolerance (env SICSEQ_TOL)")
    common.add_argument("--gamma", type=float, default=0.0, help="qutrit family parameter in [0, pi/6]")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="sicseq", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"sicseq {__version__} (format {FORMAT_VERSION})")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("hw", parents=[common], help="HW-covariant POM from a fiducial")
    s.add_argument("--dim", type=int)
    s.add_argument("--fiducial", help="ket JSON; defaults to the catalog fiducial for --dim")
    s.add_argument("--decompose", action="store_true", help="emit the two-step scheme instead")
    s.set_defaults(func=cmd_hw)

    s = sub.add_parser("catalog", parents=[common], help="emit a catalog construction")
    s.add_argument("--dim", type=int, choices=(2, 3, 4, 8), required=True)
    s.add_argument("--what", choices=("pom", "scheme", "mub", "ansatz", "fiducial"), default="pom")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("fuzzy-check", parents=[common], help="check the fuzzy-ansatz SIC conditions")
    s.add_argument("--scheme", required=True, help="ansatz JSON or tetrahedron|qutrit-family|dim4")
    s.set_defaults(func=cmd_fuzzy_check)

    s = sub.add_parser("verify", parents=[common], help="validate a POM and test IC / SIC")
    s.add_argument("--pom", required=True, help="POM JSON or a built-in name")
    s.add_argument("--expect", choices=("valid", "ic", "sic"), default="valid")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("optics", parents=[common], help="simulate the optical apparatus")
    s.add_argument("--scheme", required=True, help="scheme JSON or a built-in name")
    s.add_argument("--state", help="ket or density-matrix JSON; default maximally mixed")
    s.add_argument("--shots", type=_nonneg_int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--circuit-out", help="also write the circuits as JSON")
    s.set_defaults(func=cmd_optics)

    s = sub.add_parser("tomography", parents=[common], help="linear-inversion state reconstruction")
    s.add_argument("--pom", help="POM JSON or a built-in name")
    s.add_argument("--scheme", help="scheme JSON or built-in name; counts labelled n,m as from optics")
    s.add_argument("--counts", help="CSV with header label,count")
    s.add_argument("--truth", help="state JSON to compare against")
    s.add_argument("--project-psd", action="store_true")
    s.add_argument("--self-test", action="store_true")
    s.add_argument("--dim", type=int)
    s.add_argument("--states", type=int, default=50)
    s.add_argument("--shots", type=_nonneg_int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_tomography)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.tol is None:
        if "SICSEQ_TOL" in os.environ:
            args.tol = DEFAULT_TOL
        else:
            args.tol = CONDITION_TOL if args.command == "fuzzy-check" else DEFAULT_TOL
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sicseq {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
