"""Command-line front end.

Subcommands: eval, sweep, construct, verify, center, hard-instance,
certify, oracle. Exit codes: 0 success, 2 parse error, 3 semantic or
precondition error, 4 certification/verification failure. Every randomized
run writes a run record next to its primary output so it can be reproduced
bit for bit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import analysis, fileio, permutations, thresholds
from .distributions import AugThreshold
from .engine import Instance, eval_family, monte_carlo_eval
from .fileio import FileFormatError, fmt
from .permutations import PermutationFamily

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SEMANTIC = 3
EXIT_CERT = 4


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_instance(path: str) -> Instance:
    return fileio.parse_instance(fileio.load_json(path))


def _load_family(path: str) -> PermutationFamily:
    return fileio.parse_family(fileio.load_json(path))


def _resolve_threshold(spec: str, inst: Instance) -> AugThreshold:
    """golden | e | THETA | THETA:TIE | max_survival:P | product_survival:Q"""
    if spec == "golden":
        return thresholds.golden_threshold(inst)
    if spec == "e":
        return thresholds.e_threshold(inst)
    if ":" in spec:
        head, _, tail = spec.partition(":")
        if head in ("max_survival", "max-survival"):
            return thresholds.threshold_for(inst, thresholds.max_survival(float(tail)))
        if head in ("product_survival", "product-survival"):
            return thresholds.threshold_for(inst, thresholds.product_survival(float(tail)))
        return AugThreshold(float(head), float(tail))
    return AugThreshold(float(spec), 0.0)


def _write_record(args, out_path: str | None, inputs: list[str], seed, started: float):
    if out_path is None:
        return
    record = {
        "command": " ".join(args._argv),
        "inputs": {p: fileio.sha256_file(p) for p in inputs},
        "seed": seed,
        "outputs": [out_path],
        "wall_time_s": time.monotonic() - started,
    }
    fileio.save_json(out_path + ".run.json", record)


def _emit(obj, out_path: str | None):
    if out_path:
        fileio.save_json(out_path, obj)
    else:
        fileio.dump_json(obj, sys.stdout)


# -- subcommand handlers -----------------------------------------------------------


def _cmd_eval(args) -> int:
    started = time.monotonic()
    inst = _load_instance(args.instance)
    fam = _load_family(args.family)
    t = _resolve_threshold(args.threshold, inst)
    report = eval_family(inst, fam, t)
    _emit(fileio.report_to_obj(report, t.theta, t.tie), args.out)
    if args.plot:
        from .plotting import plot_report

        plot_report(report, args.plot)
    print(f"gambler {fmt(report.gambler)} prophet {fmt(report.prophet)} ratio {fmt(report.ratio)}")
    _write_record(args, args.out, [args.instance, args.family], None, started)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    started = time.monotonic()
    inst = _load_instance(args.instance)
    fam = _load_family(args.family)
    result = thresholds.ratio_sweep(inst, fam, points=args.grid, tie_fractions=args.tie_fractions)
    if args.out:
        with open(args.out, "w") as f:
            fileio.sweep_to_csv(result.rows, f)
    else:
        fileio.sweep_to_csv(result.rows, sys.stdout)
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(result, args.plot)
    b = result.best
    print(f"best theta {fmt(b.theta)} tie {fmt(b.tie)} ratio {fmt(b.ratio)}")
    _write_record(args, args.out, [args.instance, args.family], None, started)
    return EXIT_OK


def _cmd_construct(args) -> int:
    started = time.monotonic()
    inputs = []
    if args.kind == "affine":
        fam = permutations.affine_family(args.n)
        check = permutations.verify_pairwise_independent(fam)
        summary = {"pairwise_independent": check.passed, "worst_deviation": check.worst_deviation}
        if not check.passed:
            raise _CliError(EXIT_CERT, "affine family failed exact pairwise verification")
    elif args.kind == "forward_reverse":
        fam = permutations.forward_reverse_family(args.n)
        summary = {}
    elif args.kind == "padded":
        if not args.parent:
            raise _CliError(EXIT_SEMANTIC, "padded construction needs --parent")
        inputs.append(args.parent)
        parent = _load_family(args.parent)
        fam = permutations.restrict_family(parent, args.n)
        summary = {"parent_size": parent.size, "size": fam.size}
    elif args.kind == "sampled":
        if args.epsilon is None or args.delta is None:
            raise _CliError(EXIT_SEMANTIC, "sampled construction needs --epsilon and --delta")
        fam = None
        attempts = []
        for attempt in range(args.attempts):
            seed = args.seed + attempt
            cand = permutations.sample_family(args.n, args.epsilon, args.delta, seed)
            check = permutations.verify_almost_pi(cand, args.epsilon, args.delta)
            attempts.append({"seed": seed, "max_tv": check.max_tv, "passed": check.passed})
            if check.passed:
                fam = cand
                break
        if fam is None:
            raise _CliError(
                EXIT_CERT,
                f"sampled family failed almost-pairwise verification in {args.attempts} attempts",
            )
        prov = dict(fam.provenance)
        prov["attempts"] = attempts
        fam = PermutationFamily(fam.perms, prov)
        summary = {"max_tv": attempts[-1]["max_tv"], "attempts": len(attempts)}
    else:  # pragma: no cover - argparse choices guard this
        raise _CliError(EXIT_SEMANTIC, f"unknown construction kind {args.kind}")
    _emit(fileio.family_to_obj(fam), args.out)
    print(f"constructed {args.kind} family: n={fam.n} size={fam.size} {json.dumps(summary)}")
    _write_record(args, args.out, inputs, getattr(args, "seed", None), started)
    return EXIT_OK


def _cmd_verify(args) -> int:
    fam = _load_family(args.family)
    if args.mode == "pairwise":
        check = permutations.verify_pairwise_independent(fam)
        print(
            f"pairwise_independent {check.passed} expected_hits {fmt(check.expected_hits)} "
            f"worst_pair {check.worst_pair} deviation {fmt(check.worst_deviation)}"
        )
        return EXIT_OK if check.passed else EXIT_CERT
    if args.epsilon is None or args.delta is None:
        raise _CliError(EXIT_SEMANTIC, "almost mode needs --epsilon and --delta")
    check = permutations.verify_almost_pi(fam, args.epsilon, args.delta)
    print(
        f"almost_pairwise {check.passed} max_tv {fmt(check.max_tv)} "
        f"worst_pair {check.worst_pair} delta {fmt(args.delta)}"
    )
    return EXIT_OK if check.passed else EXIT_CERT


def _cmd_center(args) -> int:
    started = time.monotonic()
    fam = _load_family(args.family)
    if args.index is not None:
        cert = analysis.centeredness_lp(fam, args.index)
        _emit(fileio.certificate_to_obj(cert), args.out)
        print(f"j {cert.j} epsilon {fmt(cert.epsilon)} lp_gap {fmt(cert.lp_gap)}")
    elif args.all:
        certs = [analysis.centeredness_lp(fam, j) for j in range(1, fam.n + 1)]
        best = min(certs, key=lambda c: c.epsilon)
        obj = {
            "best_j": best.j,
            "certificates": [fileio.certificate_to_obj(c) for c in certs],
        }
        _emit(obj, args.out)
        print(f"best j {best.j} epsilon {fmt(best.epsilon)}")
    else:
        j, cert = analysis.most_centered_index(fam)
        _emit(fileio.certificate_to_obj(cert), args.out)
        print(f"best j {j} epsilon {fmt(cert.epsilon)} lp_gap {fmt(cert.lp_gap)}")
    _write_record(args, args.out, [args.family], None, started)
    return EXIT_OK


def _cmd_hard_instance(args) -> int:
    started = time.monotonic()
    inputs = []
    if args.kind == "golden":
        inst = analysis.golden_hard_instance(args.delta)
    elif args.kind == "iid":
        if args.n is None or args.H is None:
            raise _CliError(EXIT_SEMANTIC, "iid hard instance needs --n and --H")
        inst = analysis.iid_hard_instance(args.n, args.H)
    else:  # centered
        if not args.family:
            raise _CliError(EXIT_SEMANTIC, "centered hard instance needs --family")
        inputs.append(args.family)
        fam = _load_family(args.family)
        if args.index is not None:
            j = args.index
            cert = analysis.centeredness_lp(fam, j)
        else:
            j, cert = analysis.most_centered_index(fam)
        inst = analysis.hard_instance_from_center(fam, j, cert, args.delta)
        print(f"embedded spike at j {j} (epsilon {fmt(cert.epsilon)})")
    _emit(fileio.instance_to_obj(inst), args.out)
    _write_record(args, args.out, inputs, None, started)
    return EXIT_OK


def _cmd_certify(args) -> int:
    started = time.monotonic()
    inst = _load_instance(args.instance)
    fam = _load_family(args.family)
    cert = analysis.certify_tpr_lower(inst, fam, args.mode)
    obj = fileio.certification_to_obj(cert, cert.threshold.theta, cert.threshold.tie)
    _emit(obj, args.out)
    print(
        f"mode {cert.mode} ratio {fmt(cert.report.ratio)} bound {fmt(cert.bound)} "
        f"passed {cert.passed}"
    )
    _write_record(args, args.out, [args.instance, args.family], None, started)
    return EXIT_OK if cert.passed else EXIT_CERT


def _cmd_oracle(args) -> int:
    started = time.monotonic()
    inst = _load_instance(args.instance)
    fam = _load_family(args.family)
    t = _resolve_threshold(args.threshold, inst)
    exact = eval_family(inst, fam, t)
    mc = monte_carlo_eval(inst, fam, t, args.samples, args.seed)
    g_err = abs(mc.gambler - exact.gambler)
    p_err = abs(mc.prophet - exact.prophet)
    g_ok = bool(g_err <= args.sigmas * max(mc.gambler_se, 1e-15))
    p_ok = bool(p_err <= args.sigmas * max(mc.prophet_se, 1e-15))
    obj = {
        "exact": fileio.report_to_obj(exact, t.theta, t.tie),
        "monte_carlo": fileio.mc_to_obj(mc),
        "gambler_within": g_ok,
        "prophet_within": p_ok,
        "sigmas": args.sigmas,
    }
    _emit(obj, args.out)
    print(
        f"gambler exact {fmt(exact.gambler)} mc {fmt(mc.gambler)} +- {fmt(mc.gambler_se)} "
        f"ok {g_ok}; prophet exact {fmt(exact.prophet)} mc {fmt(mc.prophet)} "
        f"+- {fmt(mc.prophet_se)} ok {p_ok}"
    )
    _write_record(args, args.out, [args.instance, args.family], args.seed, started)
    return EXIT_OK if g_ok and p_ok else EXIT_CERT


# -- parser -------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="copi",
        description="Threshold stopping rules over permutation families: "
        "evaluation, construction, verification, certification.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a family-averaged threshold rule")
    p.add_argument("instance")
    p.add_argument("family")
    p.add_argument("--threshold", default="golden")
    p.add_argument("--out")
    p.add_argument("--plot")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="ratio curve across a threshold grid")
    p.add_argument("instance")
    p.add_argument("family")
    p.add_argument("--grid", type=int, default=2000)
    p.add_argument("--tie-fractions", type=int, default=16)
    p.add_argument("--out")
    p.add_argument("--plot")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("construct", help="build a permutation family file")
    p.add_argument("kind", choices=["affine", "forward_reverse", "sampled", "padded"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attempts", type=int, default=5)
    p.add_argument("--parent")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("verify", help="check (almost) pairwise independence")
    p.add_argument("family")
    p.add_argument("--mode", choices=["pairwise", "almost"], default="pairwise")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("center", help="centeredness LP certificates")
    p.add_argument("family")
    p.add_argument("--index", type=int)
    p.add_argument("--all", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_center)

    p = sub.add_parser("hard-instance", help="generate an adversarial instance")
    p.add_argument("kind", choices=["golden", "iid", "centered"])
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--n", type=int)
    p.add_argument("--H", type=float)
    p.add_argument("--family")
    p.add_argument("--index", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_hard_instance)

    p = sub.add_parser("certify", help="certify a guaranteed ratio lower bound")
    p.add_argument("instance")
    p.add_argument("family")
    p.add_argument("--mode", choices=["golden", "e"], required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("oracle", help="Monte Carlo cross-check of the exact evaluator")
    p.add_argument("instance")
    p.add_argument("family")
    p.add_argument("--threshold", default="golden")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigmas", type=float, default=4.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_oracle)

    return top


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    args._argv = ["copi"] + argv
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_PARSE
    except FileFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"missing file: {exc.filename}", file=sys.stderr)
        return EXIT_SEMANTIC
    except _CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
