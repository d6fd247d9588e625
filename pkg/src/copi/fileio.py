"""JSON and CSV formats for instances, families, certificates, and reports.

All files are plain JSON with sorted keys and floats rounded to 12
significant digits, so serializing the same object twice is byte-identical
and diffs stay readable. Sweep curves are CSV with a fixed column order.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any, IO

from .analysis import CenterednessCertificate, TPRCertification
from .distributions import ExpCapped, TwoLevel, Uniform, ValueDistribution
from .engine import EvaluationReport, Instance, MonteCarloResult
from .permutations import Permutation, PermutationFamily
from .thresholds import SweepPoint


class FileFormatError(ValueError):
    """Malformed content in an otherwise parseable file."""


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _round12(obj):
    if isinstance(obj, float):
        if math.isfinite(obj):
            return float(fmt(obj))
        return obj
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def dump_json(obj, f: IO[str]):
    json.dump(_round12(obj), f, sort_keys=True, indent=2)
    f.write("\n")


def save_json(path: str, obj):
    with open(path, "w") as f:
        dump_json(obj, f)


def load_json(path: str):
    with open(path) as f:
        return json.load(f)


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            h.update(block)
    return h.hexdigest()


# -- distributions ---------------------------------------------------------------


def _parse_component(rec, atoms: list, segments: list):
    if not isinstance(rec, dict) or "type" not in rec:
        raise FileFormatError(f"distribution record must be a tagged object, got {rec!r}")
    kind = rec["type"]
    try:
        if kind == "atoms":
            atoms.extend((float(x), float(p)) for x, p in rec["points"])
        elif kind == "uniform":
            segments.append(Uniform(float(rec["a"]), float(rec["b"]), float(rec.get("w", 1.0))))
        elif kind == "exp_capped":
            segments.append(ExpCapped(float(rec["rate"]), float(rec.get("w", 1.0))))
        elif kind == "two_level":
            segments.append(TwoLevel(float(rec["H"]), int(rec["n"])))
        elif kind == "mixture":
            for part in rec["parts"]:
                _parse_component(part, atoms, segments)
        else:
            raise FileFormatError(f"unknown distribution type {kind!r}")
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"bad {kind!r} record {rec!r}: {exc}") from exc


def parse_distribution(obj) -> ValueDistribution:
    atoms: list = []
    segments: list = []
    if isinstance(obj, list):
        for rec in obj:
            _parse_component(rec, atoms, segments)
    else:
        _parse_component(obj, atoms, segments)
    try:
        return ValueDistribution(tuple(atoms), tuple(segments))
    except ValueError as exc:
        raise FileFormatError(str(exc)) from exc


def distribution_to_obj(d: ValueDistribution):
    parts: list[dict[str, Any]] = []
    if d.atoms:
        parts.append({"type": "atoms", "points": [[x, p] for x, p in d.atoms]})
    for seg in d.segments:
        if isinstance(seg, Uniform):
            parts.append({"type": "uniform", "a": seg.a, "b": seg.b, "w": seg.w})
        elif isinstance(seg, ExpCapped):
            parts.append({"type": "exp_capped", "rate": seg.rate, "w": seg.w})
        else:
            parts.append({"type": "two_level", "H": seg.H, "n": seg.n})
    if len(parts) == 1:
        return parts[0]
    return {"type": "mixture", "parts": parts}


# -- instances --------------------------------------------------------------------


def parse_instance(obj) -> Instance:
    if not isinstance(obj, dict) or "dists" not in obj:
        raise FileFormatError("instance file must be an object with a 'dists' list")
    dists = tuple(parse_distribution(rec) for rec in obj["dists"])
    if "n" in obj and int(obj["n"]) != len(dists):
        raise FileFormatError(f"instance declares n={obj['n']} but has {len(dists)} dists")
    try:
        return Instance(dists)
    except ValueError as exc:
        raise FileFormatError(str(exc)) from exc


def instance_to_obj(inst: Instance):
    return {"n": inst.n, "dists": [distribution_to_obj(d) for d in inst.dists]}


# -- families ---------------------------------------------------------------------


def parse_family(obj) -> PermutationFamily:
    if not isinstance(obj, dict) or "perms" not in obj:
        raise FileFormatError("family file must be an object with a 'perms' list")
    try:
        perms = tuple(Permutation(tuple(int(v) for v in row)) for row in obj["perms"])
        fam = PermutationFamily(perms, dict(obj.get("provenance", {"kind": "explicit"})))
    except (TypeError, ValueError) as exc:
        raise FileFormatError(str(exc)) from exc
    if "n" in obj and int(obj["n"]) != fam.n:
        raise FileFormatError(f"family declares n={obj['n']} but members act on [{fam.n}]")
    return fam


def family_to_obj(fam: PermutationFamily):
    return {
        "n": fam.n,
        "perms": [list(p.map) for p in fam.perms],
        "provenance": dict(fam.provenance),
    }


# -- reports and certificates ------------------------------------------------------


def report_to_obj(report: EvaluationReport, theta: float, tie: float):
    return {
        "gambler": report.gambler,
        "prophet": report.prophet,
        "ratio": report.ratio,
        "p": report.p,
        "q": report.q,
        "theta": theta,
        "tie": tie,
        "q_i": list(report.q_i),
        "c_i": list(report.c_i),
        "a_i": list(report.a_i),
        "b_i": list(report.b_i),
    }


def mc_to_obj(mc: MonteCarloResult):
    return {
        "gambler": mc.gambler,
        "gambler_se": mc.gambler_se,
        "prophet": mc.prophet,
        "prophet_se": mc.prophet_se,
        "samples": mc.samples,
        "seed": mc.seed,
    }


def certificate_to_obj(cert: CenterednessCertificate):
    return {
        "j": cert.j,
        "epsilon": cert.epsilon,
        "p": {str(i): v for i, v in sorted(cert.witness_p.items())},
        "dual_w": list(cert.dual_w),
        "dual_objective": cert.dual_objective,
        "lp_gap": cert.lp_gap,
        "lp_value": cert.lp_value,
        "semantics": "index j is eps-centered for every eps > epsilon (open threshold)",
    }


def certification_to_obj(cert: TPRCertification, theta: float, tie: float):
    obj = report_to_obj(cert.report, theta, tie)
    obj.update({"mode": cert.mode, "bound": cert.bound, "passed": cert.passed})
    return obj


def sweep_to_csv(rows, f: IO[str]):
    f.write("theta,tie,gambler,prophet,ratio\n")
    for r in rows:
        f.write(
            f"{fmt(r.theta)},{fmt(r.tie)},{fmt(r.gambler)},{fmt(r.prophet)},{fmt(r.ratio)}\n"
        )


def parse_sweep_csv(f: IO[str]) -> list[SweepPoint]:
    header = f.readline().strip()
    if header != "theta,tie,gambler,prophet,ratio":
        raise FileFormatError(f"unexpected sweep header {header!r}")
    out = []
    for line in f:
        theta, tie, gambler, prophet, ratio = (float(v) for v in line.strip().split(","))
        out.append(SweepPoint(theta, tie, gambler, prophet, ratio))
    return out
