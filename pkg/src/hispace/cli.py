"""Command-line surface: JSON in, JSON out, exact rationals as "p/q" strings.

Every command writes a result document (with ``schema_version``) to --out when
given, plus a sibling ``.manifest.json`` recording the command, input digests,
version, output digest and wall time.  The result document itself carries no
timing, so identical manifests imply byte-identical outputs.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import metadata
from pathlib import Path

from .families import (AverageTooLarge, MTooShort, admissible, family_member, family_to_json,
                       parse_family, repeated_average)
from .interpolation import (DProductVec, SigmaRegistry, block_source, build_dependent_sequence,
                            diagonal_norm_bounds, dproduct_norm, toy_dependent_params,
                            verify_dependent_estimates)
from .kernel import FinVec, as_fraction, fraction_to_json, index_to_json, vec_from_json, vec_to_dict, vec_to_json
from .treespace import (ExactnessUnavailable, Segment, TreeParams, W0Element, gauge, gauge_violations,
                        incomparable_partition, initial_segments, norming_certificate, segment_vector,
                        split_band, xa_norm)
from .tsirelson.norm import CertLeaf, CertNode, cert_evaluate, cert_from_json, cert_violations, mt_norm
from .tsirelson.params import MTParams
from .verify import SUITES, run_suite

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CLAIM, EXIT_VALIDATION, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class ArgParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; we reserve 2 for validation."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0+local"


def to_jsonable(obj):
    if isinstance(obj, Fraction):
        return fraction_to_json(obj)
    if isinstance(obj, FinVec):
        return vec_to_json(obj)
    if isinstance(obj, (CertLeaf, CertNode, TreeParams, MTParams)):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(index_to_json(k)) if isinstance(k, tuple) else str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    return obj


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), indent=2, sort_keys=True) + "\n"


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass
class RunManifest:
    command: list
    inputs: dict = field(default_factory=dict)  # role -> sha256
    params_digest: str | None = None
    version: str = field(default_factory=tool_version)
    outputs: dict = field(default_factory=dict)  # path -> sha256
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "command": self.command, "inputs": self.inputs,
                "params_digest": self.params_digest, "version": self.version,
                "outputs": self.outputs, "wall_time": round(self.wall_time, 6)}


class Context:
    def __init__(self, args, argv):
        self.args = args
        self.manifest = RunManifest(list(argv))

    def _load(self, path, role):
        if path is None:
            return None
        data = Path(path).read_bytes()
        digest = sha256(data)
        if role == "params":
            self.manifest.params_digest = digest
        else:
            self.manifest.inputs[role] = digest
        try:
            return json.loads(data)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None

    def params(self, required=True):
        raw = self._load(self.args.params, "params")
        if raw is None and required:
            raise UsageError("--params FILE is required")
        return raw

    def input(self, required=True):
        raw = self._load(self.args.inp, "in")
        if raw is None and required:
            raise UsageError("--in FILE is required")
        return raw

    def write(self, path, doc) -> str:
        text = dumps({"schema_version": SCHEMA_VERSION, **doc})
        atomic_write(path, text)
        self.manifest.outputs[str(path)] = sha256(text.encode())
        return text


# -- input helpers ---------------------------------------------------------------------

def _vector(raw, key="vector") -> FinVec:
    if isinstance(raw, dict) and key in raw:
        raw = raw[key]
    return vec_from_json(raw)


def _tree_vector(raw) -> FinVec:
    """Tree vectors: pair lists with dotted node addresses, or a {"0.1": "1/2"} mapping."""
    if isinstance(raw, dict):
        return FinVec({_node(k): as_fraction(v) for k, v in raw.items()})
    return vec_from_json(raw)


def _node(raw) -> tuple:
    if isinstance(raw, (list, tuple)):
        return tuple(int(k) for k in raw)
    if isinstance(raw, int):
        return (raw,)
    return tuple(int(p) for p in str(raw).split(".")) if raw != "" else ()


def _segment(raw) -> Segment:
    if isinstance(raw, dict):
        return Segment(_node(raw.get("lo", "")), _node(raw["hi"]))
    lo, hi = raw
    return Segment(_node(lo), _node(hi))


def _w0(raw, tp: TreeParams) -> W0Element:
    return W0Element(tuple((as_fraction(t[0]), _segment(t[1:] if len(t) == 3 else t[1])) for t in raw), tp)


def _tree_params(raw) -> TreeParams:
    return TreeParams.from_json(raw["tree"] if "tree" in raw else raw)


def _generators(raw, tp: TreeParams) -> list[FinVec]:
    gens = raw.get("generators", "initial_segments")
    if gens == "initial_segments":
        return [segment_vector(s, tp) for s in initial_segments(tp)]
    return [_tree_vector(g) for g in gens]


def _a_value(raw, n: int) -> Fraction:
    a = raw.get("a")
    if a is None:
        return Fraction(1, 2 ** n)
    if isinstance(a, list):
        return as_fraction(a[n - 1])
    return as_fraction(a)


def _a_sequence(raw):
    return lambda n: _a_value(raw, n)


# -- commands -----------------------------------------------------------------------------

def cmd_family(ctx: Context):
    a = ctx.args
    raw = ctx.input(required=False) or {}
    params = ctx.params(required=False) or {}
    fam_text = a.family or raw.get("family") or params.get("family")
    if fam_text is None:
        raise UsageError("give --family or a 'family' key")
    fam = parse_family(fam_text)
    doc = {"command": "family", "family": family_to_json(fam)}
    sets = json.loads(a.sets) if a.sets else raw.get("sets")
    single = json.loads(a.set) if a.set else raw.get("set")
    if single is not None:
        doc["member"] = family_member(single, fam)
        print(json.dumps(doc["member"]))
    if sets is not None:
        res = admissible(sets, fam)
        doc["admissible"] = {"ok": res.ok, "witness": res.witness, "reason": res.reason}
        print(json.dumps(res.ok))
    if single is None and sets is None:
        raise UsageError("give --set or --sets (or 'set'/'sets' in the input)")
    return doc, EXIT_OK


def cmd_ra(ctx: Context):
    a = ctx.args
    raw = ctx.input(required=False) or {}
    xi = a.xi if a.xi is not None else raw.get("xi")
    M = json.loads(a.M) if a.M is not None else raw.get("M")
    n = a.n if a.n is not None else raw.get("n")
    if xi is None or M is None or n is None:
        raise UsageError("ra needs --xi, --M and --n")
    try:
        avg = repeated_average(xi, M, int(n), convention=a.convention, budget=a.budget)
    except (MTooShort, AverageTooLarge) as e:
        raise ValueError(str(e)) from None
    vec = vec_to_dict(avg.vector)
    print(json.dumps(vec, separators=(",", ":")))
    return {"command": "ra", "xi": str(xi), "M": M, "n": int(n), "convention": a.convention,
            "vector": vec, "support": sorted(avg.vector.support())}, EXIT_OK


def cmd_mtnorm(ctx: Context):
    p = MTParams.from_json(ctx.params())
    x = _vector(ctx.input())
    value, cert = mt_norm(x, p)
    print(fraction_to_json(value))
    if ctx.args.out is None and ctx.args.inp is not None:
        ctx.args.out = str(Path(ctx.args.inp).with_suffix(".cert.json"))
    return {"command": "mtnorm", "norm": value, "certificate": cert, "vector": x}, EXIT_OK


def cmd_dnorm(ctx: Context):
    praw = ctx.params()
    p = MTParams.from_json(praw)
    if "ground" not in praw:
        raise ValueError("d-product norms need a 'ground' descriptor in the parameters")
    raw = ctx.input()
    blocks = {int(k): vec_from_json(v) for k, v in raw["blocks"].items()}
    value, cert = dproduct_norm(DProductVec(blocks, p))
    print(fraction_to_json(value))
    return {"command": "dnorm", "norm": value, "certificate": cert}, EXIT_OK


def cmd_treenorm(ctx: Context):
    tp = _tree_params(ctx.params())
    raw = ctx.input()
    if isinstance(raw, dict) and "branch" in raw:
        from .treespace import branch_vector
        f = branch_vector(raw["branch"], tp)
    else:
        f = _tree_vector(raw["vector"] if isinstance(raw, dict) and "vector" in raw else raw)
    if tp.polyhedral:
        v = xa_norm(f, tp)
        print(fraction_to_json(v))
        return {"command": "treenorm", "norm": v, "exact": True}, EXIT_OK
    tol = as_fraction(ctx.args.tol)
    try:
        xa_norm(f, tp)
    except ExactnessUnavailable:
        pass
    lo, hi = xa_norm(f, tp, exact=False, tol=tol)
    print(f"[{fraction_to_json(lo)}, {fraction_to_json(hi)}]")
    return {"command": "treenorm", "lower": lo, "upper": hi, "exact": False}, EXIT_OK


def cmd_certify(ctx: Context):
    """Tree norming certificate for level coefficients, or re-check of a norm certificate."""
    praw = ctx.params()
    raw = ctx.input()
    if "certificate" in raw:
        p = MTParams.from_json(praw)
        cert = cert_from_json(raw["certificate"])
        bad = cert_violations(cert, p)
        doc = {"command": "certify", "violations": bad}
        if "vector" in raw:
            x = vec_from_json(raw["vector"])
            value = cert_evaluate(cert, x)
            doc["value"] = value
            if "norm" in raw:
                doc["matches_norm"] = value == as_fraction(raw["norm"])
                bad = bad + ([] if doc["matches_norm"] else ["certificate value differs from the stated norm"])
        print("valid" if not bad else "invalid")
        return doc, EXIT_OK if not bad else EXIT_CLAIM
    tp = _tree_params(praw)
    lams = {int(k): as_fraction(v) for k, v in raw["lambdas"].items()}
    c = norming_certificate(lams, tp)
    print(f"{fraction_to_json(c.value)} > {fraction_to_json(c.norm / 4)}: {c.holds}")
    return {"command": "certify", "branch": list(c.branch), "sign": c.sign, "value": c.value,
            "norm": c.norm, "margin": c.margin, "witness": c.witness, "holds": c.holds}, \
        EXIT_OK if c.holds else EXIT_CLAIM


def cmd_split(ctx: Context):
    tp = _tree_params(ctx.params())
    raw = ctx.input()
    band = tuple(raw["band"])
    phi = _tree_vector(raw["phi"])
    nodes = [_node(n) for n in raw.get("nodes", [])] or list(phi.support())
    s = split_band(band, phi, raw["eps"], tp, nodes)
    print(json.dumps({"E1": len(s.E1), "E2": len(s.E2)}))
    return {"command": "split", "band": list(band), "eps": s.eps,
            "E1": sorted(index_to_json(n) for n in s.E1),
            "E2": sorted(index_to_json(n) for n in s.E2)}, EXIT_OK


def cmd_partition(ctx: Context):
    tp = _tree_params(ctx.params())
    raw = ctx.input()
    bands = [tuple(b) for b in raw["bands"]]
    ws = [_w0(w, tp) for w in raw["ws"]]
    P = incomparable_partition(bands, ws, _tree_vector(raw["xstar"]), as_fraction(raw["eps"]), tp)
    print(json.dumps({"N": P.N, "ok": P.ok}))
    return {"command": "partition", "classes": P.classes, "N": P.N, "ok": P.ok,
            "F": [sorted(index_to_json(n) for n in f) for f in P.F], "conditions": P.conditions}, \
        EXIT_OK if P.ok else EXIT_CLAIM


def cmd_gauge(ctx: Context):
    tp = _tree_params(ctx.params())
    raw = ctx.input()
    x = _tree_vector(raw["x"])
    gens = _generators(raw, tp)
    n = int(raw.get("n", 1))
    a_n = _a_value(raw, n)
    tol = as_fraction(raw["tol"]) if "tol" in raw else None
    g = gauge(x, gens, n, a_n, tp, tol=tol)
    bad = gauge_violations(x, gens, n, a_n, tp, g) if g.exact else []
    print(fraction_to_json(g.value) if g.exact else f"[{fraction_to_json(g.lower)}, {fraction_to_json(g.upper)}]")
    return {"command": "gauge", "n": n, "a_n": a_n, "gauge": g.to_json(), "violations": bad}, \
        EXIT_OK if not bad else EXIT_CLAIM


def cmd_diag(ctx: Context):
    praw = ctx.params()
    tp = _tree_params(praw)
    outer = MTParams.from_json(praw["outer"]) if "outer" in praw else MTParams(["A2"], ["1/2"])
    raw = ctx.input()
    x = _tree_vector(raw["x"])
    gens = _generators(raw, tp)
    d = diagonal_norm_bounds(x, gens, _a_sequence(raw), outer, tp, int(raw.get("N", 3)))
    print(f"[{fraction_to_json(d.lower)}, {fraction_to_json(d.upper)}]")
    return {"command": "diag", "lower": d.lower, "upper": d.upper, "tail": d.tail, "rho_W": d.rho_W,
            "N": d.N, "per_coordinate": d.per_coordinate, "certificate": d.cert}, EXIT_OK


def cmd_dependent(ctx: Context):
    praw = ctx.params(required=False) or {}
    raw = ctx.input(required=False) or {}
    j = int(raw.get("j", ctx.args.j))
    if "families" in praw or "scheme" in praw:
        p = MTParams.from_json(praw)
    else:
        p = toy_dependent_params(j, int(praw.get("n_odd", raw.get("n_odd", 2))))
    import random
    rng = random.Random(ctx.args.seed)
    reg = SigmaRegistry()
    seq = build_dependent_sequence(block_source(1, width=lambda k: rng.randint(1, 2)), block_source(1), j, p, reg)
    bad = seq.violations(reg)
    reports = verify_dependent_estimates(seq)
    failed = bad or any(r["status"] == "fails" for r in reports)
    print(json.dumps({r["claim"]: r["status"] for r in reports}, indent=1))
    return {"command": "dependent", "j": j, "params": p, "r": seq.r, "thetas": seq.thetas,
            "theta_report": seq.theta_report(), "violations": bad, "warnings": seq.warnings,
            "vectors": seq.vectors, "duals": seq.duals, "reports": reports,
            "registry": reg.snapshot()}, EXIT_CLAIM if failed else EXIT_OK


def cmd_verify(ctx: Context):
    a = ctx.args
    suites = list(SUITES) if a.suite == "all" else [a.suite]
    with ThreadPoolExecutor(max_workers=max(1, min(a.jobs, len(suites)))) as pool:
        results = list(pool.map(lambda s: run_suite(s, a.seed, a.budget), suites))
    claims = [c for r in results for c in r]
    for c in claims:
        print(f"{c['status']:>16}  {c['claim']}")
    failed = any(c["status"] == "fails" for c in claims)
    return {"command": "verify", "suite": a.suite, "seed": a.seed, "budget": a.budget,
            "claims": claims}, EXIT_CLAIM if failed else EXIT_OK


COMMANDS = {
    "family": (cmd_family, "membership in a Schreier/size family, or admissibility of a set sequence"),
    "ra": (cmd_ra, "repeated average xi_n^M"),
    "mtnorm": (cmd_mtnorm, "exact mixed-Tsirelson norm with certificate"),
    "dnorm": (cmd_dnorm, "d-product norm over a ground space"),
    "treenorm": (cmd_treenorm, "norm of a tree vector"),
    "certify": (cmd_certify, "tree norming certificate, or re-check of a norm certificate"),
    "split": (cmd_split, "split a level band into E' and E''"),
    "partition": (cmd_partition, "incomparable partition of bands"),
    "gauge": (cmd_gauge, "gauge of 2^n W + a_n B"),
    "diag": (cmd_diag, "bounds on the diagonal norm"),
    "dependent": (cmd_dependent, "build a dependent sequence and report its estimates"),
    "verify": (cmd_verify, "run verification suites"),
}


def build_parser() -> ArgParser:
    parser = ArgParser(prog="hispace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=ArgParser)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--params", metavar="FILE")
        sp.add_argument("--in", dest="inp", metavar="FILE")
        sp.add_argument("--out", metavar="FILE")
        if name == "family":
            sp.add_argument("--family", help='e.g. "A3", "S2", "S[w]"')
            sp.add_argument("--set", help="JSON list of naturals")
            sp.add_argument("--sets", help="JSON list of lists")
        elif name == "ra":
            sp.add_argument("--xi", help='"0", "2", "w", "w+1", ...')
            sp.add_argument("--M", help="JSON increasing integer list")
            sp.add_argument("--n", type=int)
            sp.add_argument("--convention", default="first")
            sp.add_argument("--budget", type=int, default=1_000_000)
        elif name == "treenorm":
            sp.add_argument("--tol", default="1/1000000000")
        elif name == "dependent":
            sp.add_argument("--j", type=int, default=2)
            sp.add_argument("--seed", type=int, default=0)
        elif name == "verify":
            sp.add_argument("--suite", choices=SUITES + ("all",), default="all")
            sp.add_argument("--budget", type=int, default=None)
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--jobs", type=int, default=1)
    return parser


def _diagnostic(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"schema_version": SCHEMA_VERSION, "error": kind, "message": message}) + "\n")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    ctx = Context(args, argv)
    start = time.perf_counter()
    try:
        doc, code = COMMANDS[args.command][0](ctx)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        _diagnostic("usage", str(e))
        return EXIT_USAGE
    except (ValueError, TypeError, KeyError, IndexError, OSError) as e:
        _diagnostic(type(e).__name__, str(e))
        return EXIT_VALIDATION
    if args.out is not None:
        ctx.write(args.out, doc)
        ctx.manifest.wall_time = time.perf_counter() - start
        atomic_write(Path(str(args.out) + ".manifest.json"), dumps(ctx.manifest.to_json()))
    return code


if __name__ == "__main__":
    sys.exit(main())
