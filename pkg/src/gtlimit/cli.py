"""Command-line interface: ``gtlimit <command> [options]``.

Every command prints a versioned JSON report (``"version": "v1"``) with the run
configuration, one entry per check (status, witness and the name of the identity
being checked) and timing.  Exit status: 0 if every check passes, 1 if a check
fails, 2 for usage errors (bad flags, invalid highest weights, corrupt cache files).

The irrep cache lives in ``$GTLIMIT_CACHE`` (default ``~/.cache/gtlimit``).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from . import exactnum as xn
from .centralizer import independence_jacobian
from .liealg import (AlgebraKind, CacheError, InvalidWeight, Irrep, build_irrep, irrep_from_json,
                     irrep_to_json, parse_weight, validate_hw, weyl_dimension)
from .patterns import count_patterns, enumerate_patterns, multiplicity_product, patterns_to_csv
from .spectral import (NonCommutingFamily, PathSpec, SpectrumMismatch, TrackingError, label_irrep,
                       labels_agree, multiplicity_modules, sample_real_sector, spectrum_to_csv, track_path,
                       verify_theorem_a)
from .yangian import (MINUS, PLUS, EvaluationFactor, OneDimFactor, TensorModule,
                      sigma1_identity_residual, verify_relations)

log = logging.getLogger("gtlimit")

REPORT_VERSION = "v1"
CACHE_ENV = "GTLIMIT_CACHE"


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- reports

@dataclass
class RunConfig:
    command: str
    kind: str | None = None
    rank: int | None = None
    hw: tuple | None = None
    depth: int | None = None
    tolerances: dict = field(default_factory=dict)
    path: dict | None = None
    seed: int = 0
    cache_dir: str | None = None
    fmt: str = "json"

    def to_json(self) -> dict:
        return {"command": self.command, "kind": self.kind, "rank": self.rank,
                "hw": None if self.hw is None else [xn.fraction_to_str(Fraction(x)) for x in self.hw],
                "depth": self.depth, "tolerances": self.tolerances, "path": self.path,
                "seed": self.seed, "format": self.fmt}


@dataclass
class Check:
    name: str
    anchor: str
    ok: bool
    witness: object = None

    def to_json(self) -> dict:
        return {"name": self.name, "identity": self.anchor, "status": "pass" if self.ok else "fail",
                "witness": self.witness}


@dataclass
class ReportBundle:
    config: RunConfig
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, anchor: str, ok: bool, witness=None) -> bool:
        self.checks.append(Check(name, anchor, bool(ok), witness))
        return bool(ok)

    def to_json(self) -> dict:
        return {"version": REPORT_VERSION, "gtlimit": __version__, "config": self.config.to_json(),
                "status": "pass" if self.ok else "fail", "checks": [c.to_json() for c in self.checks],
                "data": self.data, "artifacts": self.artifacts, "timing": self.timing}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, default=_json_default)


def _json_default(obj):
    if isinstance(obj, Fraction):
        return xn.fraction_to_str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


# ---------------------------------------------------------------- cache

def cache_dir(override: str | None = None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "gtlimit"


def cache_path(kind: AlgebraKind, hw: Sequence, directory: Path) -> Path:
    tag = "_".join(str(Fraction(x)).replace("/", "over").replace("-", "m") for x in hw)
    return directory / f"{kind.family}{kind.rank}_{tag}.json"


def save_irrep(rep: Irrep, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = cache_path(rep.kind, rep.hw, directory)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(irrep_to_json(rep), sort_keys=True))
    tmp.replace(path)
    return path


def load_irrep(path: Path) -> Irrep:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheError(f"cannot read irrep cache {path}: {exc}") from exc
    return irrep_from_json(obj)


def cached_irrep(kind: AlgebraKind, hw, directory: Path | None = None, cap: int | None = 400) -> tuple[Irrep, Path]:
    """Load V_hw from the cache, building and storing it on a miss."""
    directory = cache_dir() if directory is None else directory
    lam = validate_hw(kind, hw)
    path = cache_path(kind, lam, directory)
    if path.exists():
        rep = load_irrep(path)
        if rep.kind != kind or tuple(rep.hw) != lam:
            raise CacheError(f"cache file {path} holds {rep!r}, expected {kind.name} {lam}")
        return rep, path
    rep = build_irrep(kind, lam, cap=cap)
    return rep, save_irrep(rep, directory)


def cache_roundtrip(rep: Irrep, directory: Path) -> Irrep:
    return load_irrep(save_irrep(rep, directory))


def same_irrep(a: Irrep, b: Irrep) -> bool:
    if a.kind != b.kind or tuple(a.hw) != tuple(b.hw) or a.weights != b.weights:
        return False
    return all(a.gen(*p).shape == b.gen(*p).shape and bool((a.gen(*p) == b.gen(*p)).all()) for p in a.gens)


# ---------------------------------------------------------------- parsing helpers

def _kind(args) -> AlgebraKind:
    if args.kind is None or args.rank is None:
        raise UsageError("--kind and --rank are required")
    return AlgebraKind(args.kind, args.rank)


def _hw(args, kind: AlgebraKind) -> tuple:
    if args.hw is None:
        raise UsageError("--hw is required")
    return validate_hw(kind, parse_weight(args.hw))


def _fraction_list(text: str | None) -> tuple | None:
    if text is None:
        return None
    return tuple(Fraction(x) for x in text.split(",") if x.strip())


def _path_spec(args) -> PathSpec:
    return PathSpec(u=_fraction_list(args.u), seed=args.seed)


def parse_module(twist: str, spec: str, tail: str | None) -> TensorModule:
    """``"alpha:beta:z;alpha:beta:z"`` (z optional) plus an optional tail delta."""
    factors = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        bits = part.split(":")
        if len(bits) not in (2, 3):
            raise UsageError(f"bad factor {part!r}; expected alpha:beta[:z]")
        factors.append(EvaluationFactor(*(Fraction(b) for b in bits)))
    return TensorModule(twist, tuple(factors), None if tail is None else OneDimFactor(Fraction(tail)))


def default_modules() -> list[TensorModule]:
    """Six test modules: both twists, with and without W(delta), several factors."""
    E = EvaluationFactor
    return [
        TensorModule(MINUS, (E(Fraction(-1, 2), Fraction(-7, 2), Fraction(1, 3)),)),
        TensorModule(MINUS, (E(Fraction(-1, 2), Fraction(-5, 2), 0), E(-1, -2, 2))),
        TensorModule(PLUS, (E(0, -2, Fraction(1, 2)),)),
        TensorModule(PLUS, (E(0, -1, 0), E(-1, -2, Fraction(-3, 2))), OneDimFactor(Fraction(1, 2))),
        TensorModule(PLUS, (E(Fraction(-1, 2), Fraction(-5, 2), 1),), OneDimFactor(1)),
        TensorModule(PLUS, (E(-1, -2, Fraction(2, 3)), E(1, -1, Fraction(1, 5))), OneDimFactor(0)),
    ]


# ---------------------------------------------------------------- commands

def cmd_irrep(args, rep_: ReportBundle):
    kind = _kind(args)
    lam = _hw(args, kind)
    directory = cache_dir(args.cache_dir)
    rep, path = cached_irrep(kind, lam, directory)
    back = load_irrep(path)
    rep_.artifacts.append(str(path))
    rep_.data.update({"dim": rep.dim, "cache_file": str(path), "bytes": path.stat().st_size})
    rep_.add("dimension equals Weyl dimension", "Weyl dimension formula", rep.dim == weyl_dimension(kind, lam),
             {"dim": rep.dim, "weyl": weyl_dimension(kind, lam)})
    rep_.add("cache round-trip is exact", "cache v1", same_irrep(rep, back))


def cmd_patterns(args, rep_: ReportBundle):
    kind = _kind(args)
    lam = _hw(args, kind)
    pats = enumerate_patterns(kind, lam)
    weyl = weyl_dimension(kind, lam)
    rep_.data["count"] = len(pats)
    if not args.count_only:
        rep_.data["patterns"] = [p.to_json() for p in pats]
    rep_.add("pattern count equals irrep dimension", "Gelfand-Tsetlin basis", len(pats) == weyl,
             {"count": len(pats), "dim": weyl})
    if args.format == "csv":
        return patterns_to_csv(pats)
    return None


def cmd_verify_yangian(args, rep_: ReportBundle):
    depth = args.depth
    if args.module:
        mods = [parse_module(args.twist, args.module, args.tail)]
    else:
        mods = default_modules()
    results = []
    for mod in mods:
        rr = verify_relations(mod, depth)
        s1 = sigma1_identity_residual(mod, depth)
        results.append({"module": mod.to_json(), "relations": rr.to_json(), "sigma1_residual": s1})
        name = f"{mod.twist} module dim {mod.dim}"
        for rel, anchor in (("yangian", "sootnY(N)"), ("symmetry", "scruch4"), ("quaternary", "scruch3")):
            if rel in rr.residuals:
                rep_.add(f"{rel} relation, {name}", anchor, rr.residuals[rel] == 0, rr.residuals[rel])
        rep_.add(f"sigma_1 closed form, {name}", "sigma_1(u, F_11)", s1 == 0, s1)
    rep_.data["modules"] = results


def cmd_verify_theorem_a(args, rep_: ReportBundle):
    kind = _kind(args)
    lam = _hw(args, kind)
    rep, _ = cached_irrep(kind, lam, cache_dir(args.cache_dir))
    res = verify_theorem_a(rep, gap_tol=args.gap_tol, seed=args.seed)
    rep_.data["theorem_a"] = res.to_json()
    rep_.data["spectrum"] = res.spectrum
    if getattr(args, "spectrum_csv", None):
        path = Path(args.spectrum_csv)
        path.write_text(spectrum_to_csv(res.spectrum, res.operators))
        rep_.artifacts.append(str(path))
    rep_.add("limit family commutes exactly", "Theorem A: commutative", res.commuting)
    rep_.add("joint spectrum is simple", "Theorem A: simple spectrum", res.simple,
             {"min_gap": res.min_gap, "tol": res.gap_tol})
    rep_.add("eigenbasis refines branching", "Theorem A: Gelfand-Tsetlin refinement", res.refines)
    rep_.add("degrees match Poincare exponents", "Poincare series",
             res.degrees == res.exponents, {"degrees": res.degrees, "exponents": res.exponents})
    jac = independence_jacobian(kind)
    rep_.data["jacobian"] = jac.to_json()
    rep_.add("differentials independent at principal nilpotent", "algebraic independence", jac.ok,
             {"rank": jac.rank, "expected": jac.expected})


def cmd_poisson(args, rep_: ReportBundle):
    from . import soa  # the symbolic layer is only needed here

    kind = _kind(args)
    if kind.rank > 2 and not args.force:
        raise UsageError("symbolic Poisson checks are capped at rank 2 (use --force to override)")
    mu = soa.regular_diagonal(kind, _fraction_list(args.mu))
    fam = soa.shift_family(kind, mu)
    rep_c = soa.verify_commutativity(fam)
    polys = [g for _, g in fam.gens]
    rk = soa.jacobian_rank(polys, soa.random_point(kind, args.seed))
    rep_.data["shift_family"] = rep_c.to_json()
    rep_.add("mu is regular", "regular semisimple", bool(rep_c.regular))
    rep_.add("shift-of-argument generators Poisson-commute", "Mishchenko-Fomenko", rep_c.ok,
             rep_c.to_json()["nonzero_pairs"])
    rep_.add("generator count is (dim + rank)/2", "maximal commutative", rep_c.count == rep_c.expected,
             {"count": rep_c.count, "expected": rep_c.expected})
    rep_.add("generators are independent", "freely generate", rk == rep_c.expected,
             {"rank": rk, "expected": rep_c.expected})
    sh = soa.shuvalov_generators(kind)
    rs = soa.verify_commutativity(sh)
    rk2 = soa.jacobian_rank([g for _, g in sh], soa.random_point(kind, args.seed + 1))
    rep_.data["shuvalov"] = rs.to_json()
    rep_.add("Shuvalov limit generators Poisson-commute", "Shuvalov limit", rs.ok, rs.to_json()["nonzero_pairs"])
    rep_.add("Shuvalov limit has full transcendence degree", "Shuvalov limit", rk2 == rs.expected,
             {"rank": rk2, "expected": rs.expected})


def cmd_track(args, rep_: ReportBundle):
    kind = _kind(args)
    lam = _hw(args, kind)
    if args.mu is None:
        raise UsageError("--mu (a highest weight of the rank n-1 subalgebra) is required")
    mu = _fraction_list(args.mu)
    if len(mu) != kind.rank - 1:
        raise UsageError(f"--mu needs {kind.rank - 1} entries")
    mods = multiplicity_modules(kind.family, lam, mu)
    expected = multiplicity_product(kind.family, lam, mu)
    path = _path_spec(args)
    rep_.config.path = {"u": None if path.u is None else [str(x) for x in path.u]}
    out = []
    traces = []
    total = 0
    for sigma, mod in mods:
        tr = track_path(mod, path)
        traces.append((sigma, tr))
        total += len(tr.end_labels)
        out.append({"sigma": sigma, "track": tr.to_json()})
        rep_.add(f"tracking is a bijection onto weight labels (sigma={sigma})", "Theorem B: tracking",
                 sorted(tr.end_index) == list(range(mod.dim)),
                 {"steps": tr.steps, "detours": len(tr.detours)})
    rep_.data["tracks"] = out
    if getattr(args, "log", None):
        path = Path(args.log)
        path.write_text("".join(tr.log_jsonl(sigma=sigma) for sigma, tr in traces))
        rep_.artifacts.append(str(path))
    rep_.add("multiplicity space dimension", "multiplicity product", total == expected,
             {"tracked": total, "product": expected})
    if getattr(args, "sector", False) and mods:
        survey = sample_real_sector([m for _, m in mods], seed=args.seed)
        rep_.data["sector"] = survey.to_json()
        rep_.add("simple spectrum on the real sector (sampled)", "simple spectrum conjecture",
                 not survey.counterexamples,
                 {"points": len(survey.points), "min_gap": min(survey.gaps),
                  "counterexamples": len(survey.counterexamples)})


def _label(rep: Irrep, path: PathSpec, tol: float):
    return label_irrep(rep, path, tol)


def cmd_label(args, rep_: ReportBundle):
    kind = _kind(args)
    lam = _hw(args, kind)
    rep, _ = cached_irrep(kind, lam, cache_dir(args.cache_dir))
    path = _path_spec(args)
    gl = _label(rep, path, args.gap_tol)
    rep_.data["labels"] = gl.to_json()["labels"]
    rep_.add("labels form a bijection onto patterns", "Theorem B: labeling", gl.is_bijection(),
             {"eigenlines": len(gl.patterns), "patterns": count_patterns(kind, lam)})
    if args.stability:
        fine = _label(rep, path.refined(), args.gap_tol)
        rep_.add("labels stable under grid refinement", "Theorem B: path independence", labels_agree(gl, fine))
        alt = _label(rep, path.perturbed(0.01, args.seed + 1), args.gap_tol)
        rep_.add("labels stable under 1% path perturbation", "Theorem B: path independence",
                 labels_agree(gl, alt))


def cmd_report(args, rep_: ReportBundle):
    """All checks for one irrep (or a small default set)."""
    targets = []
    if args.kind is not None:
        kind = _kind(args)
        targets.append((kind, _hw(args, kind)))
    else:
        for fam, hw in (("C", (-1,)), ("C", (0, -1)), ("B", (-1,)), ("B", (Fraction(-1, 2),)), ("B", (0, -1))):
            kind = AlgebraKind(fam, len(hw))
            targets.append((kind, validate_hw(kind, hw)))
    sections = {}
    for kind, lam in targets:
        sub = argparse.Namespace(**vars(args))
        sub.kind, sub.rank, sub.hw = kind.family, kind.rank, ",".join(str(x) for x in lam)
        sub.count_only, sub.format, sub.stability, sub.mu, sub.force = True, "json", False, None, False
        key = f"{kind.name}{tuple(str(x) for x in lam)}"
        part = ReportBundle(RunConfig("report"))
        for fn in (cmd_patterns, cmd_verify_theorem_a, cmd_poisson, cmd_label):
            if fn is cmd_poisson and kind.rank > 2:
                continue
            fn(sub, part)
        for c in part.checks:
            rep_.checks.append(Check(f"{key}: {c.name}", c.anchor, c.ok, c.witness))
        sections[key] = {"status": "pass" if part.ok else "fail"}
    yb = ReportBundle(RunConfig("verify-yangian"))
    sub = argparse.Namespace(depth=args.depth, module=None, twist=MINUS, tail=None)
    cmd_verify_yangian(sub, yb)
    rep_.checks.extend(yb.checks)
    rep_.data["sections"] = sections


COMMANDS: dict[str, Callable] = {
    "irrep": cmd_irrep,
    "patterns": cmd_patterns,
    "verify-yangian": cmd_verify_yangian,
    "verify-theorem-a": cmd_verify_theorem_a,
    "poisson": cmd_poisson,
    "track": cmd_track,
    "label": cmd_label,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gtlimit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gtlimit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, irrep=True):
        sp.add_argument("--kind", choices=["C", "B"])
        sp.add_argument("--rank", type=int)
        if irrep:
            sp.add_argument("--hw", help="comma-separated non-positive weight, e.g. 0,-1 or -1/2")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--cache-dir", default=None, help=f"overrides ${CACHE_ENV}")
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")
        sp.add_argument("-v", "--verbose", action="store_true")

    sp = sub.add_parser("irrep", help="build (and cache) an irreducible representation")
    common(sp)
    sp = sub.add_parser("patterns", help="enumerate or count Gelfand-Tsetlin patterns")
    common(sp)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--count-only", action="store_true")
    sp = sub.add_parser("verify-yangian", help="exact relation checks on tensor modules")
    common(sp, irrep=False)
    sp.add_argument("--twist", choices=[MINUS, PLUS], default=MINUS)
    sp.add_argument("--module", help="factors alpha:beta[:z] separated by ';' (default: built-in suite)")
    sp.add_argument("--tail", help="delta of the one-dimensional factor W(delta), plus twist only")
    sp.add_argument("--depth", type=int, default=6)
    sp = sub.add_parser("verify-theorem-a", help="limit family: commutation, simple spectrum, degrees")
    common(sp)
    sp.add_argument("--gap-tol", type=float, default=1e-6)
    sp.add_argument("--spectrum-csv", help="write the joint spectrum table (CSV) here")
    sp = sub.add_parser("poisson", help="shift-of-argument and Shuvalov checks at the Poisson level")
    common(sp, irrep=False)
    sp.add_argument("--mu", help="diagonal entries of mu (default 1,2,...,n)")
    sp.add_argument("--force", action="store_true")
    sp = sub.add_parser("track", help="track the Bethe eigenlines of one multiplicity space")
    common(sp)
    sp.add_argument("--mu", help="highest weight of the rank n-1 subalgebra")
    sp.add_argument("--u", help="path direction, comma-separated distinct rationals")
    sp.add_argument("--log", help="write a JSON-lines step log of the tracking here")
    sp.add_argument("--sector", action="store_true",
                    help="also survey spectrum simplicity on a grid of real z_1 > ... > z_k")
    sp = sub.add_parser("label", help="label the limit eigenbasis by Gelfand-Tsetlin patterns")
    common(sp)
    sp.add_argument("--u", help="path direction, comma-separated distinct rationals")
    sp.add_argument("--gap-tol", type=float, default=1e-6)
    sp.add_argument("--stability", action="store_true", help="also relabel on a refined and a perturbed path")
    sp = sub.add_parser("report", help="aggregate report for one irrep or a default set")
    common(sp)
    sp.add_argument("--u", help="path direction for labeling")
    sp.add_argument("--gap-tol", type=float, default=1e-6)
    sp.add_argument("--depth", type=int, default=5)
    return p


_VALUE_FLAGS = ("--hw", "--mu", "--u")


def _glue_negative_values(argv: list) -> list:
    """Let ``--hw -1,-2`` through argparse, which would read ``-1,-2`` as an option."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Parse, dispatch, and return ``(exit code, text output)``."""
    parser = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0), ""
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig(args.command, getattr(args, "kind", None), getattr(args, "rank", None),
                    None, getattr(args, "depth", None),
                    {k: getattr(args, k) for k in ("gap_tol",) if hasattr(args, k)},
                    None, args.seed, args.cache_dir, getattr(args, "format", "json"))
    bundle = ReportBundle(cfg)
    t0 = time.perf_counter()
    try:
        if getattr(args, "hw", None) is not None and args.kind and args.rank:
            cfg.hw = tuple(parse_weight(args.hw))
        text = COMMANDS[args.command](args, bundle)
    except (TrackingError, SpectrumMismatch, NonCommutingFamily) as exc:
        bundle.add(f"{args.command} completed", type(exc).__name__, False, str(exc))
        text = None
    except (UsageError, InvalidWeight, CacheError, ValueError) as exc:
        print(f"gtlimit: error: {exc}", file=sys.stderr)
        return 2, ""
    bundle.timing["seconds"] = round(time.perf_counter() - t0, 3)
    out = text if text is not None else bundle.dumps() + "\n"
    code = 0 if bundle.ok else 1
    if args.out:
        Path(args.out).write_text(out)
        return code, ""
    return code, out


def main(argv: Sequence[str] | None = None) -> int:
    code, out = run(argv)
    if out:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
