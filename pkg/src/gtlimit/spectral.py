"""Deformed Bethe families, their t -> infinity asymptotics, eigenline tracking and pattern labels.

A multiplicity module ``L(z_1+alpha_1, z_1+beta_1) (x) ... (x) L(z_k+alpha_k, z_k+beta_k)``
(optionally with a one-dimensional tail W(delta)) is deformed along ``z_l = t u_l``.  The
normalized generators ``t^{-2m} B_m(t)``, with ``B_m`` the coefficient of ``u^{-(2m+1)}``
in ``s_11(u)``, tend to diagonal operators in the product weight basis as t grows, so the
eigenlines at t = 0 can be transported to weight labels.  Those labels become the primed
rows of Gelfand-Tsetlin patterns in :func:`label_irrep`.

Operators are built exactly (each ``B_m(t)`` is a polynomial in t of degree <= 2m, recovered
by exact interpolation); floats are used only for eigenproblems.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import exactnum as xn
from .centralizer import isotypic_decomposition, limit_family, phi_matrix, poincare_exponents
from .exactnum import TruncatedSeries
from .liealg import AlgebraKind, Irrep, build_irrep, casimir_operator, singular_vectors
from .patterns import HALF, Pattern, alpha_beta, enumerate_patterns, validate_pattern
from .yangian import MINUS, PLUS, EvaluationFactor, OneDimFactor, TensorModule, bethe_generators

log = logging.getLogger(__name__)


class TrackingError(RuntimeError):
    pass


class SpectrumMismatch(RuntimeError):
    pass


class NonCommutingFamily(ValueError):
    pass


# ---------------------------------------------------------------- path specification

@dataclass(frozen=True)
class PathSpec:
    """Tracking parameters; the detour orientation is always counter-clockwise."""

    u: tuple | None = None  # direction; None -> u_l = l - 1
    h0: float = 0.05  # initial step in t
    growth: float = 1.3  # step growth factor after an accepted step
    max_rel_step: float = 0.25  # step never exceeds this fraction of max(1, |t|)
    t_max: float = 1e6
    min_step: float = 1e-4  # below this (relative) a detour is taken
    overlap_min: float = 0.8
    ambiguity: float = 0.1
    gap_tol: float = 1e-6
    detour_radius: float = 0.05  # relative to max(1, |t|)
    end_tol: float = 1e-2
    seed: int = 0
    jitter: float = 0.0  # relative perturbation of the direction (0 = none)
    jitter_seed: int = 1

    def direction(self, k: int) -> tuple[Fraction, ...]:
        u = tuple(range(k)) if self.u is None else self.u
        if len(u) != k:
            raise ValueError(f"direction needs {k} entries, got {len(u)}")
        u = tuple(Fraction(x) for x in u)
        if self.jitter:
            # deterministic per-length perturbation, rounded to exact rationals
            rng = np.random.default_rng([self.jitter_seed, k])
            span = max(1, max(abs(x) for x in u))
            u = tuple(x + Fraction(float(rng.uniform(-self.jitter, self.jitter)) * float(span)).limit_denominator(10 ** 6)
                      for x in u)
        if len(set(u)) != len(u):
            raise ValueError("direction entries must be pairwise distinct")
        return u

    def refined(self) -> "PathSpec":
        return replace(self, h0=self.h0 / 2, growth=float(np.sqrt(self.growth)),
                       max_rel_step=self.max_rel_step / 2)

    def perturbed(self, scale: float = 0.01, seed: int = 1) -> "PathSpec":
        """Every direction moved by at most ``scale`` relative to its largest entry."""
        return replace(self, jitter=scale, jitter_seed=seed)


# ---------------------------------------------------------------- deformed and asymptotic families

class DeformedFamily:
    """``t -> [t^{-2m} B_m(t)]``, m = 0..k-1, on a module deformed along z = t u.

    The coefficients of each polynomial ``B_m(t)`` are found by exact interpolation and
    checked at one extra node.
    """

    def __init__(self, mod: TensorModule, u: Sequence, max_m: int | None = None):
        k = len(mod.factors)
        if len(u) != k:
            raise ValueError("one direction entry per factor expected")
        self.mod = mod
        self.u = tuple(Fraction(x) for x in u)
        self.max_m = k - 1 if max_m is None else max_m
        top = 2 * self.max_m
        nodes = [Fraction(j) for j in range(top + 2)]
        values = [bethe_generators(mod.with_z([t * x for x in self.u]), self.max_m) for t in nodes]
        self.coeffs: list[list[np.ndarray]] = []
        for m in range(self.max_m + 1):
            deg = 2 * m
            V = xn.exact_array([[t ** p for p in range(deg + 1)] for t in nodes[:deg + 1]])
            Vi = xn.inverse(V)
            cs = []
            for p in range(deg + 1):
                acc = xn.zeros(values[0][m].shape)
                for i in range(deg + 1):
                    if Vi[p, i] != 0:
                        acc = acc + Vi[p, i] * values[i][m]
                cs.append(acc)
            check = nodes[-1]
            pred = sum((c * check ** p for p, c in enumerate(cs)), xn.zeros(cs[0].shape))
            if not xn.is_zero(pred - values[-1][m]):
                raise ArithmeticError(f"B_{m}(t) is not a polynomial of degree <= {deg}")
            self.coeffs.append(cs)
        self.float_coeffs = [[np.asarray(xn.to_float(c), dtype=complex) for c in cs] for cs in self.coeffs]

    @property
    def dim(self) -> int:
        return self.mod.dim

    def raw_exact(self, t) -> list[np.ndarray]:
        t = Fraction(t)
        return [sum((c * t ** p for p, c in enumerate(cs)), xn.zeros(cs[0].shape)) for cs in self.coeffs]

    def exact(self, t) -> list[np.ndarray]:
        """Normalized ``t^{-2m} B_m(t)`` at rational t != 0."""
        t = Fraction(t)
        if t == 0:
            raise ZeroDivisionError("normalized family is undefined at t = 0")
        return [B * t ** (-2 * m) for m, B in enumerate(self.raw_exact(t))]

    def __call__(self, t: complex) -> list[np.ndarray]:
        """Float family used for tracking: ``max(1,|t|)``-normalized so it is continuous at 0."""
        t = complex(t)
        out = []
        scale = max(1.0, abs(t))
        for m, cs in enumerate(self.float_coeffs):
            acc = np.zeros_like(cs[0])
            for p in range(len(cs) - 1, -1, -1):
                acc = acc * t + cs[p]
            out.append(acc / scale ** (2 * m))
        return out


def deformed_family(mod: TensorModule, t, u: Sequence | None = None) -> list[np.ndarray]:
    """Normalized generators ``t^{-2m} B_m`` at z = t u (exact for rational t)."""
    k = len(mod.factors)
    u = tuple(range(k)) if u is None else tuple(u)
    if t == 0:
        return bethe_generators(mod, k - 1)
    if isinstance(t, complex) or isinstance(t, float):
        return DeformedFamily(mod, u)(t)
    t = Fraction(t)
    gens = bethe_generators(mod.with_z([t * Fraction(x) for x in u]), k - 1)
    return [B * t ** (-2 * m) for m, B in enumerate(gens)]


def _weight_h(mod: TensorModule) -> list[np.ndarray]:
    """Diagonal h^{(i)} on the factor-major weight basis."""
    labels = mod.weight_labels()
    k = len(mod.factors)
    out = []
    for i in range(k):
        m = xn.zeros((mod.dim, mod.dim))
        for r, lab in enumerate(labels):
            m[r, r] = Fraction(lab[i])
        out.append(m)
    return out


def vandermonde_matrix(u: Sequence) -> np.ndarray:
    """``(e_j(u_1^2, ..., hat u_i^2, ..., u_k^2))_{i, j = 0..k-1}``."""
    u = [Fraction(x) for x in u]
    k = len(u)
    sq = [x * x for x in u]
    return xn.exact_array([[xn.elementary_symmetric(sq[:i] + sq[i + 1:], j) for j in range(k)]
                           for i in range(k)])


def asymptotic_family(u: Sequence, mod: TensorModule) -> list[np.ndarray]:
    """``(-1)^m sum_i e_m(u^2 without u_i^2) (h^{(i)} + (delta - 1/2))``, m = 0..k-1.

    The shift by ``delta - 1/2`` is present only with a tail.  The sign ``(-1)^m`` comes from
    ``t_11(u) t_{-1,-1}(-u) = 1 + h u^{-1} - ((z + c)^2 - h^2/4) u^{-2}`` on each factor.
    """
    u = [Fraction(x) for x in u]
    k = len(mod.factors)
    if len(u) != k:
        raise ValueError("one direction entry per factor expected")
    if len(set(u)) != k:
        raise ValueError("direction entries must be pairwise distinct")
    hs = _weight_h(mod)
    if mod.tail is not None:
        shift = mod.tail.delta - HALF
        hs = [h + shift * xn.identity(mod.dim) for h in hs]
    E = vandermonde_matrix(u)
    return [(-1) ** m * sum((E[i, m] * hs[i] for i in range(k)), xn.zeros((mod.dim, mod.dim)))
            for m in range(k)]


def relative_deviation(fam: DeformedFamily, m: int, t) -> float:
    """``||t^{-2m} B_m(t) - A_m|| / ||A_m||`` in the Frobenius norm (exact operators, float norm)."""
    A = asymptotic_family(fam.u, fam.mod)[m]
    B = fam.exact(t)[m]
    num = np.linalg.norm(np.asarray(xn.to_float(B - A), dtype=complex))
    den = np.linalg.norm(np.asarray(xn.to_float(A), dtype=complex))
    return float(num / den)


def convergence_ratio(fam: DeformedFamily, m: int, t1=100, t2=1000) -> float:
    return relative_deviation(fam, m, t1) / relative_deviation(fam, m, t2)


# ---------------------------------------------------------------- joint eigenlines

@dataclass
class Eigenline:
    vector: np.ndarray
    values: np.ndarray


@dataclass
class JointSpectrum:
    lines: list
    min_gap: float

    def degenerate(self, tol: float) -> bool:
        return self.min_gap < tol

    @property
    def values(self) -> np.ndarray:
        return np.array([ln.values for ln in self.lines])


def _fix_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    thresh = 1e-9 * np.max(np.abs(v))
    j = next(i for i in range(len(v)) if abs(v[i]) > thresh)
    return v * (abs(v[j]) / v[j])


def _min_gap(vals: np.ndarray) -> float:
    n = len(vals)
    if n < 2:
        return float("inf")
    scale = max(1.0, float(np.max(np.linalg.norm(vals, axis=1))))
    best = float("inf")
    for a in range(n):
        d = np.linalg.norm(vals[a + 1:] - vals[a], axis=1)
        if len(d):
            best = min(best, float(np.min(d)))
    return best / scale


def joint_eigenlines(family: Sequence[np.ndarray], tol: float = 1e-6, seed: int = 0,
                     check_commuting: bool = True) -> JointSpectrum:
    """Eigenlines of a fixed-seed random real combination, with per-operator eigenvalues.

    Clusters of the combination's eigenvalues are split by a second random combination.
    """
    ops = [np.asarray(xn.to_float(m), dtype=complex) if (isinstance(m, np.ndarray) and m.dtype == object)
           else np.asarray(m, dtype=complex) for m in family]
    d = ops[0].shape[0]
    scale = max(1.0, max(float(np.max(np.abs(o))) for o in ops))
    if check_commuting:
        for a in range(len(ops)):
            for b in range(a + 1, len(ops)):
                if np.max(np.abs(ops[a] @ ops[b] - ops[b] @ ops[a])) > 1e-8 * scale * scale:
                    raise NonCommutingFamily(f"operators {a} and {b} do not commute")
    rng = np.random.default_rng(seed)
    c1 = rng.uniform(0.5, 1.5, size=len(ops))
    c2 = rng.uniform(0.5, 1.5, size=len(ops))
    M = sum(c * o for c, o in zip(c1, ops))
    w, V = np.linalg.eig(M)
    # split clusters of the combination's spectrum with a second combination
    order = np.argsort(w.real + 1e-3 * w.imag)
    vecs = []
    used = np.zeros(d, dtype=bool)
    for i in order:
        if used[i]:
            continue
        cl = [j for j in order if not used[j] and abs(w[j] - w[i]) <= 1e-7 * scale]
        for j in cl:
            used[j] = True
        if len(cl) == 1:
            vecs.append(V[:, cl[0]])
            continue
        Q, _ = np.linalg.qr(V[:, cl])
        M2 = sum(c * o for c, o in zip(c2, ops))
        small = np.linalg.lstsq(Q, M2 @ Q, rcond=None)[0]
        _, W2 = np.linalg.eig(small)
        for j in range(W2.shape[1]):
            vecs.append(Q @ W2[:, j])
    lines = []
    for v in vecs:
        v = _fix_phase(v)
        vals = np.array([np.vdot(v, o @ v) for o in ops])
        lines.append(Eigenline(v, vals))
    return JointSpectrum(lines, _min_gap(np.array([ln.values for ln in lines])))


def refines_branching(rep: Irrep, spec: JointSpectrum, tol: float = 1e-8) -> bool:
    """Every eigenline lies inside one g_k-isotypic component for each level k < n."""
    for k in range(1, rep.kind.rank):
        projs = [np.asarray(xn.to_float(P), dtype=complex) for _, P in isotypic_decomposition(rep, k)]
        for ln in spec.lines:
            v = ln.vector
            hits = [float(np.linalg.norm(P @ v)) / float(np.linalg.norm(v)) for P in projs]
            if sum(h > tol for h in hits) != 1:
                return False
    return True


@dataclass
class TheoremAReport:
    """Checks of the limit family on one irrep: exact commutation, simplicity, refinement, degrees."""
    kind: str
    hw: tuple
    dim: int
    commuting: bool
    min_gap: float
    gap_tol: float
    refines: bool
    degrees: list
    exponents: list
    spectrum: list
    operators: list = field(default_factory=list)  # column labels of the spectrum

    @property
    def simple(self) -> bool:
        return self.min_gap > self.gap_tol

    @property
    def ok(self) -> bool:
        return self.commuting and self.simple and self.refines and self.degrees == self.exponents

    def to_json(self) -> dict:
        return {"version": "v1", "kind": self.kind, "hw": [xn.fraction_to_str(x) for x in self.hw],
                "dim": self.dim, "commuting": self.commuting, "min_gap": self.min_gap,
                "gap_tol": self.gap_tol, "simple": self.simple, "refines_branching": self.refines,
                "degrees": self.degrees, "poincare_exponents": self.exponents,
                "spectrum": self.spectrum, "ok": self.ok}


def _real_or_complex(z: complex):
    z = complex(z)
    if abs(z.imag) <= 1e-9 * max(1.0, abs(z)):
        r = round(z.real)
        return int(r) if abs(z.real - r) <= 1e-9 * max(1.0, abs(z)) else z.real
    return [z.real, z.imag]


def verify_theorem_a(rep: Irrep, gap_tol: float = 1e-6, seed: int = 0) -> TheoremAReport:
    fam = limit_family(rep)
    commuting = not fam.commutator_failures()
    ops = [fam.ops[l] for l in fam.ops]
    spec = joint_eigenlines(ops, gap_tol, seed, check_commuting=False)
    values = sorted(([_real_or_complex(z) for z in ln.values] for ln in spec.lines), key=str)
    return TheoremAReport(rep.kind.name, tuple(rep.hw), rep.dim, commuting, spec.min_gap, gap_tol,
                          refines_branching(rep, spec), fam.degrees(), poincare_exponents(rep.kind), values,
                          [f"{k}_{m}_{tag}" for k, m, tag in fam.ops])


@dataclass
class SectorSample:
    """Simple-spectrum survey of the Bethe family over real points z_1 > ... > z_k."""
    modules: list  # direct summands sharing the deformation parameters
    points: list  # sampled z vectors
    gaps: list  # min relative gap of the joint spectrum at each point
    tol: float

    @property
    def counterexamples(self) -> list:
        return [(z, g) for z, g in zip(self.points, self.gaps) if g < self.tol]

    def to_json(self) -> dict:
        return {"version": "v1", "modules": [m.to_json() for m in self.modules], "tol": self.tol,
                "points": len(self.points), "min_gap": min(self.gaps) if self.gaps else None,
                "counterexamples": [[[str(x) for x in z], g] for z, g in self.counterexamples]}


def _block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    d = sum(b.shape[0] for b in blocks)
    out = xn.zeros((d, d))
    at = 0
    for b in blocks:
        n = b.shape[0]
        out[at:at + n, at:at + n] = b
        at += n
    return out


def sample_real_sector(mods, grid: Sequence = (-2, -1, -Fraction(1, 3), 0, Fraction(1, 2), 1, 3),
                       tol: float = 1e-6, seed: int = 0) -> SectorSample:
    """Joint spectrum gap of the Bethe family at every strictly decreasing choice of z from ``grid``.

    ``mods`` is one module or a list of summands with the same number of factors (the
    B-type multiplicity spaces are direct sums); the family acts block-diagonally.
    Nothing here is assumed by the tracker; the survey only reports where the spectrum
    fails to be simple.
    """
    from itertools import combinations

    mods = [mods] if isinstance(mods, TensorModule) else list(mods)
    k = len(mods[0].factors)
    if any(len(m.factors) != k for m in mods):
        raise ValueError("all summands need the same number of factors")
    values = sorted({Fraction(x) for x in grid}, reverse=True)
    points, gaps = [], []
    for z in combinations(values, k):
        per = [bethe_generators(m.with_z(list(z)), max(k - 1, 0)) for m in mods]
        ops = [_block_diag([p[i] for p in per]) for i in range(len(per[0]))]
        spec = joint_eigenlines(ops, tol, seed, check_commuting=False)
        points.append(tuple(z))
        gaps.append(spec.min_gap)
    return SectorSample(mods, points, gaps, tol)


def sample_multiplicity_sector(family: str, lam: Sequence, mu: Sequence, **kw) -> SectorSample:
    """:func:`sample_real_sector` on the multiplicity space of lam over mu."""
    mods = [m for _, m in multiplicity_modules(family, lam, mu)]
    if not mods:
        raise ValueError("empty multiplicity space")
    return sample_real_sector(mods, **kw)


def spectrum_to_csv(values: Sequence[Sequence], names: Sequence[str] | None = None) -> str:
    """Joint spectrum table: one row per eigenline, one (real, imag) column pair per operator."""
    rows = [list(r) for r in values]
    width = len(rows[0]) if rows else 0
    names = [f"op{i}" for i in range(width)] if names is None else list(names)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["line"] + [f"{n}_{part}" for n in names for part in ("re", "im")])
    for i, r in enumerate(rows):
        cells = []
        for z in r:
            z = complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z)
            cells += [repr(z.real), repr(z.imag)]
        w.writerow([i] + cells)
    return buf.getvalue()


# ---------------------------------------------------------------- tracking

@dataclass
class TrackResult:
    module: TensorModule | None
    start_values: np.ndarray  # eigenvalue vectors at t = 0, one row per start line
    start_lines: np.ndarray  # columns: eigenlines at t = 0
    end_index: list  # start line -> index of the asymptotic basis vector
    end_labels: list  # start line -> per-factor sl_2 weights
    steps: int = 0
    detours: list = field(default_factory=list)  # (center, radius)
    final_t: float = 0.0
    log: list = field(default_factory=list)

    @property
    def monodromy(self) -> bool:
        return bool(self.detours)

    def log_jsonl(self, **extra) -> str:
        """One JSON object per accepted step (``t``, eigenvalues, overlaps, detours so far)."""
        return "".join(json.dumps({**extra, **entry}) + "\n" for entry in self.log)

    def to_json(self) -> dict:
        return {"version": "v1", "module": None if self.module is None else self.module.to_json(),
                "end_labels": [list(map(int, lab)) for lab in self.end_labels],
                "start_values": [[[float(x.real), float(x.imag)] for x in row] for row in self.start_values],
                "steps": self.steps, "detours": [[[c.real, c.imag], r] for c, r in self.detours],
                "final_t": self.final_t}


def _match(old: np.ndarray, new: np.ndarray, path: PathSpec):
    """Permutation old -> new by maximal overlap, or None if weak or ambiguous.

    The families are not normal, so eigenlines are not orthogonal; the overlap of a new
    line with an old one is its normalized coefficient in the old eigenbasis
    (the pairing with the dual, left-eigenvector basis).
    """
    try:
        C = np.linalg.solve(old, new)
    except np.linalg.LinAlgError:
        return None
    O = np.abs(C) / np.linalg.norm(C, axis=0, keepdims=True)
    n = O.shape[0]
    perm = []
    for i in range(n):
        row = np.sort(O[i])[::-1]
        best = int(np.argmax(O[i]))
        if row[0] < path.overlap_min:
            return None
        if n > 1 and row[1] > row[0] - path.ambiguity:
            return None
        perm.append(best)
    if len(set(perm)) != n:
        return None
    return perm


def _basis_assignment(vecs: np.ndarray, tol: float):
    idx = []
    for j in range(vecs.shape[1]):
        p = np.abs(vecs[:, j]) ** 2
        b = int(np.argmax(p))
        if p[b] < 1 - tol:
            return None
        idx.append(b)
    return idx if len(set(idx)) == len(idx) else None


def track_eigenlines(family_fn: Callable[[complex], list], path: PathSpec,
                     end_check: Callable[[np.ndarray], list | None]) -> tuple:
    """Transport the t = 0 eigenlines of ``family_fn`` along the positive real axis.

    Steps are halved when overlaps are weak or ambiguous or the joint spectrum is
    near-degenerate; persistent trouble triggers a counter-clockwise semicircular detour
    through the lower half-plane.  Returns ``(spectrum_at_0, end_assignment, info)``.
    """
    spec0 = joint_eigenlines(family_fn(0.0), path.gap_tol, path.seed, check_commuting=True)
    if spec0.degenerate(path.gap_tol):
        raise TrackingError(f"spectrum at t=0 is not simple (gap {spec0.min_gap:.3g})")
    d = len(spec0.lines)
    cur = np.stack([ln.vector for ln in spec0.lines], axis=1)
    info = {"steps": 0, "detours": [], "log": []}
    if d == 1:
        return spec0, [0] if end_check(cur) is None else end_check(cur), info

    def sample(t):
        sp = joint_eigenlines(family_fn(t), path.gap_tol, path.seed, check_commuting=False)
        return sp, np.stack([ln.vector for ln in sp.lines], axis=1)

    last: dict = {}

    def advance(t_from, t_to, cur):
        sp, vecs = sample(t_to)
        if sp.degenerate(path.gap_tol):
            return None
        perm = _match(cur, vecs, path)
        if perm is None:
            return None
        moved = vecs[:, perm]
        C = np.linalg.solve(cur, moved)
        last["values"] = sp.values[perm]
        last["overlaps"] = np.abs(np.diag(C)) / np.linalg.norm(C, axis=0)
        return moved

    def detour(t, cur):
        scale = max(1.0, abs(t))
        R = path.detour_radius * scale
        for attempt in range(4):
            c = t + R
            theta, dth = np.pi, np.pi / 16
            vecs = cur
            ok = True
            while theta < 2 * np.pi - 1e-12:
                th_new = min(theta + dth, 2 * np.pi)
                nxt = advance(c + R * np.exp(1j * theta), c + R * np.exp(1j * th_new), vecs)
                if nxt is None:
                    dth /= 2
                    if dth < 1e-4:
                        ok = False
                        break
                    continue
                vecs, theta = nxt, th_new
                info["steps"] += 1
                dth = min(dth * 1.5, np.pi / 8)
            if ok:
                info["detours"].append((complex(c), float(R)))
                info["log"].append({"t": float((c + R).real), "detour": {"center": float(c.real), "radius": float(R)},
                                    "detours": len(info["detours"])})
                return (c + R).real, vecs
            R *= 1.7
        raise TrackingError(f"persistent degeneracy near t = {t:.6g}")

    t = 0.0
    h = path.h0
    hits = 0
    while True:
        if t > 0:
            assignment = end_check(cur)
            if assignment is not None:
                hits += 1
                if hits >= 2:
                    info["final_t"] = t
                    return spec0, assignment, info
            else:
                hits = 0
        if t > path.t_max:
            raise TrackingError(f"eigenlines did not approach the asymptotic basis by t = {path.t_max}")
        nxt = advance(t, t + h, cur)
        if nxt is None:
            h /= 2
            if h < path.min_step * max(1.0, t):
                t, cur = detour(t, cur)
                h = path.h0 * max(1.0, t) * 0.1
            continue
        t += h
        cur = nxt
        info["steps"] += 1
        info["log"].append({"t": t,
                            "eigenvalues": [[[float(z.real), float(z.imag)] for z in row] for row in last["values"]],
                            "overlaps": [float(x) for x in last["overlaps"]],
                            "detours": len(info["detours"])})
        h = min(h * path.growth, path.max_rel_step * max(1.0, t))


def track_path(mod: TensorModule, path: PathSpec = PathSpec()) -> TrackResult:
    """Bijection from z = 0 eigenlines of the Bethe family on mod to product weight labels."""
    k = len(mod.factors)
    u = path.direction(k)
    labels = mod.weight_labels()
    if mod.dim == 1:
        B = [np.asarray(xn.to_float(b), dtype=complex) for b in bethe_generators(mod, k - 1)]
        vals = np.array([[b[0, 0] for b in B]])
        return TrackResult(mod, vals, np.ones((1, 1), dtype=complex), [0], [labels[0]])
    fam = DeformedFamily(mod, u)
    spec0, assignment, info = track_eigenlines(fam, path, lambda vecs: _basis_assignment(vecs, path.end_tol))
    return TrackResult(mod, spec0.values, np.stack([ln.vector for ln in spec0.lines], axis=1),
                       list(assignment), [labels[j] for j in assignment], info["steps"],
                       info["detours"], info.get("final_t", 0.0), info["log"])


# ---------------------------------------------------------------- multiplicity modules

def multiplicity_modules(family: str, lam: Sequence, mu: Sequence) -> list[tuple]:
    """The summands ``(sigma, TensorModule)`` realizing the multiplicity space of lam over mu.

    For C there is a single summand (sigma None).  For B: integral weights give
    ``L(0, b1) ... (x) W(1/2)`` (sigma 0) and ``L(-1, b1) ... (x) W(1/2)`` (sigma 1, absent
    when b1 = 0); half-integral weights give ``L(-1/2, b1) ... (x) W(0)`` and ``... (x) W(1)``.
    """
    lam = [Fraction(x) for x in lam]
    al, be = alpha_beta(family, lam, mu)
    rest = [EvaluationFactor(a, b) for a, b in zip(al[1:], be[1:])]
    if any(a < b for a, b in zip(al, be)):
        return []
    if family == "C":
        return [(None, TensorModule(MINUS, [EvaluationFactor(al[0], be[0])] + rest))]
    out = []
    if lam[0].denominator == 1:
        for sigma, a1 in ((0, Fraction(0)), (1, Fraction(-1))):
            if a1 >= be[0]:
                out.append((sigma, TensorModule(PLUS, [EvaluationFactor(a1, be[0])] + rest, OneDimFactor(HALF))))
    else:
        for sigma, delta in ((0, Fraction(0)), (1, Fraction(1))):
            out.append((sigma, TensorModule(PLUS, [EvaluationFactor(-HALF, be[0])] + rest, OneDimFactor(delta))))
    return out


def normalization_series(family: str, k: int, depth: int) -> TruncatedSeries:
    """Even scalar series g with phi_k(s_11(u)) = g(u) s_11(u) on the matching tensor module.

    ``g = prod_{i=1..k} u^2/(u^2 - (i-1/2)^2)`` for C and ``prod_{i=1..k-1} u^2/(u^2 - i^2)`` for B.
    """
    shifts = [Fraction(2 * i - 1, 2) for i in range(1, k + 1)] if family == "C" else \
        [Fraction(i) for i in range(1, k)]
    g = TruncatedSeries([Fraction(1)] + [Fraction(0)] * depth)
    for a in shifts:
        f = TruncatedSeries([a ** p if p % 2 == 0 else Fraction(0) for p in range(depth + 1)])
        g = xn.series_mul(g, f)
    return g


def module_family_at_zero(family: str, mod: TensorModule, k: int) -> list[np.ndarray]:
    """Abstract counterparts of ``phi_k(s_11^{(2m-1)})``, m = 1..k, on a multiplicity module at z = 0."""
    B = bethe_generators(mod, k - 1)
    g = normalization_series(family, k, 2 * k)
    out = []
    for m in range(1, k + 1):
        acc = xn.zeros((mod.dim, mod.dim))
        for j in range(m):
            acc = acc + g.coeff(2 * j) * B[m - 1 - j]
        out.append(acc)
    return out


def concrete_multiplicity_family(rep: Irrep, mu: Sequence) -> list[np.ndarray]:
    """Top-level ``phi_n(s_11^{(2m-1)})`` (m = 1..n) restricted to the multiplicity space of mu."""
    n = rep.kind.rank
    basis = singular_vectors(rep, n - 1)[tuple(Fraction(x) for x in mu)]
    S = phi_matrix(rep, 2 * n - 1, n)[(1, 1)]
    return [xn.solve_columns(basis, S.coeff(2 * m - 1) @ basis) for m in range(1, n + 1)]


def match_spectra(concrete: np.ndarray, abstract: np.ndarray, tol: float = 1e-6) -> list[int]:
    """Greedy nearest-vector bijection concrete row -> abstract row, rejecting near ties."""
    concrete = np.atleast_2d(concrete)
    abstract = np.atleast_2d(abstract)
    if concrete.shape != abstract.shape:
        raise SpectrumMismatch(f"spectra of different sizes {concrete.shape} vs {abstract.shape}")
    scale = max(1.0, float(np.max(np.abs(abstract))))
    out = []
    for row in concrete:
        d = np.linalg.norm(abstract - row, axis=1) / scale
        order = np.argsort(d)
        if d[order[0]] > tol:
            raise SpectrumMismatch(f"no abstract eigenvalue vector within {tol} of {row}")
        if len(d) > 1 and d[order[1]] < 10 * tol:
            raise SpectrumMismatch(f"ambiguous match for {row}")
        out.append(int(order[0]))
    if len(set(out)) != len(out):
        raise SpectrumMismatch("matching is not a bijection")
    return out


def primed_row_from_label(family: str, mod: TensorModule, label: Sequence[int]) -> tuple:
    """Row lambda'_k from per-factor sl_2 weights: E_11 value plus i - 1/2 (C) or i - 1 (B)."""
    off = HALF if family == "C" else Fraction(1)
    row = []
    for i, (f, h) in enumerate(zip(mod.factors, label), start=1):
        e11 = (f.alpha + f.beta) / 2 + Fraction(h, 2)
        row.append(e11 + i - off)
    return tuple(row)


@dataclass
class LevelTable:
    """Labels of the concrete eigenlines of one multiplicity space ``V_nu^mu`` at level k."""
    k: int
    nu: tuple
    mu: tuple
    values: np.ndarray  # concrete eigenvalue vectors (rows)
    labels: list  # per row: (lambda' row, sigma)
    tracks: list  # (sigma, TrackResult)


def level_table(kind: AlgebraKind, nu: tuple, mu: tuple, path: PathSpec, tol: float = 1e-6) -> LevelTable:
    """Concrete spectrum of ``V_nu^mu`` matched to the abstract modules and transported to labels."""
    k = kind.rank
    rep = build_irrep(kind, nu)
    conc = concrete_multiplicity_family(rep, mu)
    cspec = joint_eigenlines(conc, tol, path.seed)
    cvals = cspec.values
    abs_vals, abs_labels, tracks = [], [], []
    for sigma, mod in multiplicity_modules(kind.family, nu, mu):
        ops = module_family_at_zero(kind.family, mod, k)
        tr = track_path(mod, path)
        tracks.append((sigma, tr))
        # eigenvalues of the normalized abstract family on the tracked start lines
        fl = [np.asarray(xn.to_float(o), dtype=complex) for o in ops]
        for j in range(tr.start_lines.shape[1]):
            v = tr.start_lines[:, j]
            abs_vals.append([np.vdot(v, o @ v) for o in fl])
            abs_labels.append((primed_row_from_label(kind.family, mod, tr.end_labels[j]), sigma))
    abs_vals = np.array(abs_vals)
    perm = match_spectra(cvals, abs_vals, tol)
    return LevelTable(k, tuple(nu), tuple(mu), cvals, [abs_labels[p] for p in perm], tracks)


@dataclass
class GTLabelMap:
    rep: Irrep
    lines: list  # Eigenline of the full limit family
    patterns: list  # Pattern per eigenline
    tables: dict = field(default_factory=dict)  # (k, nu, mu) -> LevelTable

    def is_bijection(self) -> bool:
        expected = enumerate_patterns(self.rep.kind, self.rep.hw)
        return len(set(self.patterns)) == len(self.patterns) == len(expected) and set(self.patterns) == set(expected)

    def to_json(self) -> dict:
        return {"version": "v1", "kind": self.rep.kind.name, "hw": [str(x) for x in self.rep.hw],
                "labels": {str(i): p.to_json() for i, p in enumerate(self.patterns)}}


def _nearest(values: dict, target: np.ndarray, what: str, tol: float):
    best, bd, second = None, float("inf"), float("inf")
    for key, v in values.items():
        d = float(np.linalg.norm(np.asarray(v, dtype=complex) - target)) / max(1.0, float(np.max(np.abs(v))))
        if d < bd:
            best, bd, second = key, d, bd
        elif d < second:
            second = d
    if bd > tol or second < 10 * tol:
        raise SpectrumMismatch(f"cannot identify {what} (best {bd:.3g}, next {second:.3g})")
    return best


def label_irrep(rep: Irrep, path: PathSpec = PathSpec(), tol: float = 1e-6) -> GTLabelMap:
    """Assign a Gelfand-Tsetlin pattern to every joint eigenline of the limit family on rep."""
    kind = rep.kind
    n = kind.rank
    fam = limit_family(rep)
    labels = list(fam.ops)
    spec = joint_eigenlines([fam.ops[l] for l in labels], tol, path.seed)
    if spec.degenerate(tol):
        raise SpectrumMismatch(f"limit family spectrum is not simple (gap {spec.min_gap:.3g})")
    col = {lab: i for i, lab in enumerate(labels)}
    # exact Casimir values of every g_k-type occurring in rep
    casimirs: dict = {}
    for k in range(1, n + 1):
        sub = kind.sub(k)
        nus = [tuple(rep.hw)] if k == n else list(singular_vectors(rep, k))
        for nu in nus:
            r = build_irrep(sub, nu)
            hwv = xn.zeros((r.dim, 1))
            hwv[r.hw_index, 0] = Fraction(1)
            casimirs[(k, nu)] = [complex((casimir_operator(r, k, m) @ hwv)[r.hw_index, 0]) for m in range(1, k + 1)]
    tables: dict = {}
    patterns = []
    for line in spec.lines:
        chain = {}
        for k in range(n, 0, -1):
            target = np.array([line.values[col[(k, m, "casimir")]] for m in range(1, k + 1)])
            cands = {nu: v for (kk, nu), v in casimirs.items() if kk == k}
            chain[k] = (_nearest(cands, target, f"level-{k} highest weight", 1e-6)
                        if len(cands) > 1 else next(iter(cands)))
        lam_rows, lamp_rows, sigmas = [], [], []
        for k in range(1, n + 1):
            nu = chain[k]
            mu = chain[k - 1] if k > 1 else ()
            key = (k, nu, mu)
            if key not in tables:
                tables[key] = level_table(kind.sub(k), nu, mu, path, tol)
            tab = tables[key]
            target = np.array([line.values[col[(k, m, "bethe-odd")]] for m in range(1, k + 1)])
            j = _nearest({i: row for i, row in enumerate(tab.values)}, target, f"level-{k} Bethe eigenline", 1e-6)
            lp, sg = tab.labels[j]
            lam_rows.append(tuple(nu))
            lamp_rows.append(lp)
            sigmas.append(sg)
        p = Pattern(kind.family, tuple(lam_rows), tuple(lamp_rows), None if kind.family == "C" else tuple(sigmas))
        patterns.append(validate_pattern(p))
    return GTLabelMap(rep, spec.lines, patterns, tables)


def labels_agree(a: GTLabelMap, b: GTLabelMap) -> bool:
    """Same pattern on the same eigenline (eigenlines paired by eigenvalue vector)."""
    if len(a.patterns) != len(b.patterns):
        return False
    va = np.array([ln.values for ln in a.lines])
    vb = np.array([ln.values for ln in b.lines])
    for i, row in enumerate(va):
        j = int(np.argmin(np.linalg.norm(vb - row, axis=1)))
        if a.patterns[i] != b.patterns[j]:
            return False
    return True
