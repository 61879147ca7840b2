"""Oracle suite behind ``knotbeta selfcheck`` and the acceptance tests.

Every criterion produces one :class:`CheckResult` made of measured parts;
a part that cannot run under the chosen options (for instance a residue
that needs a higher subtraction order) is SKIPPED with its reason.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .continuation import (
    ContinuationConfig,
    beta_eval,
    beta_residue,
    pole_scan,
    regularity_scan,
    scaled_epsilon,
)
from .energy import mobius_energy, energy_identity_check
from .errors import ConfigError
from .knot import circle_knot, ellipse_knot, fourier_knot, resample_arclength, torus_knot
from .oracles import riemann_polygon_beta
from .polygonal import (
    polygon_beta,
    polygon_residues,
    random_polygon,
    regular_polygon,
    split_edge,
    unit_square,
)
from .special import circle_beta_value, circle_residue, functional_equation_defect
from .variational import (
    bernstein_apply,
    bracket_length_commutation,
    discrete_hessian_contraction,
    first_variation_check,
    gelfand_shilov_check,
    gradient_field,
    length_bracket,
    poisson_bracket,
)

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"


@dataclass
class Part:
    label: str
    measured: float | None
    tolerance: float | None
    status: str
    note: str = ""

    def to_dict(self) -> dict:
        return {"label": self.label, "measured": self.measured, "tolerance": self.tolerance,
                "status": self.status, "note": self.note}


@dataclass
class CheckResult:
    criterion: int
    name: str
    parts: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        states = {p.status for p in self.parts}
        if FAIL in states:
            return FAIL
        if states == {SKIPPED} or not states:
            return SKIPPED
        return PASS

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def worst(self) -> Part | None:
        """The measured part closest to (or furthest beyond) its tolerance."""
        scored = [p for p in self.parts if p.measured is not None and p.tolerance]
        return max(scored, key=lambda p: p.measured / p.tolerance, default=None)

    def line(self) -> str:
        w = self.worst()
        tail = f"  worst {w.label}: {w.measured:.3e} (tol {w.tolerance:.0e})" if w else ""
        skipped = sum(p.status == SKIPPED for p in self.parts)
        if skipped:
            tail += f"  [{skipped} skipped]"
        return f"[{self.status}] {self.criterion:2d} {self.name}{tail}"

    def to_dict(self) -> dict:
        return {"criterion": self.criterion, "name": self.name, "status": self.status,
                "seconds": self.seconds, "parts": [p.to_dict() for p in self.parts],
                "info": self.info}


def _part(label, measured, tol, note="") -> Part:
    measured = float(measured)
    ok = math.isfinite(measured) and measured <= tol
    return Part(label, measured, tol, PASS if ok else FAIL, note)


def _flag(label, ok: bool, note="") -> Part:
    return Part(label, None, None, PASS if ok else FAIL, note)


def _skip(label, reason) -> Part:
    return Part(label, None, None, SKIPPED, str(reason))


def _rel(a, b) -> float:
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1.0)


def asymmetric_trefoil():
    """A trefoil with extra harmonics that break all of its symmetries."""
    return fourier_knot([([0, 0, 0, 0.3], [1, 2, 0.15]),
                         ([0, 1, -2], [0, 0, 0]),
                         ([0, 0, 0.2, 0], [0, 0, -1])], name="asymmetric trefoil")


@dataclass
class SelfCheck:
    """Options and cached test frames."""

    samples: int = 256
    order: int = 8
    epsilon_factor: float = 1.0
    max_j: int = 2
    bracket_samples: int = 96
    seed: int = 20240601

    @cached_property
    def circle(self):
        return resample_arclength(circle_knot(1.0), self.samples)

    @cached_property
    def ellipse(self):
        return resample_arclength(ellipse_knot(1.3, 0.8), self.samples)

    @cached_property
    def torus(self):
        return resample_arclength(torus_knot(2, 3, 2.0, 0.5), self.samples)

    def config(self, frame, order=None) -> ContinuationConfig:
        eps, _ = scaled_epsilon(frame, self.epsilon_factor)
        return ContinuationConfig(epsilon=eps, order=self.order if order is None else order)

    def epsilon_info(self, frame) -> dict:
        eps, clamped = scaled_epsilon(frame, self.epsilon_factor)
        return {"epsilon": eps, "clamped": clamped, "length": frame.length}

    # 1 -----------------------------------------------------------------
    def circle_sweep(self) -> CheckResult:
        res = CheckResult(1, "circle oracle sweep")
        cfg = self.config(self.circle)
        start = time.perf_counter()
        for s in (2, 1, 0.5, -0.5, -2, -2.5, -4, -4.5):
            try:
                value = beta_eval(self.circle, s, cfg).value
            except ConfigError as exc:
                res.parts.append(_skip(f"s={s}", exc))
                continue
            res.parts.append(_part(f"s={s}", _rel(value, circle_beta_value(s)), 1e-5))
        res.parts.append(_part("runtime [s]", time.perf_counter() - start, 10.0))
        res.info = self.epsilon_info(self.circle)
        return res

    # 2 -----------------------------------------------------------------
    def functional_equation(self) -> CheckResult:
        res = CheckResult(2, "functional equation of the circle")
        cfg = self.config(self.circle)
        beta = lambda z: beta_eval(self.circle, z, cfg).value
        for s in (2, 3, 0.5):
            res.parts.append(_part(f"closed form s={s}", functional_equation_defect(s), 1e-10))
            try:
                res.parts.append(_part(f"continuation s={s}",
                                       functional_equation_defect(s, beta=beta), 1e-5))
            except ConfigError as exc:
                res.parts.append(_skip(f"continuation s={s}", exc))
        return res

    # 3 -----------------------------------------------------------------
    def residues(self) -> CheckResult:
        res = CheckResult(3, "residues")
        cfg = self.config(self.circle)
        for j in range(self.max_j + 1):
            try:
                rep = beta_residue(self.circle, j, cfg)
            except ConfigError as exc:
                res.parts.append(_skip(f"circle j={j}", exc))
                continue
            oracle = circle_residue(j)
            res.parts.append(_part(f"circle j={j} series vs Gamma", abs(rep.series_residue - oracle), 1e-5))
            if rep.formula_residue is not None:
                res.parts.append(_part(f"circle j={j} formula vs Gamma",
                                       abs(rep.formula_residue - oracle), 1e-5))
            verdict = rep.verdict()
            res.info[f"circle j={j}"] = {
                "series": rep.series_residue, "formula": rep.formula_residue, "oracle": oracle,
                "printed": rep.printed_value, "printed_formula": rep.printed_formula,
                "verdict": verdict,
            }
            if j >= 1:
                res.parts.append(_flag(f"printed j={j} marked DISAGREES", verdict == "DISAGREES",
                                       f"printed {rep.printed_value!r} vs oracle {oracle!r}"))
        rep = beta_residue(self.torus, 0, self.config(self.torus))
        res.parts.append(_part("torus j=0 vs 2l", abs(rep.series_residue - 2 * self.torus.length), 1e-4))
        return res

    # 4 -----------------------------------------------------------------
    def pole_structure(self) -> CheckResult:
        res = CheckResult(4, "pole structure")
        for name, frame in (("circle", self.circle), ("torus", self.torus)):
            cfg = self.config(frame)
            for j in (0, 1):
                try:
                    scan = pole_scan(frame, j, cfg)
                except ConfigError as exc:
                    res.parts.append(_skip(f"{name} j={j}", exc))
                    continue
                res.parts.append(_part(f"{name} j={j} spread", scan["spread"], 1e-4))
                if name == "circle":
                    ref = circle_residue(j)
                elif j == 0:
                    ref = 2 * frame.length
                else:
                    ref = beta_residue(frame, j, cfg).series_residue
                res.parts.append(_part(f"{name} j={j} residue", abs(scan["residue_estimate"] - ref), 1e-4))
            for s0 in (-2.0, -4.0):
                try:
                    reg = regularity_scan(frame, s0, cfg)
                except ConfigError as exc:
                    res.parts.append(_skip(f"{name} s={s0}", exc))
                    continue
                res.parts.append(_flag(f"{name} s={s0} finite", reg["finite"]))
                res.parts.append(_part(f"{name} s={s0} residue", reg["residue_estimate"], 1e-4))
                res.parts.append(_part(f"{name} s={s0} drift", reg["drift"], 1e-2))
        return res

    # 5 -----------------------------------------------------------------
    def polygons(self) -> CheckResult:
        res = CheckResult(5, "polygons")
        sq = unit_square()
        r1, r2 = polygon_residues(sq)
        res.parts.append(_part("square res(-2) vs 4pi-8", abs(r2 - (4 * math.pi - 8)), 1e-10))
        res.parts.append(_part("square res(-1) vs 8", abs(r1 - 8), 1e-10))
        # numeric residue: direction average of (s+2) B(s) around -2
        d = 1e-2
        num = sum(d * e * polygon_beta(sq, -2 + d * e, guard=0.0).value for e in (1, 1j, -1, -1j)) / 4
        res.parts.append(_part("square res(-2) numeric", abs(num - r2), 1e-6))
        for name, poly in (("square", sq), ("triangle", regular_polygon(3))):
            b = polygon_beta(poly, 1.0).value.real
            oracle = riemann_polygon_beta(poly.vertices, 1.0, 4096)
            res.parts.append(_part(f"{name} s=1 vs Riemann", abs(b - oracle) / abs(oracle), 1e-5))
        split = split_edge(sq, 1, 0.5)
        res.parts.append(_part("fictitious vertex B(1)",
                               abs(polygon_beta(split, 1.0).value - polygon_beta(sq, 1.0).value), 1e-10))
        res.parts.append(_part("fictitious vertex res(-2)", abs(polygon_residues(split)[1] - r2), 1e-10))
        rng = np.random.default_rng(self.seed)
        worst = math.inf
        for _ in range(20):
            a, b = polygon_residues(random_polygon(rng))
            worst = min(worst, a, b)
        res.parts.append(_flag("20 random polygons: residues > 0", worst > 0, f"smallest {worst:.6g}"))
        return res

    # 6 -----------------------------------------------------------------
    def energy(self) -> CheckResult:
        res = CheckResult(6, "Moebius energy")
        res.parts.append(_part("E(circle) - 4", abs(mobius_energy(self.circle) - 4.0), 1e-5))
        for name, frame in (("circle", self.circle), ("ellipse", self.ellipse), ("torus", self.torus)):
            rep = energy_identity_check(frame, self.config(frame))
            res.parts.append(_part(f"{name} |B(-2) - (E-4)|", rep.defect, 1e-4))
            res.info[name] = {"E": rep.E, "B_minus2": rep.B_minus2, "f_minus2": rep.f_minus2,
                              "printed_f_minus2": rep.printed_f_minus2}
        big = resample_arclength(torus_knot(2, 3, 2.0, 0.5).transformed(scale=2.0), self.samples)
        res.parts.append(_part("torus E(2K) - E(K)", abs(mobius_energy(big) - mobius_energy(self.torus)), 1e-5))
        return res

    # 7 -----------------------------------------------------------------
    def strip_independence(self) -> CheckResult:
        res = CheckResult(7, "epsilon and order independence")
        frame, s = self.torus, -2.5
        cfg = self.config(frame)
        base = beta_eval(frame, s, cfg).value
        half = beta_eval(frame, s, replace(cfg, epsilon=cfg.epsilon / 2)).value
        res.parts.append(_part("eps -> eps/2", abs(base - half), 1e-6))
        r6 = beta_eval(frame, s, replace(cfg, order=6)).value
        r8 = beta_eval(frame, s, replace(cfg, order=8)).value
        res.parts.append(_part("r 6 -> 8", abs(r6 - r8), 1e-6))
        res.info = self.epsilon_info(frame)
        return res

    # 8 -----------------------------------------------------------------
    def scaling(self) -> CheckResult:
        res = CheckResult(8, "scaling covariance")
        lam = 2.0
        big = resample_arclength(torus_knot(2, 3, 2.0, 0.5).transformed(scale=lam), self.samples)
        for s in (1.0, -2.5):
            b1 = beta_eval(self.torus, s, self.config(self.torus)).value
            b2 = beta_eval(big, s, self.config(big)).value
            res.parts.append(_part(f"s={s}", abs(b2 - lam ** (s + 2) * b1) / abs(b2), 1e-6))
        return res

    # 9 -----------------------------------------------------------------
    def gradient(self) -> CheckResult:
        res = CheckResult(9, "gradient field")
        g = gradient_field(self.circle, 2.0)
        exact = 8 * math.pi * self.circle.points
        res.parts.append(_part("circle s=2 vs 8 pi gamma",
                               float(np.max(np.abs(g.values - exact))) / (8 * math.pi), 1e-6))
        for name, frame in (("circle", self.circle), ("torus", self.torus)):
            fv = first_variation_check(frame, 3.0)
            res.parts.append(_part(f"{name} s=3 central difference", fv.relative_error, 1e-3))
            res.info[name] = {"finite_difference": fv.finite_difference, "predicted": fv.predicted}
        return res

    # 10 ----------------------------------------------------------------
    def bracket(self) -> CheckResult:
        res = CheckResult(10, "Poisson bracket")
        start = time.perf_counter()
        torus = resample_arclength(torus_knot(2, 3, 2.0, 0.5), self.bracket_samples)
        ellipse = resample_arclength(ellipse_knot(1.3, 0.8), self.bracket_samples)
        for s, u in ((2.0, 4.0), (-0.5, 3.0)):
            a, b = poisson_bracket(torus, s, u), poisson_bracket(torus, u, s)
            res.parts.append(_part(f"antisymmetry torus ({s},{u})", abs(a + b) / max(1.0, abs(a)), 1e-8))
            res.parts.append(_part(f"planar ellipse ({s},{u})", abs(poisson_bracket(ellipse, s, u)), 1e-8))
        triple = poisson_bracket(torus, 2.0, 4.0, method="triple")
        kernel = poisson_bracket(torus, 2.0, 4.0)
        res.parts.append(_part("torus triple vs kernel (2,4)", abs(triple - kernel), 1e-8))
        finer = resample_arclength(torus_knot(2, 3, 2.0, 0.5), 2 * self.bracket_samples)
        for s in (-1.05, -0.95):
            coarse_v = poisson_bracket(torus, s, 4.0)
            fine_v = poisson_bracket(finer, s, 4.0)
            res.parts.append(_flag(f"torus ({s},4) finite", math.isfinite(coarse_v)))
            res.parts.append(_part(f"torus ({s},4) refinement", abs(coarse_v - fine_v), 1e-3))
        res.parts.append(_part("torus residue at s=-1 (u=4)", abs(bracket_length_commutation(torus, 4.0)), 1e-3))
        res.parts.append(_part("runtime at N=96 [s]", time.perf_counter() - start, 60.0))
        # a knot without the orientation-reversing symmetry of torus knots
        asym = resample_arclength(asymmetric_trefoil(), 256)
        a, b = poisson_bracket(asym, 2.0, 4.0), poisson_bracket(asym, 4.0, 2.0)
        res.parts.append(_part("antisymmetry asymmetric (2,4)", abs(a + b) / max(1.0, abs(a)), 1e-8))
        t = poisson_bracket(asym, 2.0, 4.0, method="triple")
        res.parts.append(_part("asymmetric triple vs kernel (2,4)", abs(t - a) / abs(a), 1e-8))
        res.info["asymmetric trefoil"] = {
            "residue_at_minus_1_u4": bracket_length_commutation(asym, 4.0),
            "length_bracket_u4": length_bracket(asym, 4.0),
            "printed_convention_residue_u4": bracket_length_commutation(asym, 4.0, convention="printed"),
            "note": "not gated: without a symmetry the bracket has a pole at s=-1",
        }
        return res

    # 11 ----------------------------------------------------------------
    def bernstein(self) -> CheckResult:
        res = CheckResult(11, "Bernstein identity")
        for name, frame in (("circle", self.circle), ("torus", self.torus)):
            for s in (3.0, 4.0, 6.0):
                r = bernstein_apply(frame, s)
                res.parts.append(_part(f"{name} s={s}", r.relative_error, 1e-5))
        for s, exact in ((3.0, 96 * math.pi), (4.0, 96 * math.pi**2)):
            r = bernstein_apply(self.circle, s)
            res.parts.append(_part(f"circle s={s} vs closed form", abs(r.rhs - exact) / exact, 1e-5))
        rng = np.random.default_rng(self.seed)
        worst = 0.0
        for _ in range(8):
            i, j = rng.choice(self.torus.n, 2, replace=False)
            fd, exact = discrete_hessian_contraction(self.torus.points, self.torus.weight, i, j, 4.0)
            worst = max(worst, abs(fd - exact) / abs(exact))
        res.parts.append(_part("discrete Hessian s=4", worst, 1e-5))
        lhs, rhs = gelfand_shilov_check(3, (1.0, 0.0, 0.0), 2.0)
        res.parts.append(_part("Gelfand-Shilov n=3 z=e1 s=2", abs(lhs - rhs), 1e-6))
        lhs, rhs = gelfand_shilov_check(3, (0.3, -0.7, 1.1), 2.7)
        res.parts.append(_part("Gelfand-Shilov n=3 generic", abs(lhs - rhs) / abs(rhs), 1e-6))
        return res

    def checks(self):
        return [self.circle_sweep, self.functional_equation, self.residues, self.pole_structure,
                self.polygons, self.energy, self.strip_independence, self.scaling, self.gradient,
                self.bracket, self.bernstein]

    def run(self, only=None) -> list[CheckResult]:
        out = []
        for k, check in enumerate(self.checks(), start=1):
            if only and k not in only:
                continue
            start = time.perf_counter()
            result = check()
            result.seconds = time.perf_counter() - start
            out.append(result)
        return out


def run_selfcheck(**options) -> list[CheckResult]:
    return SelfCheck(**options).run()
