"""Command-line front end: ``knotbeta <command> --knot FILE ...``.

Knot files and reports are JSON, tables are CSV.  Exit status is 0 on
success, 1 when a self-check fails and 2 for invalid input or a request too
close to a pole (a JSON error record is written to stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from .continuation import (
    ContinuationConfig,
    beta_direct,
    beta_eval,
    beta_residue,
    series_tables,
)
from .energy import energy_identity_check
from .errors import KnotBetaError, PoleProximityError
from .knot import make_knot, resample_arclength
from .polygonal import POLYGON_POLES, polygon_beta, polygon_geometry, polygon_residues
from .selfcheck import SelfCheck
from .special import DEFAULT_GUARD, circle_beta
from .variational import CONVENTIONS, gradient_field, poisson_bracket

COMMANDS = ("eval", "sweep", "residues", "energy", "gradient", "bracket", "polygon", "selfcheck")
SWEEP_COLUMNS = ["s", "re_B", "im_B", "err_est", "flag"]
METHODS = ("auto", "closed-form", "direct", "continuation", "polygonal")


class UsageError(KnotBetaError):
    """Bad command-line or config-file input."""


@dataclass
class RunConfig:
    epsilon: float | None = None
    order: int = 8
    samples: int = 256
    guard: float = DEFAULT_GUARD
    format: str = "csv"
    out: str | None = None
    method: str = "auto"
    convention: str = "derived"
    s: complex | float | None = None
    u: float | None = None
    smin: float | None = None
    smax: float | None = None
    step: float | None = None
    max_j: int = 2
    knot: str | None = None


def fmt(x) -> str:
    """17 significant digits, locale independent; '' for missing values."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x) + 0.0, ".17g")  # + 0.0 turns -0 into 0
    if isinstance(x, complex):
        return f"{x.real + 0.0:.17g}{x.imag + 0.0:+.17g}j"
    return str(x)


def _json_value(x):
    if isinstance(x, complex):
        return {"re": _json_value(x.real), "im": _json_value(x.imag)}
    if isinstance(x, (float, np.floating)):
        return float(format(float(x), ".17g")) if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def to_json(obj) -> str:
    return json.dumps(_json_value(obj), indent=2, allow_nan=False)


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def parse_number(text: str):
    try:
        z = complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    return z.real if z.imag == 0 else z


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="knotbeta", description="Beta function of knots.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--knot", help="knot file (JSON)")
    p.add_argument("--s", type=parse_number, help="exponent s; complex values as --s=-2.5+1j")
    p.add_argument("--u", type=float, help="second exponent for the bracket")
    p.add_argument("--smin", type=float)
    p.add_argument("--smax", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--max-j", dest="max_j", type=int)
    p.add_argument("--epsilon", type=float,
                   help="strip half-width; for selfcheck a factor on the default width")
    p.add_argument("--order", type=int, help="subtraction order r (even)")
    p.add_argument("--samples", type=int, help="arc-length samples N")
    p.add_argument("--guard", type=float, help="guard radius around poles")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--convention", choices=CONVENTIONS)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    return p


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        if not isinstance(values, dict):
            raise UsageError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    return RunConfig(**values)


def load_knot(path: str | None):
    if not path:
        raise UsageError("--knot FILE is required for this command")
    try:
        with open(path, encoding="utf-8") as fh:
            desc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read knot file: {exc}") from exc
    return make_knot(desc)


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this command")
    return value


class Session:
    """A knot, its frame and the continuation settings for one command."""

    def __init__(self, rc: RunConfig, knot):
        self.rc, self.knot = rc, knot
        self._frame = self._H = None

    @property
    def frame(self):
        if self._frame is None:
            if not self.knot.smooth:
                raise UsageError("this command needs a smooth knot")
            self._frame = resample_arclength(self.knot, self.rc.samples)
        return self._frame

    @property
    def cfg(self) -> ContinuationConfig:
        return ContinuationConfig(epsilon=self.rc.epsilon, order=self.rc.order, guard=self.rc.guard)

    def method_for(self, s) -> str:
        m = self.rc.method
        if m != "auto":
            return m
        if self.knot.kind == "polygon":
            return "polygonal"
        if self.knot.kind == "circle":
            return "closed-form"
        return "direct" if complex(s).real > 0 else "continuation"

    def evaluate(self, s) -> dict:
        method = self.method_for(s)
        if method == "polygonal":
            if self.knot.kind != "polygon":
                raise UsageError("method polygonal needs a polygon knot")
            mv = polygon_beta(self.knot, s, guard=self.rc.guard)
            value, err = mv.value, mv.error_estimate
        elif method == "closed-form":
            if self.knot.kind != "circle":
                raise UsageError("closed form is available for circles only")
            mv = circle_beta(s, self.knot.params["radius"], guard=self.rc.guard)
            value, err = mv.value, mv.error_estimate
        elif method == "direct":
            value = beta_direct(self.frame, s)
            err = abs(value - beta_direct(self.frame, s, order=10))
        else:
            if self._H is None:
                self._H = series_tables(self.frame)
            mv = beta_eval(self.frame, s, self.cfg, self._H)
            value, err = mv.value, mv.error_estimate
        value = complex(value)
        return {"s": s, "re_B": value.real, "im_B": value.imag, "err_est": float(err), "method": method}


def cmd_eval(session: Session) -> tuple[list[dict], list[str]]:
    row = session.evaluate(_need(session.rc.s, "--s"))
    return [row], ["s", "re_B", "im_B", "err_est", "method"]


def sweep_grid(smin: float, smax: float, step: float) -> list[float]:
    if not step > 0:
        raise UsageError("--step must be positive")
    if smax < smin:
        return []
    count = int(math.floor((smax - smin) / step + 1e-9)) + 1
    return [round(smin + k * step, 12) for k in range(count)]


def cmd_sweep(session: Session):
    rc = session.rc
    grid = sweep_grid(_need(rc.smin, "--smin"), _need(rc.smax, "--smax"), _need(rc.step, "--step"))
    rows = []
    for s in grid:
        try:
            row = session.evaluate(s)
            row["flag"] = "ok"
        except PoleProximityError:
            row = {"s": s, "flag": "pole"}
        except (KnotBetaError, ValueError) as exc:
            row = {"s": s, "flag": "error", "message": str(exc)}
        rows.append(row)
    return rows, SWEEP_COLUMNS


RESIDUE_COLUMNS = ["j", "pole", "series_residue", "formula_residue", "oracle_residue",
                   "printed_value", "printed_formula", "verdict"]


def _polygon_numeric_residue(poly, pole, delta=1e-2):
    """Direction-averaged (s - pole) B(s) on a small circle around the pole."""
    vals = [delta * e * polygon_beta(poly, pole + delta * e, guard=0.0).value for e in (1, 1j, -1, -1j)]
    return (sum(vals) / 4).real


def cmd_residues(session: Session):
    rc = session.rc
    if session.knot.kind == "polygon":
        res1, res2 = polygon_residues(session.knot)
        length = polygon_geometry(session.knot).length
        rows = []
        for pole, formula, printed, text in (
            (-1.0, res1, length, "l(K)"),
            (-2.0, res2, res2, "-2n + 2 sum (pi - phi_j)/sin(phi_j)"),
        ):
            rows.append({
                "pole": pole, "series_residue": _polygon_numeric_residue(session.knot, pole),
                "formula_residue": formula, "printed_value": printed, "printed_formula": text,
                "verdict": "AGREES" if abs(printed - formula) <= 1e-6 * max(1.0, abs(formula)) else "DISAGREES",
            })
        return rows, RESIDUE_COLUMNS
    if 2 * rc.max_j >= rc.order:
        raise UsageError(f"--max-j {rc.max_j} needs order r > {2 * rc.max_j} (have {rc.order})")
    rows = []
    for j in range(rc.max_j + 1):
        rep = beta_residue(session.frame, j, session.cfg)
        rows.append({
            "j": j, "pole": rep.pole, "series_residue": rep.series_residue,
            "formula_residue": rep.formula_residue, "oracle_residue": rep.oracle_residue,
            "printed_value": rep.printed_value, "printed_formula": rep.printed_formula,
            "verdict": rep.verdict(),
        })
    return rows, RESIDUE_COLUMNS


def cmd_energy(session: Session):
    rep = energy_identity_check(session.frame, session.cfg)
    row = {"E": rep.E, "B_minus2": rep.B_minus2, "defect": rep.defect,
           "f_minus2": rep.f_minus2, "printed_f_minus2": rep.printed_f_minus2}
    return [row], list(row)


def cmd_gradient(session: Session):
    s = _need(session.rc.s, "--s")
    g = gradient_field(session.frame, float(np.real(s)), session.rc.convention, session.cfg)
    rows = [{"x": x, "gx": v[0], "gy": v[1], "gz": v[2]} for x, v in zip(g.x, g.values)]
    return rows, ["x", "gx", "gy", "gz"]


def cmd_bracket(session: Session):
    rc = session.rc
    s, u = _need(rc.s, "--s"), _need(rc.u, "--u")
    value = poisson_bracket(session.frame, s, u, convention=rc.convention, cfg=session.cfg)
    finer = resample_arclength(session.knot, 2 * rc.samples)
    refined = poisson_bracket(finer, s, u, convention=rc.convention, cfg=session.cfg)
    row = {"s": s, "u": u, "bracket": value, "refined": refined,
           "refinement_estimate": abs(refined - value), "convention": rc.convention}
    return [row], list(row)


def cmd_polygon(session: Session):
    if session.knot.kind != "polygon":
        raise UsageError("polygon command needs a polygon knot")
    res1, res2 = polygon_residues(session.knot)
    row = {"res_m1": res1, "res_m2": res2, "printed_res_m1": polygon_geometry(session.knot).length,
           "poles": " ".join(fmt(p) for p in POLYGON_POLES)}
    if session.rc.s is not None:
        value = polygon_beta(session.knot, session.rc.s, guard=session.rc.guard).value
        row = {"s": session.rc.s, "re_B": value.real, "im_B": value.imag, **row}
    return [row], list(row)


def cmd_selfcheck(rc: RunConfig):
    options = {"samples": rc.samples, "order": rc.order, "max_j": rc.max_j}
    if rc.epsilon is not None:
        options["epsilon_factor"] = rc.epsilon
    results = SelfCheck(**options).run()
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    report = {"passed": ok, "options": options, "checks": [r.to_dict() for r in results]}
    rows = [{"criterion": r.criterion, "name": r.name, "status": r.status,
             "worst": r.worst().measured if r.worst() else None,
             "tolerance": r.worst().tolerance if r.worst() else None} for r in results]
    return report, rows, ok


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, exc: Exception, **extra) -> int:
    record = {"error": kind, "message": str(exc), **extra}
    print(json.dumps(_json_value(record)), file=sys.stderr)
    return 2


SINGLE_ROW = ("eval", "energy", "bracket", "polygon")
HANDLERS = {
    "eval": cmd_eval, "sweep": cmd_sweep, "residues": cmd_residues, "energy": cmd_energy,
    "gradient": cmd_gradient, "bracket": cmd_bracket, "polygon": cmd_polygon,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = resolve_run_config(args)
        if rc.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if args.command == "selfcheck":
            report, rows, ok = cmd_selfcheck(rc)
            text = to_json(report) + "\n" if rc.format == "json" else to_csv(
                rows, ["criterion", "name", "status", "worst", "tolerance"])
            _emit(text, rc.out)
            return 0 if ok else 1
        session = Session(rc, load_knot(rc.knot))
        rows, columns = HANDLERS[args.command](session)
    except PoleProximityError as exc:
        return _error("pole_proximity", exc, s=exc.s, pole=exc.pole, guard=exc.guard)
    except (KnotBetaError, ValueError, NotImplementedError) as exc:
        return _error("invalid_input", exc)
    if rc.format == "json":
        text = to_json(rows[0] if args.command in SINGLE_ROW else rows) + "\n"
    else:
        text = to_csv(rows, columns)
    _emit(text, rc.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
