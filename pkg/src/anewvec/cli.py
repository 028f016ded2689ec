"""Batch experiment runner.

    anewvec COMMAND [--config PATH] [--set KEY=VALUE ...] [--seed U64]
                    [--out PATH] [--format csv|json|svg] [--tolerance FLOAT]

Config files hold flat ``key = value`` lines (``#`` starts a comment).
Command-line flags override the file. Exit status: 0 when every embedded
check passes, 1 on a failed check (a JSON failure record goes to stderr,
and next to the report when --out is given), 2 on a config error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__

FORMATS = ("csv", "json", "svg")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parameter schema


def _complex(text: str) -> complex:
    return complex(text.strip().replace(" ", "").replace("i", "j"))


def _list(conv):
    def parse(text: str):
        items = [x for x in text.split(",") if x.strip()]
        if not items:
            raise ValueError("empty list")
        return tuple(conv(x.strip()) for x in items)
    return parse


def _tuples(conv):
    def parse(text: str):
        groups = [g for g in text.split(";") if g.strip()]
        if not groups:
            raise ValueError("empty list")
        return tuple(_list(conv)(g) for g in groups)
    return parse


PARSERS: dict[str, Callable[[str], Any]] = {
    "int": int,
    "float": float,
    "str": str.strip,
    "ints": _list(int),
    "floats": _list(float),
    "complexes": _list(_complex),
    "float_tuples": _tuples(float),
    "complex_tuples": _tuples(_complex),
}


@dataclass(frozen=True)
class Param:
    kind: str
    default: str
    help: str = ""
    choices: tuple[str, ...] = ()


@dataclass
class Check:
    name: str
    parameter: str
    value: float
    relation: str
    bound: float

    @property
    def passed(self) -> bool:
        v, b = self.value, self.bound
        if isinstance(v, float) and math.isnan(v):
            return False
        return {"<=": v <= b, "<": v < b, ">=": v >= b, ">": v > b, "==": v == b}[self.relation]

    def record(self) -> dict:
        return {"check": self.name, "parameter": self.parameter, "value": _cell(self.value),
                "relation": self.relation, "bound": _cell(self.bound), "pass": self.passed}


@dataclass
class Report:
    columns: list[str]
    rows: list[list]
    checks: list[Check] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    plot: tuple[str, tuple[str, ...], bool, bool] | None = None  # x, ys, log x, log y

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


@dataclass(frozen=True)
class Command:
    name: str
    help: str
    params: dict[str, Param]
    run: Callable[[dict, int, float | None], Report]
    tolerance: float | None = None  # default for --tolerance; None means not accepted


COMMANDS: dict[str, Command] = {}


def command(name: str, help: str, params: dict[str, Param], tolerance: float | None = None):
    def deco(fn):
        COMMANDS[name] = Command(name, help, params, fn, tolerance)
        return fn
    return deco


# ---------------------------------------------------------------------------
# commands


@command("gamma", "Gamma_R on a list of complex points", {
    "s": Param("complexes", "0.5,1,2,3,1+1j,0.5+10j,0.5+100j", "evaluation points"),
})
def _cmd_gamma(p, seed, tol):
    from .gamma_factors import gamma_R

    rows, checks = [], []
    for s in p["s"]:
        g = complex(gamma_R(s))
        rows.append([s.real, s.imag, g.real, g.imag, abs(g)])
        checks.append(Check("finite", f"s={_cell(s)}", float(np.isfinite(g)), "==", 1.0))
    return Report(["s_re", "s_im", "gamma_re", "gamma_im", "abs"], rows, checks,
                  plot=("s_im", ("abs",), False, True))


@command("conductor", "Analytic conductors and Rankin-Selberg tensor bounds", {
    "mu": Param("complexes", "3j,-3j", "parameters of Pi on GL(n+1)"),
    "mu_pi": Param("complexes", "2j", "parameters of pi on GL(n)"),
    "draws": Param("int", "1000", "random draws per pair of ranks"),
    "scale": Param("float", "50", "draws use imaginary parts in [-scale, scale]"),
})
def _cmd_conductor(p, seed, tol):
    from .gamma_factors import analytic_conductor, conductor_tensor_bound, tensor_bound_draws

    b = conductor_tensor_bound(p["mu"], p["mu_pi"])
    rows = [["given", len(p["mu"]), len(p["mu_pi"]), analytic_conductor(p["mu"]),
             analytic_conductor(p["mu_pi"]), b.lower, b.value, b.upper, int(not b.holds)]]
    checks = [Check("tensor_bound", "given", float(b.holds), "==", 1.0)]
    for n in (1, 2):
        bad = tensor_bound_draws(n, p["draws"], seed, p["scale"])
        label = f"GL({n + 1})xGL({n})"
        rows.append([f"draws {label}", n + 1, n, "", "", "", "", "", bad])
        checks.append(Check("tensor_bound_violations", label, bad, "==", 0))
    return Report(["case", "rank_Pi", "rank_pi", "C_Pi", "C_pi", "lower", "C_tensor", "upper",
                   "violations"], rows, checks)


@command("k-volume", "Monte Carlo Haar volume of K_*(X, tau) and its X^A scaling", {
    "n": Param("int", "2"),
    "star": Param("int", "0", "0 for K_0, 1 for K_1"),
    "X": Param("floats", "1,10,100"),
    "tau": Param("float", "0.1"),
    "samples": Param("int", "400000"),
    "substreams": Param("int", "8"),
}, tolerance=0.05)
def _cmd_kvolume(p, seed, tol):
    from .congruence import CongruenceBox, volume_mc

    rows, scaled, rel_err = [], [], []
    for X in p["X"]:
        box = CongruenceBox(p["n"], X, p["tau"], p["star"])
        vol, err = volume_mc(box, p["samples"], seed, p["substreams"])
        s = vol * X ** box.volume_exponent()
        rows.append([X, vol, err, s, err * X ** box.volume_exponent()])
        scaled.append(s)
        rel_err.append(err / vol)
    mean = float(np.mean(scaled))
    spread = max(abs(s - mean) for s in scaled) / mean
    checks = [Check("scaled_volume_spread", f"n={p['n']} star={p['star']}", spread, "<=", tol),
              Check("mc_resolution", "3 stderr / volume", 3.0 * max(rel_err), "<=", tol)]
    return Report(["X", "estimate", "stderr", "scaled", "scaled_stderr"], rows, checks,
                  {"mean_scaled": mean, "spread": spread}, ("X", ("scaled",), True, False))


@command("folner", "Folner ratios vol(gA sym-diff A)/vol(A)", {
    "n": Param("int", "2"),
    "star": Param("int", "0"),
    "X": Param("floats", "1,50"),
    "tau": Param("float", "0.1"),
    "divisors": Param("floats", "2,8,32", "tau1 = tau / divisor"),
    "kind": Param("str", "unipotent", choices=("unipotent", "corner")),
    "samples": Param("int", "200000"),
}, tolerance=0.05)
def _cmd_folner(p, seed, tol):
    from .congruence import CongruenceBox, folner_ratio, probe_element

    rows, checks = [], []
    for X in p["X"]:
        box = CongruenceBox(p["n"], X, p["tau"], p["star"])
        ratios = []
        for d in p["divisors"]:
            tau1 = p["tau"] / d
            g = probe_element(box, tau1, p["kind"])
            r = folner_ratio(g, box, tau1, p["samples"], seed)
            ratios.append(r)
            rows.append([X, tau1, r])
        checks.append(Check("ratio_at_smallest_tau1", f"X={_cell(X)}", ratios[-1], "<", tol))
        dec = all(b < a for a, b in zip(ratios, ratios[1:]))
        checks.append(Check("strictly_decreasing", f"X={_cell(X)}", float(dec), "==", 1.0))
    return Report(["X", "tau1", "ratio"], rows, checks, plot=("tau1", ("ratio",), True, True))


@command("whittaker-eval", "GL(2) Whittaker values against the Mellin-Barnes form, or the norm identity", {
    "check": Param("str", "mellin-barnes", choices=("mellin-barnes", "stade")),
    "mu": Param("complexes", "5j,-5j", "GL(2) parameters (mellin-barnes)"),
    "y": Param("floats", "0.05,0.1,0.2,0.5,1,2", "torus points diag(y, 1)"),
    "t": Param("floats", "1,5,10", "spectral points (stade)"),
    "stade_tol": Param("float", "1e-6", "norm residual bound; --tolerance covers mellin-barnes"),
}, tolerance=1e-7)
def _cmd_whittaker(p, seed, tol):
    from .whittaker import calibrate_gl2_norm, stade_gl2_mellin_barnes, stade_norm_residual, \
        whittaker_gl2

    if p["check"] == "stade":
        norm = calibrate_gl2_norm(p["t"])
        rows, checks = [], []
        for t in p["t"]:
            r = stade_norm_residual(t, norm.d2)
            rows.append([t, r])
            checks.append(Check("norm_residual", f"t={_cell(t)}", r, "<=", p["stade_tol"]))
        checks.append(Check("calibration_spread", "d2", norm.spread, "<=", 1e-5))
        return Report(["t", "residual"], rows, checks, {"d2": norm.d2, "spread": norm.spread})
    if len(p["mu"]) != 2:
        raise ConfigError("mu must hold two parameters")
    rows, checks = [], []
    for y in p["y"]:
        w = whittaker_gl2(p["mu"], (y, 1.0))
        mb = stade_gl2_mellin_barnes(p["mu"], (y, 1.0))
        rel = abs(w - mb) / abs(w)
        rows.append([y, w.real, w.imag, mb.real, mb.imag, rel])
        checks.append(Check("mellin_barnes_rel", f"y={_cell(y)}", rel, "<=", tol))
    return Report(["y", "w_re", "w_im", "mb_re", "mb_im", "rel_diff"], rows, checks,
                  plot=("y", ("w_re", "mb_re"), True, False))


@command("decompose", "GL(2) M-series decomposition residuals", {
    "re": Param("floats", "0.02,0.01", "real parts of (mu1, mu2)"),
    "t": Param("floats", "0,3,10", "mu = (re1 + it, re2 - it)"),
    "x": Param("floats", "0.01,0.1,0.5,0.9", "a1/a2"),
    "k_max": Param("int", "24"),
}, tolerance=1e-8)
def _cmd_decompose(p, seed, tol):
    from .mseries import decompose_gl2

    if len(p["re"]) != 2:
        raise ConfigError("re must hold two real parts")
    rows, checks = [], []
    for t in p["t"]:
        mu = (p["re"][0] + 1j * t, p["re"][1] - 1j * t)
        for x in p["x"]:
            lhs, rhs = decompose_gl2(mu, (x, 1.0), p["k_max"])
            r = abs(lhs - rhs) / abs(lhs)
            rows.append([x, t, lhs.real, lhs.imag, rhs.real, rhs.imag, r])
            checks.append(Check("relative_residual", f"x={_cell(x)} t={_cell(t)}", r, "<=", tol))
    return Report(["x", "t", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"], rows, checks)


@command("m-vanishing", "Cancellation of the s=2 M-series under tau1 = tau2 mod 2", {
    "tau": Param("complex_tuples", "0.3+1j,2.3+1j,0.07;4.3+1j,0.3+1j,0.07;0.25-2j,2.25-2j,0.04+0.5j"),
    "control": Param("complex_tuples", "2.8+1j,0.3+1j,0.07", "tuples violating the congruence"),
    "control_floor": Param("float", "1e-3"),
    "a": Param("floats", "0.2,0.5,1"),
    "k_max": Param("int", "24"),
}, tolerance=1e-8)
def _cmd_mvanishing(p, seed, tol):
    from .mseries import m_residual, m_vanishing

    rows, checks = [], []
    for tau in p["tau"]:
        r = m_vanishing(tau, p["a"], p["k_max"])
        rows.append(["congruent", _cell_tuple(tau), r])
        checks.append(Check("normalized_residual", _cell_tuple(tau), r, "<=", tol))
    for tau in p["control"]:
        r = m_residual(tau, p["a"], p["k_max"])
        rows.append(["control", _cell_tuple(tau), r])
        checks.append(Check("control_residual", _cell_tuple(tau), r, ">=", p["control_floor"]))
    return Report(["kind", "tau", "residual"], rows, checks)


@command("plancherel-roundtrip", "Whittaker-Plancherel round trip of the canonical bump", {
    "t_max": Param("float", "40"),
    "nodes": Param("int", "400"),
    "parseval_tol": Param("float", "1e-3"),
    "density_tol": Param("float", "1e-10"),
}, tolerance=1e-4)
def _cmd_plancherel(p, seed, tol):
    from .numerics import BumpFunction
    from .plancherel import SpectralGrid, coefficient_envelope, plancherel_density, roundtrip

    grid = SpectralGrid.gauss(p["t_max"], p["nodes"])
    r = roundtrip(BumpFunction(), grid)
    t = grid.t_values
    dens = plancherel_density(t)
    closed = plancherel_density(t, closed_form=True)
    dens_err = float(np.max(np.abs(dens - closed) / closed))
    env = coefficient_envelope(t)
    rows = [[float(a), float(c.real), float(c.imag), float(abs(c) / e)]
            for a, c, e in zip(t, r.coefficients, env)]
    checks = [Check("sup_error", "64 sample points", r.sup_error, "<=", tol),
              Check("parseval_rel", "", r.parseval_rel, "<=", p["parseval_tol"]),
              Check("density_closed_form_rel", "", dens_err, "<=", p["density_tol"])]
    return Report(["t", "re", "im", "over_envelope"], rows, checks,
                  {"sup_error": r.sup_error, "parseval_rel": r.parseval_rel},
                  ("t", ("over_envelope",), False, True))


@command("newvector-decay", "Contour-shift agreement and small-t decay of the dual side", {
    "t": Param("float", "10", "Pi = (it, -it)"),
    "M": Param("ints", "3,5"),
    "t_min": Param("float", "1e-3"),
    "t_max": Param("float", "1e-2"),
    "points": Param("int", "8"),
    "sigma": Param("float", "4", "line compared with Re(s) = 0"),
    "probe": Param("floats", "0.05,0.1,0.3,1,3", "t values for the line comparison"),
}, tolerance=1e-8)
def _cmd_decay(p, seed, tol):
    from .newvector import Gl2Rep, KirillovVector, decay_fit, side_values

    rep, v = Gl2Rep.tempered(p["t"]), KirillovVector()
    grid = np.geomspace(p["t_min"], p["t_max"], p["points"])
    rows, checks, slopes = [], [], {}
    for M in p["M"]:
        fit = decay_fit(rep, v, grid, M)
        slopes[str(M)] = fit.slope
        rows += [[M, float(a), float(abs(b))] for a, b in zip(fit.t, fit.values)]
        checks.append(Check("decay_slope", f"M={M}", fit.slope, ">=", M - 0.1))
    probe = np.asarray(p["probe"])
    s0 = side_values(rep, v, probe, 0.0)
    s1 = side_values(rep, v, probe, p["sigma"])
    for a, x, y in zip(probe, s0, s1):
        checks.append(Check("contour_shift_rel", f"t={_cell(float(a))}",
                            float(abs(x - y) / abs(x)), "<=", tol))
    return Report(["M", "t", "abs_side"], rows, checks, {"slopes": slopes},
                  ("t", ("abs_side",), True, True))


@command("newvector-defect", "Invariance defect at the conductor scale and the uniform constant", {
    "conductors": Param("floats", "10,100,1000"),
    "c": Param("floats", "0.01,0.05,0.1", "each value is also tested with its sign flipped"),
    "k_bound": Param("float", "0.21", "frozen uniform constant"),
}, tolerance=1e-10)
def _cmd_defect(p, seed, tol):
    from .newvector import Gl2Rep, KirillovVector, _pipeline, invariance_defect

    v = KirillovVector()
    rows, checks, K = [], [], 0.0
    for C in p["conductors"]:
        rep = Gl2Rep.with_conductor(C)
        ident = _pipeline(rep, v).identity_value()
        checks.append(Check("identity_self_check", f"C={_cell(C)}",
                            abs(ident - v.at_one()), "<=", tol))
        for c in p["c"]:
            for cc in (c, -c):
                d = invariance_defect(rep, v, cc)
                ratio = abs(d) / abs(cc)
                K = max(K, ratio)
                rows.append([C, cc, d.real, d.imag, ratio])
    checks.append(Check("uniform_constant", "max |defect|/|c|", K, "<=", p["k_bound"]))
    return Report(["conductor", "c", "defect_re", "defect_im", "ratio"], rows, checks,
                  {"K_estimate": K},
                  ("c", ("ratio",), False, False))


@command("subconductor", "Defect when the congruence scale is below the conductor", {
    "t": Param("float", "100"),
    "shrink": Param("float", "0.01"),
    "c": Param("floats", "0.001,0.01,0.05,0.1"),
    "floor": Param("float", "0.05", "some tested c must reach this defect"),
})
def _cmd_subconductor(p, seed, tol):
    from .newvector import Gl2Rep, KirillovVector, subconductor_probe

    rep, v = Gl2Rep.tempered(p["t"]), KirillovVector()
    rows, worst = [], 0.0
    for c in p["c"]:
        d = subconductor_probe(rep, v, p["shrink"], c)
        worst = max(worst, abs(d))
        rows.append([c, d.real, d.imag, abs(d)])
    return Report(["c", "defect_re", "defect_im", "abs_defect"], rows,
                  [Check("max_defect", f"shrink={_cell(p['shrink'])}", worst, ">=", p["floor"])],
                  plot=("c", ("abs_defect",), True, True))


@command("toy", "GL(1) toy defect against |t|/(X-1)", {
    "pairs": Param("float_tuples", "1,10;10,1000;100,100000", "(t, X) pairs"),
    "points": Param("int", "10000"),
})
def _cmd_toy(p, seed, tol):
    from .newvector import toy_bound, toy_defect

    rows, checks = [], []
    for pair in p["pairs"]:
        if len(pair) != 2:
            raise ConfigError("pairs are t,X")
        t, X = pair
        d, b = toy_defect(t, X, p["points"]), toy_bound(t, X)
        rows.append([t, X, d, b])
        checks.append(Check("toy_bound", f"t={_cell(t)} X={_cell(X)}", d, "<=", b))
    return Report(["t", "X", "defect", "bound"], rows, checks)


@command("padic-heart", "Exact vanishing scan of the p-adic torus integral", {
    "n": Param("int", "2"),
    "m1_max": Param("int", "12"),
    "m_min": Param("int", "-12"),
    "form": Param("str", "plancherel", choices=("plancherel", "display")),
    "expected_threshold": Param("int", "1", "frozen threshold"),
})
def _cmd_padic(p, seed, tol):
    from .padic import heart_vanishing_scan, torus_integral, torus_integral_bruteforce

    scan = heart_vanishing_scan(p["n"], p["m1_max"], p["m_min"], p["form"])
    by_m1: dict[int, list[int]] = {}
    for m, val in scan.rows:
        tally = by_m1.setdefault(m[0], [0, 0])
        tally[0] += 1
        tally[1] += val != 0
    rows = [[m1, a, b] for m1, (a, b) in sorted(by_m1.items())]
    zero = (0,) * p["n"]
    exact, brute = torus_integral(zero, form=p["form"]), torus_integral_bruteforce(zero, p["form"])
    threshold = -(10 ** 9) if scan.threshold is None else scan.threshold
    above = sum(b for m1, (a, b) in by_m1.items() if m1 >= threshold)
    checks = [Check("threshold", f"n={p['n']}", threshold, "==", p["expected_threshold"]),
              Check("nonzero_above_threshold", "", above, "==", 0),
              Check("reference_vs_bruteforce", str(zero), exact, "==", brute)]
    # the torus integral itself carries no power of q
    nonzero = [{"m": list(m), "numerator": v.numerator, "denominator": v.denominator,
                "qpower": 0} for m, v in scan.nonzero]
    return Report(["m1", "scanned", "nonzero"], rows, checks,
                  {"threshold": scan.threshold, "reference": exact, "nonzero": nonzero})


# ---------------------------------------------------------------------------
# serialization


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, complex):
        return repr(x).strip("()")
    return x


def _cell_tuple(t) -> str:
    return " ".join(str(_cell(x)) for x in t)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return _cell(x)


def render_csv(report: Report, meta: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    keys = list(meta)
    w.writerow(report.columns + keys)
    for row in report.rows:
        w.writerow([_cell(x) for x in row] + [meta[k] for k in keys])
    return buf.getvalue()


def render_json(report: Report, meta: dict) -> str:
    doc = {"meta": meta, "columns": report.columns,
           "rows": [[_cell(x) for x in r] for r in report.rows],
           "summary": _jsonable(report.summary),
           "checks": [c.record() for c in report.checks],
           "pass": not report.failures}
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        return [10.0 ** k for k in range(math.floor(lo), math.ceil(hi) + 1)]
    return list(np.linspace(lo, hi, 5))


def render_svg(report: Report, meta: dict) -> str:
    width, height, pad = 640, 400, 60
    head = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            "<metadata>" + " ".join(f"{k}={v}" for k, v in meta.items()) + "</metadata>",
            f'<rect width="{width}" height="{height}" fill="white"/>']
    if report.plot is None:
        body = [f'<text x="{pad}" y="{pad}" font-size="14">no series for this command; '
                f'{len(report.checks) - len(report.failures)}/{len(report.checks)} checks pass</text>']
        return "\n".join(head + body + ["</svg>"]) + "\n"
    xname, ynames, logx, logy = report.plot
    xi = report.columns.index(xname)
    series = []
    for yname in ynames:
        yi = report.columns.index(yname)
        pts = [(float(r[xi]), float(r[yi])) for r in report.rows]
        pts = [(x, y) for x, y in pts
               if math.isfinite(x) and math.isfinite(y) and (not logx or x > 0) and (not logy or y > 0)]
        series.append((yname, sorted(pts)))
    allp = [pt for _, s in series for pt in s]
    if not allp:
        return "\n".join(head + ["</svg>"]) + "\n"
    tx = (lambda v: math.log10(v)) if logx else (lambda v: v)
    ty = (lambda v: math.log10(v)) if logy else (lambda v: v)
    xs, ys = [tx(x) for x, _ in allp], [ty(y) for _, y in allp]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x1, y1 = (x1 if x1 > x0 else x0 + 1.0), (y1 if y1 > y0 else y0 + 1.0)

    def sx(v):
        return pad + (tx(v) - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (ty(v) - y0) / (y1 - y0) * (height - 2 * pad)

    body = [f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
            f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
            f'<text x="{width / 2:.1f}" y="{height - 15}" font-size="12" text-anchor="middle">'
            f'{xname}{" (log)" if logx else ""}</text>']
    colours = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    for k, (name, pts) in enumerate(series):
        c = colours[k % len(colours)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        body.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{path}"/>')
        body.append(f'<text x="{width - pad}" y="{pad + 15 * k}" font-size="12" fill="{c}" '
                    f'text-anchor="end">{name}{" (log)" if logy else ""}</text>')
    return "\n".join(head + body + ["</svg>"]) + "\n"


RENDERERS = {"csv": render_csv, "json": render_json, "svg": render_svg}


# ---------------------------------------------------------------------------
# config resolution and entry point


def read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        k, v = (x.strip() for x in line.split("=", 1))
        if not k:
            raise ConfigError(f"line {lineno}: empty key")
        out[k] = v
    return out


GLOBAL_KEYS = ("seed", "tolerance", "format", "out")


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    params: dict
    raw: dict  # canonical text of every resolved parameter
    seed: int
    tolerance: float | None
    format: str
    out: str | None

    @property
    def config_hash(self) -> str:
        canon = {"command": self.command, **self.raw, "seed": str(self.seed),
                 "tolerance": repr(self.tolerance)}
        text = "\n".join(f"{k}={canon[k]}" for k in sorted(canon))
        return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def resolve(name: str, file_values: dict[str, str], overrides: dict[str, str]) -> ExperimentConfig:
    if name not in COMMANDS:
        raise ConfigError(f"unknown command {name!r}")
    cmd = COMMANDS[name]
    merged = {**file_values, **overrides}
    unknown = sorted(set(merged) - set(cmd.params) - set(GLOBAL_KEYS))
    if unknown:
        raise ConfigError(f"unknown keys for {name}: {', '.join(unknown)}")
    params, raw = {}, {}
    for key, spec in cmd.params.items():
        text = merged.get(key, spec.default)
        if spec.choices and text not in spec.choices:
            raise ConfigError(f"{key} must be one of {', '.join(spec.choices)}")
        try:
            params[key] = PARSERS[spec.kind](text)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key}: {text!r} ({exc})") from None
        raw[key] = text
    try:
        seed = int(merged.get("seed", "0"))
    except ValueError:
        raise ConfigError("seed must be an integer") from None
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    tolerance = cmd.tolerance
    if "tolerance" in merged:
        if cmd.tolerance is None:
            raise ConfigError(f"{name} has exact checks and takes no tolerance")
        try:
            tolerance = float(merged["tolerance"])
        except ValueError:
            raise ConfigError("tolerance must be a number") from None
        if not tolerance > 0:
            raise ConfigError("tolerance must be positive")
    fmt = merged.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
    return ExperimentConfig(name, params, raw, seed, tolerance, fmt, merged.get("out"))


def run(config: ExperimentConfig) -> tuple[int, str, Report]:
    """Run one experiment; returns (exit status, rendered report, report)."""
    try:
        report = COMMANDS[config.command].run(config.params, config.seed, config.tolerance)
    except ConfigError:
        raise
    except (ValueError, ArithmeticError) as exc:
        # library precondition errors signal an invalid configuration
        raise ConfigError(f"{type(exc).__name__}: {exc}") from None
    meta = {"version": __version__, "seed": config.seed, "config_hash": config.config_hash}
    text = RENDERERS[config.format](report, meta)
    return (1 if report.failures else 0), text, report


def failure_record(config: ExperimentConfig, report: Report) -> str:
    doc = {"command": config.command, "config_hash": config.config_hash, "seed": config.seed,
           "version": __version__, "failures": [c.record() for c in report.failures]}
    return json.dumps(doc, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="anewvec", description="Batch experiments and reports.")
    ap.add_argument("command", nargs="?", help="experiment to run (see --list)")
    ap.add_argument("--list", action="store_true", help="list commands and their parameters")
    ap.add_argument("--config", metavar="PATH", help="flat key = value file")
    ap.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                    help="override one parameter (repeatable)")
    ap.add_argument("--seed", metavar="U64")
    ap.add_argument("--out", metavar="PATH")
    ap.add_argument("--format", metavar="{csv,json,svg}")
    ap.add_argument("--tolerance", metavar="FLOAT")
    return ap


def _listing() -> str:
    lines = []
    for cmd in COMMANDS.values():
        tol = "" if cmd.tolerance is None else f" [tolerance {cmd.tolerance:g}]"
        lines.append(f"{cmd.name}: {cmd.help}{tol}")
        for k, spec in cmd.params.items():
            note = f"  ({spec.help})" if spec.help else ""
            lines.append(f"    {k} = {spec.default}{note}")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.list:
        sys.stdout.write(_listing())
        return 0
    try:
        if not args.command:
            raise ConfigError("no command given")
        file_values = read_config(args.config) if args.config else {}
        overrides = {}
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            overrides[k.strip()] = v.strip()
        for key in GLOBAL_KEYS:
            val = getattr(args, key)
            if val is not None:
                overrides[key] = val
        config = resolve(args.command, file_values, overrides)
        status, text, report = run(config)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8", newline="")
        if status:
            Path(config.out + ".failures.json").write_text(failure_record(config, report),
                                                           encoding="utf-8")
    else:
        sys.stdout.write(text)
    if status:
        sys.stderr.write(failure_record(config, report))
    return status


if __name__ == "__main__":
    raise SystemExit(main())
