"""Command-line front end.

Every command reads a JSON job description (``--input FILE`` or inline
``--params JSON``) and writes a long-format table with one value per row:

    module, operation, quantity, index, value, unit

Exit codes: 0 success, 2 input/parse error, 3 numeric failure, 4 a regime
warning was raised and ``--strict`` was given.  Warnings go to stderr.

Input schema (exactly one environment key when an environment is needed)::

    {"units": "SI" | "GHz-fF-nH",
     "foster":  {"c_inf": .., "branches": [[c_k, w_k], ..], "l0": ..},
     "network": {"node_count": n, "port": p,
                 "elements": [{"kind": "C", "value": .., "node_a": 0, "node_b": -1}, ..]},
     "tline":   {"z0": .., "length": .., "velocity": .., "x_j": ..,
                 "termination_left": "short", "termination_right": "open"},
     "junction": {"E_J_GHz": .. | "L_J_nH": .., "C_J_fF": ..},
     "transmon": {"e_j": .., "e_c": .., "n_g": 0},
     "rabi": {"omega_q": .., "omega_r": .., "g": ..},
     "twomode": {"e_j1": .., "e_j2": .., "e_c": .., "e_p": ..},   (always GHz)
     "options": {..}}

With ``GHz-fF-nH`` units capacitances are in fF, inductances in nH and
frequencies and energies in GHz (cyclic, ``E/h``); otherwise SI with
angular frequencies in rad/s and energies in J.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .constants import H_PLANCK, HBAR, PHI0
from .errors import CfqedError, RegimeWarning

__all__ = ["main", "run", "UnitSystem", "UNIT_SYSTEMS", "ParseError"]

EXIT_OK, EXIT_PARSE, EXIT_NUMERIC, EXIT_STRICT = 0, 2, 3, 4
COLUMNS = ("module", "operation", "quantity", "index", "value", "unit")


class ParseError(Exception):
    """Malformed job description."""


# ---------------------------------------------------------------------------
# units
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitSystem:
    """Scale factors from file units to SI (angular frequency, joules)."""

    name: str
    capacitance: float
    inductance: float
    frequency: float  # file frequency unit -> rad/s
    energy: float     # file energy unit -> J
    freq_label: str
    energy_label: str
    cap_label: str
    ind_label: str

    def to_si(self, kind: str, value: float) -> float:
        return value * getattr(self, kind)

    def from_si(self, kind: str, value: float) -> float:
        return value / getattr(self, kind)


UNIT_SYSTEMS = {
    "SI": UnitSystem("SI", 1.0, 1.0, 1.0, 1.0, "rad/s", "J", "F", "H"),
    "GHz-fF-nH": UnitSystem("GHz-fF-nH", 1e-15, 1e-9, 2.0 * math.pi * 1e9, H_PLANCK * 1e9,
                            "GHz", "GHz", "fF", "nH"),
}


# ---------------------------------------------------------------------------
# output table
# ---------------------------------------------------------------------------

@dataclass
class Table:
    rows: list = field(default_factory=list)

    def add(self, module, operation, quantity, value, unit="", index=0):
        self.rows.append((module, operation, quantity, int(index), float(value), unit))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([r[0], r[1], r[2], r[3], "{:.16e}".format(r[4]), r[5]])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [dict(zip(COLUMNS, r)) for r in self.rows]
        for r in rows:
            if not math.isfinite(r["value"]):
                r["value"] = repr(r["value"])
        return json.dumps({"version": __version__, "rows": rows}, indent=1, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# job parsing
# ---------------------------------------------------------------------------

def _load_job(args) -> dict:
    if args.input and args.params:
        raise ParseError("give either --input or --params, not both")
    try:
        if args.input:
            with open(args.input, encoding="utf-8") as fh:
                job = json.load(fh)
        elif args.params:
            job = json.loads(args.params)
        else:
            job = {}
    except OSError as exc:
        raise ParseError(f"cannot read input: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(job, dict):
        raise ParseError("job description must be a JSON object")
    units = args.units or job.get("units", "SI")
    if units not in UNIT_SYSTEMS:
        raise ParseError(f"unknown unit system {units!r}")
    job["units"] = units
    return job


def _num(d: dict, key: str, default=None, required=True):
    if key not in d:
        if required and default is None:
            raise ParseError(f"missing field {key!r}")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"field {key!r} must be a number")
    return float(v)


def _section(job, key):
    sec = job.get(key)
    if not isinstance(sec, dict):
        raise ParseError(f"missing section {key!r}")
    return sec


def _environment(job, us: UnitSystem):
    """Return ``("foster", FosterForm)`` or ``("tline", TLineEnvironment)``."""
    from .netfunc import Element, FosterForm, LumpedNetwork, TLineEnvironment, schur_reduce

    keys = [k for k in ("foster", "network", "tline") if k in job]
    if len(keys) != 1:
        raise ParseError("exactly one of 'foster', 'network', 'tline' is required")
    key = keys[0]
    sec = _section(job, key)
    c_j = _junction_cap(job, us)
    if key == "foster":
        br = sec.get("branches", [])
        if not isinstance(br, list) or not all(isinstance(b, list) and len(b) == 2 for b in br):
            raise ParseError("'branches' must be a list of [c_k, w_k] pairs")
        branches = [(us.to_si("capacitance", float(c)), us.to_si("frequency", float(w))) for c, w in br]
        l0 = _num(sec, "l0", required=False)
        return "foster", FosterForm(us.to_si("capacitance", _num(sec, "c_inf")) + c_j, branches,
                                    None if l0 is None else us.to_si("inductance", l0))
    if key == "network":
        els = sec.get("elements")
        if not isinstance(els, list) or not els:
            raise ParseError("'elements' must be a non-empty list")
        parsed = []
        for e in els:
            if not isinstance(e, dict):
                raise ParseError("each element must be an object")
            kind = e.get("kind")
            kind_unit = {"C": "capacitance", "L": "inductance"}.get(kind)
            if kind_unit is None:
                raise ParseError(f"element kind must be 'C' or 'L', got {kind!r}")
            parsed.append(Element(kind, us.to_si(kind_unit, _num(e, "value")), int(e.get("node_a", 0)),
                                  int(e.get("node_b", -1))))
        net = LumpedNetwork(int(_num(sec, "node_count")), tuple(parsed))
        y = schur_reduce(net, int(_num(sec, "port", 0.0)))
        if c_j:
            y = FosterForm(y.c_inf + c_j, y.branches, y.l0)
        return "foster", y
    term_l = sec.get("termination_left", "short")
    term_r = sec.get("termination_right", "open")
    env = TLineEnvironment(_num(sec, "z0"), _num(sec, "length"), _num(sec, "velocity"),
                           _num(sec, "x_j"), c_j, term_l, term_r)
    return "tline", env


def _junction_cap(job, us) -> float:
    j = job.get("junction", {})
    if "C_J_fF" in j:
        return _num(j, "C_J_fF") * 1e-15
    return 0.0


def _junction_lj(job) -> float:
    j = _section(job, "junction")
    if "L_J_nH" in j:
        return _num(j, "L_J_nH") * 1e-9
    if "E_J_GHz" in j:
        e_j = _num(j, "E_J_GHz") * 1e9 * H_PLANCK
        return PHI0 ** 2 / e_j
    raise ParseError("junction needs 'L_J_nH' or 'E_J_GHz'")


def _dressed(job, us, n_modes):
    from .boundary import BoundaryProblem, solve_dressed, spatial_modes

    kind, env = _environment(job, us)
    l_j = _junction_lj(job)
    if kind == "tline":
        return spatial_modes(env, l_j, n_modes), None
    return solve_dressed(BoundaryProblem(env, l_j)), env


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_synth(job, args, us, out: Table):
    from .jacobi import eigenvalues
    from .netfunc import check_positive_real, tline_foster
    from .synthesis import cauer_expand, cauer_to_jacobi

    kind, y = _environment(job, us)
    if kind == "tline":
        y = tline_foster(y, int(job.get("options", {}).get("n_modes", 20)))
    rep = check_positive_real(y, abs_tol=args.tol if args.tol is not None else 1e-12)
    out.add("netfunc", "check_positive_real", "is_pr", float(rep.is_pr))
    out.add("netfunc", "check_positive_real", "min_re", rep.min_re, "S")
    variant = "TypeII" if y.c_inf > 0.0 else "TypeI"
    lad = cauer_expand(y, variant)
    if lad.leading_c0:
        out.add("synthesis", "cauer_expand", "c0", us.from_si("capacitance", lad.leading_c0), us.cap_label)
    for i, (l, c) in enumerate(lad.sections):
        out.add("synthesis", "cauer_expand", "L", us.from_si("inductance", l), us.ind_label, i)
        out.add("synthesis", "cauer_expand", "C", us.from_si("capacitance", c), us.cap_label, i)
    if lad.l_tail is not None:
        out.add("synthesis", "cauer_expand", "l_tail", us.from_si("inductance", lad.l_tail), us.ind_label)
    j = cauer_to_jacobi(lad)
    for i, a in enumerate(j.diag):
        out.add("synthesis", "cauer_to_jacobi", "a", a, "rad2/s2", i)
    for i, b in enumerate(j.offdiag):
        out.add("synthesis", "cauer_to_jacobi", "b", b, "rad2/s2", i)
    for i, e in enumerate(eigenvalues(j)):
        w = math.sqrt(max(e, 0.0))
        out.add("jacobi", "eigenvalues", "omega", us.from_si("frequency", w), us.freq_label, i)


def cmd_modes(job, args, us, out: Table):
    from .quantize import quantize_modes

    n = int(job.get("options", {}).get("n_modes", 10))
    dm, _ = _dressed(job, us, n)
    for i, (w, p2, m) in enumerate(zip(dm.omega, dm.participation_sq, quantize_modes(dm))):
        out.add("boundary", "solve_dressed", "omega", us.from_si("frequency", w), us.freq_label, i)
        out.add("boundary", "solve_dressed", "participation_sq", p2, "1/F", i)
        out.add("boundary", "solve_dressed", "c_eff", us.from_si("capacitance", 1.0 / p2), us.cap_label, i)
        out.add("quantize", "quantize_modes", "lambda", m.lambda_n, "", i)
    out.add("boundary", "solve_dressed", "qubit_index", dm.qubit_index)


def cmd_quantize(job, args, us, out: Table):
    from .quantize import (TruncationScheme, build_hamiltonian, default_truncation, lowest_eigenpairs,
                           quantize_modes)

    opts = job.get("options", {})
    dm, _ = _dressed(job, us, int(opts.get("n_modes", 10)))
    k = int(opts.get("quantized_modes", 1))
    modes = quantize_modes(dm)
    if k == 1:
        modes = [modes[dm.qubit_index]]
    else:
        modes = modes[:k]
    e_j = PHI0 ** 2 / _junction_lj(job)
    trunc = default_truncation(max(m.lambda_n for m in modes))
    if args.nmax is not None or args.bandP is not None:
        trunc = TruncationScheme(args.nmax or trunc.n_max, args.bandP or trunc.p_band)
    levels = []
    for par in ("even", "odd"):
        h = build_hamiltonian(modes, e_j, trunc, par, counterterm=bool(opts.get("counterterm", True)))
        levels.extend(lowest_eigenpairs(h, int(opts.get("n_levels", 4)))[0])
    levels = np.sort(np.array(levels))
    for i, e in enumerate(levels[: int(opts.get("n_levels", 4))]):
        out.add("quantize", "build_hamiltonian", "level", us.from_si("frequency", (e - levels[0]) / HBAR),
                us.freq_label, i)
    out.add("quantize", "default_truncation", "n_max", trunc.n_max)
    out.add("quantize", "default_truncation", "p_band", trunc.p_band)


def _transmon_params(job, args, us):
    from .spectra import TransmonParams

    sec = _section(job, "transmon")
    e_j = _num(sec, "e_j")
    e_c = _num(sec, "e_c")
    return TransmonParams(e_j, e_c, _num(sec, "n_g", 0.0), args.ncut or int(sec.get("n_cut", 40)))


def _energy_out(us, e):
    # energies in the file unit; SI output of a transition is given as angular frequency
    return (e, us.energy_label) if us.name != "SI" else (e / HBAR, "rad/s")


def _transmon_rows(p, us, out: Table):
    from .spectra import transmon_observables

    o = transmon_observables(p)
    for key in ("omega01", "alpha"):
        v, unit = _energy_out(us, o[key])
        out.add("spectra", "transmon_observables", key, v, unit)
    for key in ("n01", "n12", "n_ratio"):
        out.add("spectra", "transmon_observables", key, o[key])
    return o


def _rabi_params(job, args):
    from .spectra import RabiParams

    sec = _section(job, "rabi")
    return RabiParams(_num(sec, "omega_q"), _num(sec, "omega_r"), _num(sec, "g"),
                      args.nmax or (int(sec["n_max"]) if "n_max" in sec else None))


def _rabi_rows(p, out: Table, n_levels=6):
    from .spectra import dressed_matrix_elements, rabi_spectrum

    s = rabi_spectrum(p, n_levels)
    for i, (e, par) in enumerate(zip(s.energies, s.parity)):
        out.add("spectra", "rabi_spectrum", "energy", e, "", i)
        out.add("spectra", "rabi_spectrum", "parity", s.parity_expectation(i), "", i)
    out.add("spectra", "rabi_spectrum", "epsilon", s.energies[1] - s.energies[0])
    out.add("spectra", "dressed_matrix_elements", "X01", dressed_matrix_elements(s, "X", 0, 1))
    return s


def _model(job, args):
    if args.model:
        return args.model
    found = [m for m in ("transmon", "rabi", "twomode") if m in job]
    if len(found) != 1:
        raise ParseError("specify --model or give exactly one model section")
    return found[0]


def cmd_spectrum(job, args, us, out: Table):
    model = _model(job, args)
    if model == "transmon":
        from .spectra import transmon_spectrum

        p = _transmon_params(job, args, us)
        s = transmon_spectrum(p, int(job.get("options", {}).get("n_levels", 6)))
        for i, e in enumerate(s.energies):
            v, unit = _energy_out(us, e - s.energies[0])
            out.add("spectra", "transmon_spectrum", "level", v, unit, i)
        _transmon_rows(p, us, out)
    elif model == "rabi":
        _rabi_rows(_rabi_params(job, args), out)
    elif model == "twomode":
        cmd_twomode(job, args, us, out)
    else:
        raise ParseError(f"unknown model {model!r}")


def cmd_observables(job, args, us, out: Table):
    from .dissipation import design_bounds, gamma1_over_delta, phi_sq_from_alpha, purcell_single
    from .spectra import bloch_siegert, koch_design_g01, rabi_ground_photons

    done = False
    if "transmon" in job:
        _transmon_rows(_transmon_params(job, args, us), us, out)
        done = True
    if "rabi" in job:
        p = _rabi_params(job, args)
        _rabi_rows(p, out)
        out.add("spectra", "rabi_ground_photons", "nbar0", rabi_ground_photons(p))
        out.add("spectra", "bloch_siegert", "shift", bloch_siegert(p.g, p.omega_q, p.omega_r))
        done = True
    if "koch" in job:
        k = _section(job, "koch")
        d = koch_design_g01(_num(k, "ej_over_ec"), _num(k, "omega01"), _num(k, "omega_r"), _num(k, "chi"),
                            n_cut=args.ncut or 40)
        for key in ("g01", "g12", "e_c", "alpha"):
            out.add("spectra", "koch_design_g01", key, d[key])
        done = True
    if "purcell" in job:
        s = _section(job, "purcell")
        out.add("dissipation", "purcell_single", "gamma",
                purcell_single(_num(s, "g"), _num(s, "delta"), _num(s, "kappa")))
        done = True
    if "spin_boson" in job:
        s = _section(job, "spin_boson")
        a = _num(s, "alpha")
        z0 = _num(s, "z0", 50.0)
        out.add("dissipation", "gamma1_over_delta", "gamma1_over_delta", gamma1_over_delta(a))
        out.add("dissipation", "phi_sq_from_alpha", "phi_beta_sq", phi_sq_from_alpha(a, z0))
        if "t1" in s and "delta" in s:
            b = design_bounds(_num(s, "t1"), _num(s, "delta"), z0)
            out.add("dissipation", "design_bounds", "alpha_max", b["alpha_max"])
            out.add("dissipation", "design_bounds", "phi_sq_max", b["phi_sq_max"])
        done = True
    if not done:
        raise ParseError("no observable section (transmon, rabi, koch, purcell, spin_boson) given")


def cmd_twomode(job, args, us, out: Table):
    from .mcf import OBSERVABLES, TwoModeParams, fit_twomode, perturbative_cross_kerr, twomode_observables

    # the two-mode model is parameterised in GHz (E/h) in every unit system
    sec = _section(job, "twomode")
    p = TwoModeParams(_num(sec, "e_j1"), _num(sec, "e_j2"), _num(sec, "e_c"), _num(sec, "e_p"),
                      args.ncut or int(sec.get("n_cut", 12)))
    if "targets" in job:
        t = _section(job, "targets")
        targets = {k: _num(t, k) for k in OBSERVABLES if k in t}
        fit = fit_twomode(targets, p, seed=args.seed, n_starts=int(job.get("options", {}).get("n_starts", 4)))
        p = fit.params
        for key in ("e_j1", "e_j2", "e_c", "e_p"):
            out.add("mcf", "fit_twomode", key, getattr(p, key), "GHz")
        for key, r in fit.residuals.items():
            out.add("mcf", "fit_twomode", f"residual_{key}", r)
    o = twomode_observables(p)
    for key in OBSERVABLES:
        out.add("mcf", "twomode_observables", key, o[key], "GHz")
    out.add("mcf", "perturbative_cross_kerr", "eta_pert",
            perturbative_cross_kerr(abs(o["alpha_d"]), abs(o["alpha_q"])), "GHz")


def _axis_values(args):
    if args.values:
        try:
            vals = [float(x) for x in args.values.split(",") if x.strip()]
        except ValueError as exc:
            raise ParseError(f"bad --values: {exc}") from exc
    elif args.start is not None and args.stop is not None and args.step:
        n = int(math.floor((args.stop - args.start) / args.step + 1e-9)) + 1
        vals = [args.start + i * args.step for i in range(max(n, 0))]
    else:
        vals = []
    if not vals:
        raise ParseError("empty sweep axis")
    return vals


def _sweep_point(model, job, args, us, axis, value):
    import copy

    from .spectra import charge_dispersion

    sub = copy.deepcopy(job)
    t = Table()
    if model == "rabi":
        sub["rabi"][axis] = value
        _rabi_rows(_rabi_params(sub, args), t)
    elif model == "transmon":
        sec = sub["transmon"]
        if axis == "ej_over_ec":
            sec["e_j"] = value * sec["e_c"]
        else:
            sec[axis] = value
        p = _transmon_params(sub, args, us)
        _transmon_rows(p, us, t)
        v, unit = _energy_out(us, charge_dispersion(p.e_j, p.e_c, p.n_cut))
        t.add("spectra", "charge_dispersion", "charge_dispersion", v, unit)
    else:
        raise ParseError(f"sweep supports rabi and transmon, not {model!r}")
    return t.rows


def cmd_sweep(job, args, us, out: Table):
    model = _model(job, args)
    if not args.axis:
        raise ParseError("sweep needs --axis")
    vals = _axis_values(args)
    _section(job, model)

    def point(v):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                return _sweep_point(model, job, args, us, args.axis, v), None, caught
            except ParseError:
                raise
            except (CfqedError, ValueError, ArithmeticError) as exc:
                return [], exc, caught

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        results = list(pool.map(point, vals))
    for i, (v, (rows, exc, caught)) in enumerate(zip(vals, results)):
        out.add("cli", "sweep", args.axis, v, "", i)
        for w in caught:
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
        if exc is not None:
            out.add("cli", "sweep", "error", float("nan"), type(exc).__name__, i)
            continue
        for r in rows:
            out.rows.append((r[0], r[1], r[2], i, r[4], r[5]))


def cmd_plotdata(job, args, us, out: Table):
    from .boundary import BoundaryProblem, graphical_curve, spatial_modes
    from .netfunc import tline_admittance

    what = args.what
    opts = job.get("options", {})
    n = int(opts.get("points", 400))
    if what == "boundary":
        kind, env = _environment(job, us)
        l_j = _junction_lj(job)
        if kind == "tline":
            raise ParseError("plotdata boundary needs a lumped or Foster environment")
        p = BoundaryProblem(env, l_j)
        top = 1.5 * max([p.omega_p] + [w for _, w in env.branches])
        grid = np.linspace(top / n, top, n)
        curve = graphical_curve(p, grid)
        for i, (w, v) in enumerate(curve):
            out.add("boundary", "graphical_curve", "omega", us.from_si("frequency", w), us.freq_label, i)
            out.add("boundary", "graphical_curve", "omega_LJ_B", v, "", i)
    elif what == "participation":
        kind, env = _environment(job, us)
        if kind != "tline":
            raise ParseError("plotdata participation needs a 'tline' environment")
        dm = spatial_modes(env, _junction_lj(job), int(opts.get("n_modes", 200)))
        for i, (w, p2) in enumerate(zip(dm.omega, dm.participation_sq)):
            out.add("boundary", "spatial_modes", "omega", us.from_si("frequency", w), us.freq_label, i)
            out.add("boundary", "spatial_modes", "participation_sq", p2, "1/F", i)
    elif what == "admittance":
        kind, env = _environment(job, us)
        if kind != "tline":
            raise ParseError("plotdata admittance needs a 'tline' environment")
        w1 = math.pi * env.velocity / env.length
        for i, w in enumerate(np.linspace(w1 / 100.0, 5.0 * w1, n)):
            try:
                b = tline_admittance(env, w).imag
            except CfqedError:
                b = float("nan")
            out.add("netfunc", "tline_admittance", "omega", us.from_si("frequency", w), us.freq_label, i)
            out.add("netfunc", "tline_admittance", "B", b, "S", i)
    else:
        raise ParseError(f"unknown plotdata target {what!r}")


COMMANDS = {
    "synth": cmd_synth,
    "modes": cmd_modes,
    "quantize": cmd_quantize,
    "spectrum": cmd_spectrum,
    "observables": cmd_observables,
    "twomode": cmd_twomode,
    "sweep": cmd_sweep,
    "plotdata": cmd_plotdata,
}


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", help="JSON job file")
    common.add_argument("--params", help="inline JSON job description")
    common.add_argument("--output", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--units", choices=tuple(UNIT_SYSTEMS), default=None)
    common.add_argument("--strict", action="store_true", help="exit 4 on any regime warning")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--ncut", type=int)
    common.add_argument("--nmax", type=int)
    common.add_argument("--bandP", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--model", choices=("transmon", "rabi", "twomode"))

    parser = _Parser(prog="cfqed", description="Continued-fraction circuit spectra.")
    parser.add_argument("--version", action="version", version=f"cfqed {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "sweep":
            sp.add_argument("--axis")
            sp.add_argument("--start", type=float)
            sp.add_argument("--stop", type=float)
            sp.add_argument("--step", type=float)
            sp.add_argument("--values")
        if name == "plotdata":
            sp.add_argument("what", choices=("boundary", "participation", "admittance"))
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        job = _load_job(args)
    except ParseError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_PARSE
    us = UNIT_SYSTEMS[job["units"]]
    out = Table()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            COMMANDS[args.command](job, args, us, out)
        except ParseError as exc:
            print(f"error: {exc}", file=stderr)
            return EXIT_PARSE
        except CfqedError as exc:
            print(f"numeric failure: {type(exc).__name__}: {exc}", file=stderr)
            return EXIT_NUMERIC
        except (TypeError, KeyError) as exc:
            print(f"error: malformed input: {exc}", file=stderr)
            return EXIT_PARSE
        except ValueError as exc:
            print(f"error: invalid parameter: {exc}", file=stderr)
            return EXIT_PARSE
    regime = False
    for w in caught:
        print(f"warning: {w.category.__name__}: {w.message}", file=stderr)
        regime |= issubclass(w.category, RegimeWarning)
    text = out.to_csv() if args.format == "csv" else out.to_json()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if regime and args.strict:
        return EXIT_STRICT
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
