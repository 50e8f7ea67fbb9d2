"""``lagrax`` command-line interface.

Exit codes: 0 success, 1 mathematical failure (degenerate data, nonzero
residual, non-exactness, truncation), 2 usage error (bad flags, unreadable
or malformed input). Errors go to stderr as ``{"error": {"code", "message"}}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .. import __version__
from ..discvar import (
    DegenerateDiscreteLagrangian,
    alpha_form,
    check_nondegenerate,
    decomposition_residual,
    discrete_euler,
    discrete_hamilton_equations,
    discrete_momenta,
)
from ..jetalg import ChartVar, NotExactError, ShiftCoord, density_normal_form, euler, is_exact
from ..psido import (
    RootError,
    TruncationError,
    compose,
    default_depth,
    lax_rhs,
    power,
    root,
    trace_density,
)
from ..varred import (
    CanonicalChart,
    ChartUnavailable,
    DegenerateLagrangianError,
    LagrangianDensity,
    NonFiniteStateError,
    hamilton_equations,
    hamiltonian_x,
    integrate_reduced,
    momenta,
    poisson_bracket,
    symmetry_hamiltonian,
)
from ..zerocurv import (
    FIELD_NAMES,
    VAR_NAMES,
    InconsistentRulesError,
    MissingRuleError,
    SpectralMatrix,
    curvature,
    ds_instantiate,
    ds_verify,
    graded_residuals,
    prolong,
    run_mutations,
)
from .grammar import Declarations, ExprDocument, GrammarError, parse
from .kdv import kdv_demo
from .render import (
    dumps,
    expr_payload,
    input_digest,
    matrix_payload,
    naming_for,
    psido_payload,
    to_latex,
)

USAGE, MATH = 2, 1


class CliError(Exception):
    def __init__(self, code: str, message: str, exit_code: int = USAGE):
        super().__init__(message)
        self.code = code
        self.message = message
        self.exit_code = exit_code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", f"{self.prog}: {message}")


@dataclass
class Outcome:
    """What a command produced: a JSON report or raw text, plus an exit code."""

    report: dict | None = None
    text: str | None = None
    exit_code: int = 0


# -- input helpers ----------------------------------------------------------------

def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError("io_error", f"cannot read {path}: {exc.strerror or exc}") from exc


def _document(path: str, inputs: list, label: str) -> ExprDocument:
    data = _read(path)
    inputs.append((label, data))
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CliError("encoding_error", f"{path} is not valid UTF-8") from exc
    try:
        return parse(text)
    except GrammarError as exc:
        raise CliError(exc.code, f"{path}: {exc}") from exc


def _first(doc: ExprDocument, kind: str, path: str):
    found = doc.find(kind)
    if not found:
        raise CliError("missing_form", f"{path}: no ({kind} ...) form")
    return found[0]


def _report(command: str, inputs: list, outputs: dict, residuals: list, ok: bool) -> dict:
    return {
        "command": command,
        "input_digest": input_digest(inputs),
        "ok": ok,
        "outputs": outputs,
        "residuals": residuals,
    }


def _depth(args) -> int:
    if args.depth is not None:
        if args.depth < 0:
            raise CliError("usage", "--depth must be nonnegative")
        return args.depth
    try:
        return default_depth()
    except ValueError as exc:
        raise CliError("usage", str(exc)) from exc


def _params(pairs) -> dict:
    out = {}
    for item in pairs or []:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise CliError("usage", f"--param expects name=value, got {item!r}")
        try:
            out[name] = Fraction(value)
        except ValueError as exc:
            raise CliError("usage", f"--param {name}: {value!r} is not a number") from exc
    return out


def _floats(source: str, what: str) -> list:
    if os.path.exists(source):
        source = _read(source).decode("utf-8")
    try:
        return [float(v) for v in source.replace("\n", ",").split(",") if v.strip()]
    except ValueError as exc:
        raise CliError("usage", f"{what}: expected comma-separated numbers") from exc


# -- reduce -----------------------------------------------------------------------

def _chart_name(v: ChartVar) -> str:
    return f"{v.kind}{v.field}_{v.index}"


def cmd_reduce(args) -> Outcome:
    inputs: list = []
    doc = _document(args.lagrangian, inputs, "lagrangian")
    decl = doc.decl
    if len(decl.variables) != 1:
        raise CliError("usage", "reduce needs exactly one independent variable")
    dens = _first(doc, "density", args.lagrangian).value
    try:
        L = LagrangianDensity(dens, len(decl.fields))
    except DegenerateLagrangianError as exc:
        raise CliError("degenerate_lagrangian", str(exc), MATH) from exc
    P = momenta(L)
    out: dict = {"N": L.N, "arity": L.arity}
    rows: list = []  # (label, Poly) for text/latex output
    emit = set(args.emit)
    if "momenta" in emit:
        ps = {}
        for j in range(L.N + 1):
            for i in range(L.arity):
                key = f"p{i}_{j}"
                ps[key] = expr_payload(P[j][i], decl)
                rows.append((key, P[j][i]))
        out["momenta"] = ps
    H = None
    if "hamiltonian" in emit or "equations" in emit:
        H = hamiltonian_x(L, P)
    if "hamiltonian" in emit:
        out["hamiltonian_x"] = {
            "jet": expr_payload(H.jet_form, decl),
            "chart": expr_payload(H.chart_form, decl) if H.chart_form is not None else None,
            "chart_unavailable": H.unavailable_reason,
        }
        rows.append(("h_x", H.jet_form))
        if H.chart_form is not None:
            rows.append(("h_x (chart)", H.chart_form))
        sym = doc.find("symmetry")
        if sym:
            K = list(sym[0].value)
            try:
                ht = symmetry_hamiltonian(L, K)
            except NotExactError as exc:
                raise CliError("not_exact", f"<E(L), K> is not a total derivative: {exc}", MATH) from exc
            except ValueError as exc:
                raise CliError("usage", str(exc)) from exc
            entry = {"jet": expr_payload(ht, decl)}
            rows.append(("h_t", ht))
            if H.chart_form is not None:
                try:
                    htc = CanonicalChart(L, P).to_chart(ht, onshell=True)
                except ChartUnavailable as exc:
                    entry["chart_unavailable"] = str(exc)
                else:
                    br = poisson_bracket(htc, H.chart_form)
                    entry["chart"] = expr_payload(htc, decl)
                    entry["bracket_with_h_x"] = expr_payload(br, decl)
                    rows.append(("h_t (chart)", htc))
                    rows.append(("{h_t, h_x}", br))
            out["hamiltonian_t"] = entry
    if "equations" in emit:
        E = [euler(L.density, i) for i in range(L.arity)]
        out["euler"] = [expr_payload(e, decl) for e in E]
        rows += [(f"E{i}", e) for i, e in enumerate(E)]
        if H.chart_form is None:
            raise CliError("chart_unavailable", H.unavailable_reason or "no canonical chart", MATH)
        sysm = hamilton_equations(H.chart_form)
        eqs = {}
        for (f, j), a, b in zip(sysm.pairs, sysm.dq, sysm.dp):
            eqs[f"dq{f}_{j}/ds"] = expr_payload(a, decl)
            eqs[f"dp{f}_{j}/ds"] = expr_payload(b, decl)
            rows += [(f"dq{f}_{j}/ds", a), (f"dp{f}_{j}/ds", b)]
        out["hamilton_equations"] = eqs
    report = _report("reduce", inputs, out, [], True)
    if args.format == "json":
        return Outcome(report)
    naming = naming_for(decl)
    if args.format == "text":
        return Outcome(text="".join(f"{k} = {expr_payload(v, decl)['text']}\n" for k, v in rows))
    lines = [f"{_latex_label(k)} &= {to_latex(v, naming)} \\\\" for k, v in rows]
    return Outcome(text="\\begin{aligned}\n" + "\n".join(lines) + "\n\\end{aligned}\n")


def _latex_label(k: str) -> str:
    k = k.replace(" (chart)", "^{\\mathrm{chart}}").replace("{h_t, h_x}", "\\{h_t, h_x\\}")
    return k


# -- integrate --------------------------------------------------------------------

def cmd_integrate(args) -> Outcome:
    inputs: list = []
    doc = _document(args.system, inputs, "system")
    if doc.find("hamiltonian"):
        h = doc.find("hamiltonian")[0].value
    else:
        dens = _first(doc, "density", args.system).value
        try:
            H = hamiltonian_x(LagrangianDensity(dens, len(doc.decl.fields)))
        except DegenerateLagrangianError as exc:
            raise CliError("degenerate_lagrangian", str(exc), MATH) from exc
        if H.chart_form is None:
            raise CliError("chart_unavailable", H.unavailable_reason, MATH)
        h = H.chart_form
    if h.jets():
        raise CliError("usage", "the Hamiltonian must be written in chart variables (q f j) and (p f j)")
    params = _params(args.param)
    missing = sorted(v.name for v in h.variables() if not isinstance(v, (ChartVar,)) and hasattr(v, "name") and v.name not in params)
    if missing:
        raise CliError("usage", f"unbound parameters: {', '.join(missing)} (use --param name=value)")
    system = hamilton_equations(h)
    state = _floats(args.state, "--state")
    if args.steps < 0 or not args.step > 0:
        raise CliError("usage", "--step must be positive and --steps nonnegative")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s"] + [_chart_name(c) for c in system.coordinates] + ["h"])
    try:
        traj = integrate_reduced(system, state, args.step, args.steps, params)
        code = 0
    except ValueError as exc:
        raise CliError("usage", str(exc)) from exc
    except NonFiniteStateError as exc:
        traj, code = exc.trajectory, MATH
        print(dumps({"error": {"code": "non_finite", "message": str(exc)}}), end="", file=sys.stderr)
    for s, x, e in zip(traj.s, traj.states, traj.energy):
        writer.writerow([repr(float(s))] + [repr(float(v)) for v in x] + [repr(float(e))])
    return Outcome(text=buf.getvalue(), exit_code=code)


# -- discrete-reduce --------------------------------------------------------------

def _shift_name(v: ShiftCoord, decl: Declarations) -> str:
    f = decl.fields[v.field]
    return f"d{f}[n]" if v.shift == 0 else f"d{f}[n{v.shift:+d}]"


def cmd_discrete(args) -> Outcome:
    inputs: list = []
    doc = _document(args.lagrangian, inputs, "lagrangian")
    decl = doc.decl
    L = _first(doc, "density", args.lagrangian).value
    if L.jets():
        raise CliError("usage", "discrete densities use lattice values (s f k), not jets")
    m = len(decl.fields)
    out: dict = {}
    residuals = []
    try:
        res = decomposition_residual(L)
        for v, r in res.items():
            residuals.append({"component": _shift_name(v, decl), "value": expr_payload(r, decl)})
        emit = set(args.emit)
        if "grad" in emit or "equations" in emit:
            grads = [discrete_euler(L, f) for f in range(m)]
            if "grad" in emit:
                out["grad"] = [expr_payload(g, decl) for g in grads]
            if "equations" in emit:
                out["euler_lagrange"] = [f"{expr_payload(g, decl)['prefix']} = 0" for g in grads]
                ham = doc.find("hamiltonian")
                if ham:
                    sysd = discrete_hamilton_equations(ham[0].value)
                    out["hamilton_equations"] = {
                        f"{decl.fields[f]}[{j}]": {"du/dt": expr_payload(a, decl), "dp/dt": expr_payload(b, decl)}
                        for (f, j), a, b in zip(sysd.pairs, sysd.du, sysd.dp)
                    }
        if "alpha" in emit:
            out["alpha"] = {_shift_name(v, decl): expr_payload(c, decl) for v, c in alpha_form(L).items()}
        if "momenta" in emit:
            check_nondegenerate(L, m)
            P = discrete_momenta(L, m)
            out["momenta"] = {
                f"p{i}[n{j:+d}]" if j else f"p{i}[n]": expr_payload(P[j][i], decl)
                for j in range(len(P))
                for i in range(m)
            }
    except DegenerateDiscreteLagrangian as exc:
        raise CliError("degenerate_lagrangian", str(exc), MATH) from exc
    except (TypeError, ValueError) as exc:
        raise CliError("usage", str(exc)) from exc
    ok = not residuals
    return Outcome(_report("discrete-reduce", inputs, out, residuals, ok), exit_code=0 if ok else MATH)


# -- psido ------------------------------------------------------------------------

def cmd_psido(args) -> Outcome:
    inputs: list = [("op", args.op.encode()), ("depth", str(_depth(args)).encode())]
    depth = _depth(args)
    doc = _document(args.input, inputs, "input")
    decl = doc.decl
    ops = [f.value for f in doc.find("operator")]
    if not ops:
        raise CliError("missing_form", f"{args.input}: no (operator ...) form")
    out: dict = {"depth": depth}
    try:
        if args.op == "compose":
            if len(ops) < 2:
                raise CliError("usage", "compose needs at least two operators")
            acc = ops[0]
            for b in ops[1:]:
                acc = compose(acc, b, depth)
            out["result"] = psido_payload(acc, decl)
        elif args.op == "trace":
            td = trace_density(ops[0]).density
            out["trace_density"] = expr_payload(td, decl)
            if len(decl.variables) == 1:
                out["exact"] = is_exact(td)
                if len(decl.fields) == 1 or len({v.field for v in td.jets()}) <= 1:
                    out["normal_form"] = expr_payload(density_normal_form(td), decl)
        elif args.op == "root":
            r = root(ops[0], args.index, depth)
            out["index"] = args.index
            out["result"] = psido_payload(r, decl)
        elif args.op == "lax":
            l = ops[0]
            gen = ops[1] if len(ops) > 1 else power(root(l, args.index, depth), args.power, depth)
            rhs = lax_rhs(l, gen, depth)
            out["result"] = psido_payload(rhs, decl)
            if set(rhs.coeffs) <= {0}:
                out["flow"] = matrix_payload(rhs.coeff(0), decl)
    except TruncationError as exc:
        raise CliError("truncation", str(exc), MATH) from exc
    except RootError as exc:
        raise CliError("root_error", str(exc), MATH) from exc
    except ValueError as exc:
        raise CliError("usage", str(exc)) from exc
    return Outcome(_report(f"psido {args.op}", inputs, out, [], True))


# -- zero curvature ---------------------------------------------------------------

def _var_index(decl: Declarations, name: str) -> int:
    if name in decl.variables:
        return decl.variables.index(name)
    if name.isdigit() and int(name) < len(decl.variables):
        return int(name)
    raise CliError("undeclared_symbol", f"independent variable {name!r} is not declared")


def _residual_entries(res: list, decl: Declarations) -> list:
    return [
        {"pair": r.pair, "row": r.row, "col": r.col, "lam_power": r.lam_power, "value": expr_payload(r.value, decl)}
        for r in res
    ]


def cmd_zc_check(args) -> Outcome:
    inputs: list = []
    dU = _document(args.U, inputs, "U")
    dW = _document(args.W, inputs, "W")
    dR = _document(args.rules, inputs, "rules")
    docs = [dU, dW, dR]
    dC = _document(args.constraints, inputs, "constraints") if args.constraints else None
    if dC:
        docs.append(dC)
    decl = dU.decl
    for d in docs[1:]:
        if (d.decl.fields, d.decl.variables) != (decl.fields, decl.variables):
            raise CliError("usage", "all input files must declare the same fields and variables")
    inputs.append(("base", args.base.encode()))
    inputs.append(("flow", args.flow.encode()))
    base, flow = _var_index(decl, args.base), _var_index(decl, args.flow)
    U = SpectralMatrix(_first(dU, "matrix", args.U).value)
    W = SpectralMatrix(_first(dW, "matrix", args.W).value)
    rules = {f.extra: f.value for f in dR.find("rule")}
    try:
        R = prolong(rules)
        M = curvature(U, W, base, flow, R, decl.fields)
    except InconsistentRulesError as exc:
        raise CliError("inconsistent_rules", str(exc), MATH) from exc
    except MissingRuleError as exc:
        raise CliError("missing_rule", str(exc), MATH) from exc
    except ValueError as exc:
        raise CliError("usage", str(exc)) from exc
    pair = f"{decl.variables[base]}-{decl.variables[flow]}"
    residuals = _residual_entries(graded_residuals(M, pair), decl)
    if dC:
        for k, f in enumerate(dC.find("constraint")):
            r = R.reduce(f.value)
            if r:
                residuals.append(
                    {"pair": f"constraint {f.name or k + 1}", "row": 0, "col": 0, "lam_power": 0,
                     "value": expr_payload(r, decl)}
                )
    ok = not residuals
    out = {"base": decl.variables[base], "flow": decl.variables[flow], "size": U.size}
    return Outcome(_report("zc-check", inputs, out, residuals, ok), exit_code=0 if ok else MATH)


def cmd_ds_verify(args) -> Outcome:
    inputs = [("printed", str(bool(args.printed)).encode()), ("mutations", str(bool(args.mutations)).encode())]
    data = ds_instantiate(printed=args.printed)
    rep = ds_verify(data)
    decl = Declarations(list(FIELD_NAMES), list(VAR_NAMES), ["lam"])
    out: dict = {"pairs": ["x-y", "x-t"], "corrections": list(rep.notes), "printed": bool(args.printed)}
    ok = rep.ok
    if args.mutations:
        results = run_mutations()
        out["mutations"] = {name: detected for name, detected in results}
        out["mutation_kill_rate"] = sum(d for _, d in results) / len(results)
        ok = ok and all(d for _, d in results)
    residuals = _residual_entries(rep.residuals, decl)
    return Outcome(_report("ds-verify", inputs, out, residuals, ok), exit_code=0 if ok else MATH)


# -- kdv demo ---------------------------------------------------------------------

def cmd_kdv_demo(args) -> Outcome:
    try:
        c0, c1 = Fraction(args.c0), Fraction(args.c1)
    except ValueError as exc:
        raise CliError("usage", "--c0/--c1 must be rational numbers") from exc
    state = _floats(args.state, "--state")
    if len(state) != 2:
        raise CliError("usage", "--state needs two values q,p")
    depth = _depth(args) if args.depth is not None else 6
    inputs = [(k, str(v).encode()) for k, v in
              [("c0", c0), ("c1", c1), ("state", state), ("step", args.step), ("steps", args.steps), ("depth", depth)]]
    try:
        d = kdv_demo(c0, c1, state, args.step, args.steps, depth)
    except NonFiniteStateError as exc:
        raise CliError("non_finite", str(exc), MATH) from exc
    decl = Declarations(["u"], ["x"], ["c0", "c1"])
    out = {
        "gamma": [expr_payload(g, decl) for g in d.densities],
        "lagrangian": expr_payload(d.lagrangian.density, decl),
        "momenta": [expr_payload(p[0], decl) for p in d.momenta],
        "hamiltonian_x": {"jet": expr_payload(d.h_x, decl), "chart": expr_payload(d.h_x_chart, decl)},
        "flow": expr_payload(d.flow, decl),
        "hamiltonian_t": {"jet": expr_payload(d.h_t, decl), "chart": expr_payload(d.h_t_chart, decl)},
        "bracket_t_x": expr_payload(d.bracket, decl),
        "numerics": {
            "c0": str(c0),
            "c1": str(c1),
            "state0": state,
            "step": args.step,
            "steps": args.steps,
            "h_start": float(d.trajectory.energy[0]),
            "h_end": float(d.trajectory.energy[-1]),
            "drift": d.drift,
            "tolerance": args.tol,
        },
    }
    residuals = []
    if d.drift > args.tol:
        residuals.append({"check": "energy drift", "value": d.drift})
    if d.bracket:
        residuals.append({"check": "{h_t, h_x}", "value": expr_payload(d.bracket, decl)})
    ok = not residuals
    return Outcome(_report("kdv-demo", inputs, out, residuals, ok), exit_code=0 if ok else MATH)


# -- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lagrax", description="Variational reduction and Lax-hierarchy workbench.")
    p.add_argument("--version", action="version", version=f"lagrax {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--timing", action="store_true", help="add wall-clock timing to JSON reports")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reduce", parents=[common], help="momenta, Hamiltonians and equations of a Lagrangian density")
    r.add_argument("--lagrangian", required=True)
    r.add_argument("--emit", nargs="+", choices=["momenta", "hamiltonian", "equations"],
                   default=["momenta", "hamiltonian", "equations"])
    r.add_argument("--format", choices=["json", "latex", "text"], default="json")
    r.set_defaults(fn=cmd_reduce)

    i = sub.add_parser("integrate", parents=[common], help="RK4 integration of a chart Hamiltonian (CSV output)")
    i.add_argument("--system", required=True)
    i.add_argument("--state", required=True, help="comma-separated q..., p... or a file holding them")
    i.add_argument("--step", type=float, required=True)
    i.add_argument("--steps", type=int, required=True)
    i.add_argument("--param", action="append", metavar="NAME=VALUE")
    i.set_defaults(fn=cmd_integrate)

    d = sub.add_parser("discrete-reduce", parents=[common], help="lattice Euler-Lagrange data")
    d.add_argument("--lagrangian", required=True)
    d.add_argument("--emit", nargs="+", choices=["grad", "alpha", "momenta", "equations"],
                   default=["grad", "alpha", "momenta"])
    d.set_defaults(fn=cmd_discrete)

    s = sub.add_parser("psido", parents=[common], help="pseudo-differential operator algebra")
    s.add_argument("op", choices=["compose", "trace", "root", "lax"])
    s.add_argument("--input", required=True)
    s.add_argument("--depth", type=int, default=None, help="truncation depth (default: LAGRAX_DEPTH or 4)")
    s.add_argument("--index", type=int, default=2, help="root index m")
    s.add_argument("--power", type=int, default=3, help="lax: generator is root^power")
    s.set_defaults(fn=cmd_psido)

    z = sub.add_parser("zc-check", parents=[common], help="zero-curvature residuals of a Lax pair")
    z.add_argument("--U", required=True)
    z.add_argument("--W", required=True)
    z.add_argument("--base", default="x")
    z.add_argument("--flow", default="t")
    z.add_argument("--rules", required=True)
    z.add_argument("--constraints")
    z.set_defaults(fn=cmd_zc_check)

    v = sub.add_parser("ds-verify", parents=[common], help="certify the Davey-Stewartson triple linearization")
    v.add_argument("--mutations", action="store_true", help="also run the single-edit mutation suite")
    v.add_argument("--printed", action="store_true", help="check the uncorrected matrices instead")
    v.set_defaults(fn=cmd_ds_verify)

    k = sub.add_parser("kdv-demo", parents=[common], help="stationary KdV reduction and conservation run")
    k.add_argument("--c0", default="0")
    k.add_argument("--c1", default="-8")
    k.add_argument("--state", default="1,0")
    k.add_argument("--step", type=float, default=1e-3)
    k.add_argument("--steps", type=int, default=1000)
    k.add_argument("--tol", type=float, default=1e-8)
    k.add_argument("--depth", type=int, default=None)
    k.set_defaults(fn=cmd_kdv_demo)
    return p


def _emit_error(code: str, message: str) -> None:
    sys.stderr.write(dumps({"error": {"code": code, "message": message}}))


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        t0 = time.perf_counter()
        outcome = args.fn(args)
        elapsed = time.perf_counter() - t0
    except CliError as exc:
        _emit_error(exc.code, exc.message)
        return exc.exit_code
    if outcome.report is not None:
        if args.timing:
            outcome.report["timing"] = {"seconds": round(elapsed, 6)}
        sys.stdout.write(dumps(outcome.report))
    elif outcome.text is not None:
        sys.stdout.write(outcome.text)
    return outcome.exit_code


__all__ = ["CliError", "build_parser", "main"]
