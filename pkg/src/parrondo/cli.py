"""Command-line front end: ``parrondo run | region | verify``.

Exit codes: 0 success, 1 a verified property failed, 2 invalid input,
3 a requested limit did not converge, 4 every cell of a region scan failed.
"""

import argparse
import io
import json
import sys
from importlib import resources

import jsonschema
import numpy as np

from . import classical as cl
from . import geodesic as geo
from . import hidden as hd
from . import quantum as qu
from . import walks as wk
from .linalg import ConvergenceError, ValidationError
from .region import ScanCell, region_scan
from .verify import SUITES, jsonable, run_suite

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_CONVERGENCE, EXIT_SCAN = 0, 1, 2, 3, 4
CSV_HEADER = "P_A,P_Aprime,min_Pcomb,max_Pcomb,converged"


class InputError(Exception):
    """Spec file problem, reported with a line number."""


def load_schema():
    text = resources.files("parrondo").joinpath("gamespec.schema.json").read_text()
    return json.loads(text)


def _line_of(text, path):
    """Best-effort line of the element at ``path`` (keys located in order)."""
    pos = 0
    for key in path:
        if isinstance(key, str):
            hit = text.find(json.dumps(key), pos)
            if hit >= 0:
                pos = hit
    return text.count("\n", 0, pos) + 1


def load_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.path)))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        where = "/".join(map(str, err.absolute_path)) or "(top level)"
        keys = list(err.absolute_path)
        if err.validator == "additionalProperties" and isinstance(err.instance, dict):
            known = err.schema.get("properties", {})
            keys += [k for k in err.instance if k not in known][:1]
        line = _line_of(text, keys)
        raise InputError(f"{path}:{line}: schema error at {where}: {err.message}")
    return doc


def _complex(x):
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def _cmatrix(rows):
    return np.array([[_complex(v) for v in row] for row in rows])


def _cvector(vals):
    return np.array([_complex(v) for v in vals])


def fmt(x):
    return f"{x:.15f}" if np.isfinite(x) else "nan"


def _row(pairs):
    return ",".join(f"{k},{fmt(v)}" for k, v in pairs)


def _mixed(doc):
    if "game_prime" not in doc:
        return None
    if "p" not in doc:
        raise ValidationError("'p' is required when 'game_prime' is given")
    return doc["p"]


def _games(doc):
    """Return (first, second or None, p, finite-n function, limit function)."""
    model = doc["model"]
    p = _mixed(doc)
    if model == "classical":
        g = cl.ClassicalGame(doc["transition"], doc["win_states"], doc["initial"])
        g2 = None
        if p is not None:
            g2 = cl.ClassicalGame(doc["game_prime"]["transition"],
                                  doc["win_states"], doc["initial"])
        return (g, g2, p, cl.classical_win_prob, cl.classical_limit,
                lambda a, b: cl.combine_classical(a, b, p))
    if model == "hidden":
        init = doc["initial"]
        g = hd.HiddenPinceNez(doc["branch_A"], doc["branch_Atilde"])
        g2 = None
        if p is not None:
            g2 = hd.HiddenPinceNez(doc["game_prime"]["branch_A"],
                                   doc["game_prime"]["branch_Atilde"])
        return (g, g2, p, lambda pn, n: hd.hidden_win_prob(pn, init, n),
                hd.hidden_limit, lambda a, b: hd.combine_hidden(a, b, p))
    # quantum
    rho0 = _cmatrix(doc["initial"])

    def pince_nez(d):
        return qu.QuantumPinceNez([_cmatrix(K) for K in d["kraus_A"]],
                                  [_cmatrix(K) for K in d["kraus_Atilde"]])

    g = pince_nez(doc)
    g2 = pince_nez(doc["game_prime"]) if p is not None else None
    return (g, g2, p, lambda pn, n: qu.quantum_win_prob(pn, rho0, n),
            qu.quantum_limit, lambda a, b: qu.combine_quantum(a, b, p))


def _run_games(doc, n, limit):
    g, g2, p, at_n, lim, combine = _games(doc)
    names = ["P_A"] if g2 is None else ["P_A", "P_Aprime", "P_comb"]
    games = [g] if g2 is None else [g, g2, combine(g, g2)]
    pairs = []
    if limit:
        pairs += [(k, lim(x)) for k, x in zip(names, games)]
    if n is not None:
        suffix = "_n" if limit else ""
        pairs += [(k + suffix, at_n(x, n)) for k, x in zip(names, games)]
    return pairs


def _theta(doc, delta):
    if "theta" in doc:
        return doc["theta"]
    return doc["theta_fraction"] * delta


def _run_geodesic(doc):
    eta = _cmatrix(doc["eta"])
    psi, xi = _cvector(doc["psi"]), _cvector(doc["xi"])
    psi, xi = psi / np.linalg.norm(psi), xi / np.linalg.norm(xi)
    B = geo.build_B(eta, psi, xi)
    theta = _theta(doc, B.delta)
    return [("P_A", B.B[0, 0].real), ("P_Aprime", B.B[1, 1].real),
            ("P_geo", geo.geo_prob(B, theta))]


def _run_walk(doc, n):
    if n is None:
        raise ValidationError("walk specs need a step count (--n or 'n')")
    sites = [(s["x"]) for key in ("psi", "xi") for s in doc[key]]
    walk = doc["walk"]
    if "verblunsky" in walk:
        cfg = wk.VerblunskyConfig("full-line", {c["index"]: _complex(c["value"])
                                                for c in walk["verblunsky"]["coeffs"]})
        lo, hi = min(sites) - n - 2, max(sites) + n + 2
        U = wk.cmv_matrix(cfg, (lo, hi))
    else:
        coin = wk.Coin(_cmatrix(walk["coin"]["matrix"]), walk["coin"].get("form", "second"))
        lo, hi = min(sites) - n - 2, max(sites) + n + 2
        U = wk.coined_walk_matrix(coin, (lo, hi))

    def state(entries):
        v = np.zeros(2 * (hi - lo + 1), dtype=complex)
        for s in entries:
            v[2 * (s["x"] - lo) + (0 if s["spin"] == "up" else 1)] += _complex(s["amp"])
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ValidationError("walk state has zero norm")
        return wk.WalkState(lo, hi, v / nrm)

    psi, xi = state(doc["psi"]), state(doc["xi"])
    delta = geo.dist_round(psi.amplitudes, xi.amplitudes)
    triple = wk.walk_geo_game(U, psi, xi, n, _theta(doc, delta))
    return list(zip(("P_A", "P_Aprime", "P_geo"), triple))


def cmd_run(args, out):
    doc = load_spec(args.spec)
    n = args.n if args.n is not None else doc.get("n")
    model = doc["model"]
    try:
        if model == "geodesic":
            pairs = _run_geodesic(doc)
        elif model == "walk":
            pairs = _run_walk(doc, n)
        else:
            if n is None and not args.limit:
                raise ValidationError("nothing to compute: give --n or --limit")
            pairs = _run_games(doc, n, args.limit)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ValidationError as exc:
        raise InputError(f"{args.spec}: {exc}") from None
    _emit(_row(pairs) + "\n", args.out, out)
    return EXIT_OK


def _emit(text, path, out):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)


def region_grid(k):
    """K interior points of (0, 1), equally spaced."""
    if k < 1:
        raise ValidationError("grid must be at least 1")
    return np.linspace(0.0, 1.0, k + 2)[1:-1]


def _hidden_cells(p, grid, samples, seed):
    cells = []
    for a in grid:
        for b in grid:
            lo, hi, bad = hd.hidden_region_sample(p, a, b, samples, seed=seed)
            cells.append(ScanCell(a, b, lo, hi, bad == 0))
    return cells


def _geodesic_cells(grid):
    cells = []
    for a in grid:
        for b in grid:
            lo, hi = geo.geo_bounds(a, b)
            ok = True
            for which, target in (("min", lo), ("max", hi)):
                B, _, theta = geo.achieve_extreme(a, b, which)
                ok &= abs(geo.geo_prob(B, theta) - target) <= 1e-9
            cells.append(ScanCell(a, b, lo, hi, bool(ok)))
    return cells


def format_cells(cells):
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for c in cells:
        buf.write(",".join([fmt(c.P_A), fmt(c.P_Aprime), fmt(c.min_Pcomb),
                            fmt(c.max_Pcomb), "true" if c.converged else "false"]))
        buf.write("\n")
    return buf.getvalue()


def cmd_region(args, out):
    if not 0 < args.p < 1:
        raise InputError("--p must lie in (0, 1)")
    print(f"seed={args.seed}", file=sys.stderr)
    grid = region_grid(args.grid)
    if args.model == "quantum":
        cells = region_scan(args.p, grid, restarts=args.restarts, seed=args.seed,
                            with_max=True)
    elif args.model == "hidden":
        cells = _hidden_cells(args.p, grid, args.samples, args.seed)
    else:
        cells = _geodesic_cells(grid)
    _emit(format_cells(cells), args.out, out)
    if not any(c.converged for c in cells):
        print("error: every cell failed", file=sys.stderr)
        return EXIT_SCAN
    return EXIT_OK


def cmd_verify(args, out):
    print(f"seed={args.seed}", file=sys.stderr)
    checks = run_suite(args.suite, seed=args.seed, samples=args.samples)
    status = EXIT_OK
    for c in checks:
        line = f"{'PASS' if c.passed else 'FAIL'} {args.suite}: {c.name}"
        if c.detail:
            line += f" ({c.detail})"
        out.write(line + "\n")
        if not c.passed:
            status = EXIT_PROPERTY
            if c.counterexample is not None:
                out.write("counterexample: "
                          + json.dumps(jsonable(c.counterexample), sort_keys=True) + "\n")
    return status


def build_parser():
    ap = argparse.ArgumentParser(
        prog="parrondo", description="Evaluate games, scan mixture regions and run property suites.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate a game specification file")
    run.add_argument("spec")
    run.add_argument("--n", type=int, help="round index (overrides the file)")
    run.add_argument("--limit", action="store_true", help="long-run value")
    run.add_argument("--out", help="write the CSV row here instead of stdout")
    run.set_defaults(func=cmd_run)

    reg = sub.add_parser("region", help="scan extremes over a grid of targets")
    reg.add_argument("model", choices=["hidden", "quantum", "geodesic"])
    reg.add_argument("--p", type=float, default=0.5, help="coin bias of the mixture")
    reg.add_argument("--grid", type=int, default=10, help="K interior points per axis")
    reg.add_argument("--restarts", type=int, default=64,
                     help="optimizer restarts per quantum cell")
    reg.add_argument("--samples", type=int, default=20_000,
                     help="samples per cell for the hidden model")
    reg.add_argument("--seed", type=int, default=0)
    reg.add_argument("--out", help="CSV destination (default stdout)")
    reg.set_defaults(func=cmd_region)

    ver = sub.add_parser("verify", help="run a named property suite")
    ver.add_argument("--suite", required=True, choices=sorted(SUITES))
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--samples", type=int, help="override the suite's sample count")
    ver.set_defaults(func=cmd_verify)
    return ap


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
