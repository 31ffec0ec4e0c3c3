"""Command line entry points: solve, verify, audit, farfield, density.

Configuration is a key=value text file; every key has a default and unknown
keys are rejected.  Exit status: 0 all checks pass, 2 a numerical check
failed, 3 configuration or input error.
"""

import argparse
import difflib
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .core import AccuracyError, ConfigError, DomainError, QuadratureSpec, Wavenumber

EXIT_OK, EXIT_CHECK, EXIT_CONFIG = 0, 2, 3


@dataclass(frozen=True)
class RunConfig:
    h0: float = 1.0
    eps: float = 0.2
    source: str = "oracle"          # oracle | zero | bump | file
    a: float = 1.0
    b: float = 1.0
    kind: str = "outgoing"
    u1_file: str = ""
    u2_file: str = ""
    window: int = 0                 # 1: cut oracle data off smoothly at L
    L: float = 60.0
    perturb_u1: float = 0.0         # relative perturbation of u1 (detector runs)
    tol: float = 1e-10
    Lambda: float = 1e4
    delta: float = 1e-9
    nodes_per_panel: int = 16
    far_panels: int = 40
    ray_length: float = 1000.0
    points: str = "1,1;2,0.5;0.5,2;3,3;1,4"
    grid: str = ""                  # "x0:x1:nx,z0:z1:nz" replaces points when set
    solve_tol: float = 1e-2
    stencil_delta: float = 1e-2
    stencil_tol: float = 1e-2
    plemelj_tol: float = 1e-3
    corner_tol: float = 0.1
    gr_tol: float = 1e-3
    consistency_tol: float = 1e-3
    closure_tol: float = 5e-2
    closure_L: float = 0.0          # window for the closure runs; 0 picks it from eps
    eps_sweep: str = "0.4,0.2,0.1"
    theta: float = 0.7853981633974483
    Rh_list: str = "50,100,200"
    farfield_tol: float = 0.1
    out: str = "out"

    @property
    def wavenumber(self):
        return Wavenumber(self.h0, self.eps)

    @property
    def spec(self):
        return QuadratureSpec(tol=self.tol, Lambda=self.Lambda, delta=self.delta,
                              nodes_per_panel=self.nodes_per_panel, far_panels=self.far_panels,
                              ray_length=self.ray_length)


def parse_config(text, source="<config>"):
    types = {f.name: f.type for f in fields(RunConfig)}
    vals = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in types:
            raise ConfigError(f"{source}:{lineno}: unknown key {k!r}")
        try:
            vals[k] = types[k](v)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value {v!r} for {k}") from None
    cfg = RunConfig(**vals)
    if cfg.source not in ("oracle", "zero", "bump", "file"):
        raise ConfigError(f"{source}: unknown data source {cfg.source!r}")
    if cfg.source == "file" and not (cfg.u1_file and cfg.u2_file):
        raise ConfigError(f"{source}: source=file needs u1_file and u2_file")
    return cfg


def load_config(path):
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return parse_config(text, path)


def eval_points(cfg):
    try:
        if cfg.grid:
            gx, gz = cfg.grid.split(",")
            x0, x1, nx = gx.split(":")
            z0, z1, nz = gz.split(":")
            xs = np.linspace(float(x0), float(x1), int(nx))
            zs = np.linspace(float(z0), float(z1), int(nz))
            return [(float(x), float(z)) for z in zs for x in xs]
        return [tuple(float(v) for v in p.split(",")) for p in cfg.points.split(";") if p.strip()]
    except ValueError:
        raise ConfigError("malformed points/grid specification") from None


def _floats(s, key):
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"malformed list for {key}") from None


def make_source(cfg, eps=None, kind=None):
    from .oracle import HankelSource

    wn = Wavenumber(cfg.h0, cfg.eps if eps is None else eps)
    try:
        return HankelSource(cfg.a, cfg.b, wn, kind or cfg.kind)
    except (DomainError, ValueError) as e:
        raise ConfigError(str(e)) from None


def bump_data():
    """Smooth exponentially decaying pulses: u1 = z^2 e^{-z}, u2 = x e^{-x}.

    Analytic data are used rather than a compactly supported bump: with
    eps > 0 the continued transforms of compact data grow like e^{Re(lam) L}.
    """
    from .transforms import AnalyticHalfLine, BoundaryData

    phase = lambda t: -np.asarray(t, dtype=complex)
    u1 = AnalyticHalfLine(lambda t: np.asarray(t, dtype=complex) ** 2, phase, 1j)
    u2 = AnalyticHalfLine(lambda t: np.asarray(t, dtype=complex), phase, 1j)
    return BoundaryData(u1, u2)


def make_data(cfg):
    """(boundary data, oracle source or None)."""
    from .transforms import BoundaryData, load_two_column, zero_data

    src = None
    if cfg.source == "oracle":
        src = make_source(cfg)
        data = src.windowed_boundary_data(cfg.L) if cfg.window else src.boundary_data()
    elif cfg.source == "zero":
        data = zero_data()
    elif cfg.source == "bump":
        data = bump_data()
    else:
        try:
            data = BoundaryData(load_two_column(cfg.u1_file), load_two_column(cfg.u2_file))
        except (OSError, ValueError) as e:
            raise ConfigError(str(e)) from None
    if cfg.perturb_u1:
        data = data.scaled(1 + cfg.perturb_u1, 1.0)
    return data, src


def _u_parallel(kr, pts, threads):
    xs = np.array([p[0] for p in pts])
    zs = np.array([p[1] for p in pts])
    if threads <= 1 or len(pts) < 2:
        return np.atleast_1d(kr.u(xs, zs))
    chunks = np.array_split(np.arange(len(pts)), min(threads, len(pts)))
    with ThreadPoolExecutor(threads) as ex:
        parts = list(ex.map(lambda idx: np.atleast_1d(kr.u(xs[idx], zs[idx])), chunks))
    return np.concatenate(parts)


# ------------------------------------------------------------ commands


def cmd_solve(cfg, threads=1, seed=0):
    from .oracle import helmholtz_residual
    from .solver import build_sectional, plemelj_check, write_diagnostics_csv, write_solution_csv

    data, src = make_data(cfg)
    pts = eval_points(cfg)
    fld = build_sectional(data, cfg.wavenumber, cfg.spec)
    ok = True
    worst, diags = plemelj_check(fld, n=10, seed=seed)
    ok &= worst <= cfg.plemelj_tol
    u00 = fld.u00
    diags.append(("corner_spread", "-is:s=10,20,40", fld.corner_spread))
    ok &= fld.corner_spread <= cfg.corner_tol
    # F(i) + (h/2) Phi1(i) with Phi1(i) extrapolated from just inside the circle
    tr = fld.transforms
    p1 = 2 * fld.omega(1j * (1 - 1e-4)) - fld.omega(1j * (1 - 2e-4))
    scale = max(abs(tr.F(0.5j)), abs(tr.F(2j)), abs(tr.F(1j)))
    ci = abs(tr.F(1j) + 0.5 * fld.h * p1)
    rel = ci / scale if scale > 0 else ci
    diags.append(("consistency_at_i", "0+1j", rel))
    ok &= rel <= cfg.consistency_tol
    kr = fld.k_representation()
    try:
        u = _u_parallel(kr, pts, threads)
    except DomainError as e:
        raise ConfigError(str(e)) from None
    ucall = lambda x, z: kr.u(x, z)
    for (x, z), v in zip(pts, u):
        if min(x, z) > cfg.stencil_delta and abs(v) > 0:
            r = abs(helmholtz_residual(ucall, x, z, cfg.stencil_delta, fld.h)) / abs(v)
            diags.append(("stencil", f"{x:g},{z:g}", r))
            ok &= r <= cfg.stencil_tol
    ref = None
    if src is not None and not cfg.window and not cfg.perturb_u1:
        ref = [complex(src.u(x, z)) for x, z in pts]
        for (x, z), v, rv in zip(pts, u, ref):
            e = abs(v - rv) / abs(rv)
            diags.append(("oracle_rel_err", f"{x:g},{z:g}", e))
            ok &= e <= cfg.solve_tol
        e = abs(u00 - src.u00) / abs(src.u00)
        diags.append(("corner_rel_err", "0,0", e))
        ok &= e <= cfg.solve_tol
    write_solution_csv(os.path.join(cfg.out, "solution.csv"), pts, u, ref)
    write_diagnostics_csv(os.path.join(cfg.out, "diagnostics.csv"), diags)
    print(f"solve: {len(pts)} points, u00 = {u00:.6g}, diagnostics {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CHECK


def window_converged(zeta, h, L, taper=0.1, digits=14.0):
    """True when the transforms at zeta of both edges decay by e^-digits before
    the window starts, so cutting the data off at L changes them negligibly."""
    from .transforms import lam_x, lam_z

    lam = max(np.real(lam_z(h, zeta)), np.real(lam_x(h, zeta)))
    return (lam + np.real(1j * h)) * (1 - taper) * L < -digits


def verify_suites(cfg):
    """Residual suites for an oracle-backed configuration.

    Returns {suite: (rows, max_residual, tol, passed)} where rows are
    (check, location, residual).
    """
    from .global_relation import coef_a, coef_b, load_default_table, radiation_closure
    from .oracle import c2_rho31_samples, oracle_transforms, window_length
    from .core import gr_valid
    from .transforms import DataTransforms

    if cfg.source != "oracle":
        raise ConfigError("verify needs source=oracle")
    table = load_default_table()
    src = make_source(cfg)
    h = src.h
    data, _ = make_data(cfg)
    tr = DataTransforms(data, src.wavenumber, table.u1_sign)
    cache = {}

    def ot(z):
        if z not in cache:
            cache[z] = oracle_transforms(src, z)
        return cache[z]

    if cfg.window:
        # windowed data and traces: finite integrals, compared where the
        # transforms of the untruncated functions converge
        from .transforms import half_line_transform, lam_x, lam_z
        gz, gx = src.windowed_traces(cfg.L)
        phi1 = lambda z: half_line_transform(gz, lam_z(h, complex(z)))
        phi3 = lambda z: half_line_transform(gx, lam_x(h, complex(z)))
        valid = lambda w: window_converged(w, h, cfg.L)
    else:
        phi1 = lambda z: ot(complex(z))["Phi1"]
        phi3 = lambda z: ot(complex(z))["Phi3"]
        valid = lambda z: gr_valid(z, h)
    F = lambda z: tr.F(complex(z))
    suites = {}

    # global relation and its three images, 20 points each where valid
    rng = np.random.default_rng(12345)
    rows = {"global": [], "sym_neginv": [], "sym_inv": [], "sym_neg": []}
    img = {"global": lambda z: z, "sym_neginv": lambda z: -1 / z, "sym_inv": lambda z: 1 / z,
           "sym_neg": lambda z: -z}
    scale = 0.0
    tries = 0
    while min(len(r) for r in rows.values()) < 20 and tries < 2000:
        tries += 1
        z = complex(rng.uniform(0.3, 3.0) * np.exp(1j * rng.uniform(-np.pi, np.pi)))
        if abs(abs(z) - 1) < 0.05 or abs(z.imag) < 0.05:
            continue
        a, b, s = coef_a(h, z), coef_b(h, z), table.phi3_sign
        for name in rows:
            if len(rows[name]) >= 20 or not valid(img[name](z)):
                continue
            try:
                if name == "global":
                    r = a * phi1(z) + s * b * phi3(z) - F(z)
                elif name == "sym_neginv":
                    r = a * phi1(-z) - s * b * phi3(z) - F(-1 / z)
                elif name == "sym_inv":
                    r = -a * phi1(z) + s * b * phi3(1 / z) - F(1 / z)
                else:
                    r = -a * phi1(-z) - s * b * phi3(1 / z) - F(-z)
                scale = max(scale, abs(F(img[name](z))))
            except DomainError:
                continue
            rows[name].append((name, f"{z.real:.6f}{z.imag:+.6f}j", abs(r)))
    for name, rr in rows.items():
        rr = [(c, l, v / scale) for c, l, v in rr]
        m = max(v for _, _, v in rr)
        suites[name] = (rr, m, cfg.gr_tol, m < cfg.gr_tol)

    # consistency identities at zeta = +-1 and zeta = i
    c1 = abs(F(1.0) + F(-1.0)) / scale
    ci = abs(F(1j) + 0.5 * h * phi1(1j)) / scale
    rr = [("F(1)+F(-1)", "+-1", c1), ("F(i)+(h/2)Phi1(i)", "i", ci)]
    suites["consistency"] = (rr, max(c1, ci), cfg.consistency_tol, max(c1, ci) < cfg.consistency_tol)

    # radiation closure on C2 with data cut off where the field has decayed,
    # and the eps sweep
    def closure(eps):
        s = make_source(cfg, eps=eps)
        L = cfg.closure_L or window_length(s.wavenumber)
        zs, rho, sc = c2_rho31_samples(s, L=L, table=table, u1_scale=1 + cfg.perturb_u1)
        return radiation_closure(zs, rho, sc, cfg.closure_tol)

    rep = closure(cfg.eps)
    rr = [("c2_closure", f"eps={cfg.eps:g}", rep.relative)]
    sweep = []
    for e in _floats(cfg.eps_sweep, "eps_sweep"):
        r = closure(e)
        sweep.append(r.relative)
        rr.append(("c2_closure_sweep", f"eps={e:g}", r.relative))
    mono = all(b < a for a, b in zip(sweep, sweep[1:]))
    rr.append(("c2_sweep_monotone_decrease", cfg.eps_sweep.replace(",", ";"), 0.0 if mono else 1.0))
    suites["radiation"] = (rr, rep.relative, cfg.closure_tol, rep.passed and mono)
    return suites


def cmd_verify(cfg, threads=1, seed=0):
    from .solver import write_csv_atomic

    suites = verify_suites(cfg)
    summary = []
    for name, (rows, m, tol, ok) in suites.items():
        write_csv_atomic(os.path.join(cfg.out, f"verify_{name}.csv"), ["check", "location", "residual"],
                         [(c, l, float(v)) for c, l, v in rows])
        summary.append((name, float(m), float(tol), "pass" if ok else "FAIL"))
        print(f"verify {name:12s} max residual {m:.3e} (tol {tol:g}): {'pass' if ok else 'FAIL'}")
    write_csv_atomic(os.path.join(cfg.out, "verify_summary.csv"), ["suite", "max_residual", "tol", "status"],
                     summary)
    return EXIT_OK if all(s[3] == "pass" for s in summary) else EXIT_CHECK


def cmd_audit(cfg, threads=1, seed=0):
    from .global_relation import AUDIT_FLAGS, AuditAmbiguityError, load_default_table, sign_audit
    from .solver import write_csv_atomic

    if cfg.source != "oracle":
        raise ConfigError("audit needs source=oracle")
    src = make_source(cfg)
    try:
        res = sign_audit(src, spec=cfg.spec)
    except AuditAmbiguityError as e:
        print(f"audit: {e}", file=sys.stderr)
        return EXIT_CHECK
    text = res.table.to_text()
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, "conventions.txt")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
    write_csv_atomic(os.path.join(cfg.out, "audit_scores.csv"), ["candidate", "score", "gr", "jump", "u"],
                     [(";".join(f"{f}={getattr(t, f)}" for f in AUDIT_FLAGS), float(s), float(g[0]),
                       float(g[1]), float(g[2])) for t, s, g in res.scores])
    shipped = load_default_table().to_text()
    print(f"audit: best score {res.score:.3e}, runner-up {res.runner_up:.3e}, margin {res.margin:.3g}x")
    if text != shipped:
        sys.stdout.writelines(difflib.unified_diff(shipped.splitlines(True), text.splitlines(True),
                                                   "shipped", "audited"))
        return EXIT_CHECK
    print("audit: table identical to the shipped conventions")
    return EXIT_OK


def cmd_farfield(cfg, threads=1, seed=0):
    from .farfield import farfield_verify, oracle_arc_rho, write_report_csv

    if cfg.source != "oracle":
        raise ConfigError("farfield needs source=oracle")
    src = make_source(cfg, eps=0.0)
    r31, r13 = oracle_arc_rho(src)
    rep = farfield_verify(r31, r13, src.h, _floats(cfg.Rh_list, "Rh_list"), cfg.theta)
    write_report_csv(os.path.join(cfg.out, "farfield.csv"), rep)
    last = rep.rows[-1].abs_err
    c2 = max(rep.c2_over_c4)
    for r in rep.rows:
        print(f"farfield Rh={r.Rh:g}: |ratio - 1| = {r.abs_err:.4f}")
    print(f"farfield C2/C4 = {c2:.3e}, C2 readings {rep.c2_reading_errors}")
    ok = last < cfg.farfield_tol and rep.decreasing() and c2 < 0.1
    return EXIT_OK if ok else EXIT_CHECK


def cmd_density(cfg, threads=1, seed=0):
    from .solver import build_sectional, write_csv_atomic

    data, _ = make_data(cfg)
    fld = build_sectional(data, cfg.wavenumber, cfg.spec)
    rows = []
    for p in fld.gamma.pieces:
        r = fld.r(p.nodes, p.label)
        for t, z, v in zip(p.t, p.nodes, r):
            rows.append((p.label, float(t), float(z.real), float(z.imag), float(v.real), float(v.imag)))
    write_csv_atomic(os.path.join(cfg.out, "density.csv"), ["piece", "t", "re_zeta", "im_zeta", "re_r", "im_r"],
                     rows)
    print(f"density: {len(rows)} samples on {len(fld.gamma.pieces)} pieces")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "audit": cmd_audit, "farfield": cmd_farfield,
            "density": cmd_density}


def main(argv=None):
    ap = argparse.ArgumentParser(prog="quarterplane", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="key=value configuration file")
    ap.add_argument("--out", help="output directory (overrides the config)")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0, help="seed for sampling-based checks")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out:
            cfg = replace(cfg, out=args.out)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        return COMMANDS[args.command](cfg, threads=args.threads, seed=args.seed)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (AccuracyError, DomainError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
