"""Command-line workbench: ``paracavity <subcommand> [flags]``.

Subcommands: trajectory, poincare, orbit, spectrum, mode, selftest.
Settings come from built-in defaults, then an optional JSON ``--config``
file, then explicit flags.  Exit status: 0 success, 2 configuration error,
3 numerical failure, 4 domain violation.
"""

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .actions import action_sigma_closed, action_sigma_quadrature, action_tau, action_tau_quadrature, winding_number
from .dynamics import (
    MotionConstants,
    Triangle,
    caustics,
    planar_constant,
    poincare_field,
    simulate,
    starting_state,
)
from .errors import ConfigError, DomainViolation, NoSolution, NumericalError
from .geometry import Cavity
from .modes import correspond, eigenmode_eval, normalize, penetration_ratio
from .orbits import OrbitSpec, build_orbit, solve_orbit_all
from .results import Column, ResultBundle, Table, svg_contours, svg_polylines, write_bundle
from .specfun import kummer_m
from .spectrum import ScanOptions, find_eigenpairs, spectrum_vs_deformation

__all__ = ["RunConfig", "DEFAULT_TOLERANCES", "build_parser", "load_config", "run", "run_selftest", "main"]

COMMANDS = ("trajectory", "poincare", "orbit", "spectrum", "mode", "selftest")
FORMATS = ("csv", "json", "svg")

DEFAULT_TOLERANCES = {
    "drift_abort": 1e-6,
    "orbit_residual": 1e-10,
    "closure": 1e-6,
    "newton": 1e-10,
    "rim_eps": 1e-9,
}

# per-command defaults; anything not listed here is rejected
DEFAULT_PARAMS = {
    "trajectory": {"alpha": 0.0, "beta": 1.0, "P": 1.0, "bounces": 200, "phi": 0.0},
    "poincare": {"alpha": [-5.0, 0.0, 2.0], "beta": [0.0, 0.1, 0.2], "grid": 101, "plane": "sigma", "P": 1.0},
    "orbit": {"specs": [[1, 1, 0]]},
    "spectrum": {"m": [0, 1, 2, 3, 4, 5], "kmax": 2.03, "ratio_range": None, "samples": 13, "m_max": 3, "states_per_m": 4},
    "mode": {"l": 0, "n": 0, "m": 0, "kmax": 3.0, "grid": 81},
    "selftest": {"perturb": 0.0},
}


@dataclass
class RunConfig:
    command: str
    sigma0: float = 3.0
    tau0: float = 2.0
    out: str = "out"
    formats: tuple = ("csv",)
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("sigma0", "tau0"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and np.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad or not self.formats:
            raise ConfigError(f"formats must be drawn from {FORMATS}, got {list(self.formats)}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")
        for k, v in self.tolerances.items():
            if not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"tolerance {k} must be positive, got {v!r}")
        extra = set(self.params) - set(DEFAULT_PARAMS[self.command])
        if extra:
            raise ConfigError(f"parameters {sorted(extra)} do not apply to {self.command}")
        p = {**DEFAULT_PARAMS[self.command], **self.params}
        if self.command == "trajectory":
            if p["beta"] < 0 or p["P"] <= 0 or int(p["bounces"]) < 1:
                raise ConfigError("trajectory needs beta >= 0, P > 0 and bounces >= 1")
            if not Triangle(self.sigma0, self.tau0).contains(p["alpha"], p["beta"]):
                raise ConfigError(f"(alpha, beta) = ({p['alpha']}, {p['beta']}) is outside the admissible triangle")
        if self.command == "orbit":
            for spec in p["specs"]:
                OrbitSpec(*[int(v) for v in spec])
        if self.command == "spectrum" and p["kmax"] <= 0:
            raise ConfigError("kmax must be positive")
        if self.command == "spectrum" and p["ratio_range"] is not None:
            lo, hi = p["ratio_range"]
            if not 0 < lo < hi:
                raise ConfigError("ratio_range must satisfy 0 < lo < hi")
        if self.command == "mode" and (p["l"] < 0 or p["n"] < 0):
            raise ConfigError("mode needs l, n >= 0")
        self.params = p
        return self

    @property
    def cavity(self):
        return Cavity(self.sigma0, self.tau0, rim_exclusion_eps=self.tolerances["rim_eps"] * (self.sigma0**2 + self.tau0**2))


def _floats(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def _spec_list(text):
    out = []
    for chunk in str(text).split(";"):
        if chunk.strip():
            out.append([int(v) for v in chunk.split(",")])
    return out


def build_parser():
    ap = argparse.ArgumentParser(prog="paracavity", description="Particle in a confocal paraboloidal cavity.")
    ap.add_argument("--version", action="version", version=f"paracavity {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON file mirroring the flags")
        sp.add_argument("--sigma0", type=float)
        sp.add_argument("--tau0", type=float)
        sp.add_argument("--out")
        sp.add_argument("--format", action="append", choices=FORMATS, dest="formats")
        sp.add_argument("--tol-override", action="append", default=[], metavar="KEY=VAL")
        if name == "trajectory":
            sp.add_argument("--alpha", type=float)
            sp.add_argument("--beta", type=float)
            sp.add_argument("--P", type=float)
            sp.add_argument("--bounces", type=int)
            sp.add_argument("--phi", type=float)
        elif name == "poincare":
            sp.add_argument("--alpha", type=_floats, help="comma-separated values")
            sp.add_argument("--beta", type=_floats, help="comma-separated values")
            sp.add_argument("--grid", type=int)
            sp.add_argument("--plane", choices=("sigma", "tau"))
        elif name == "orbit":
            sp.add_argument("--s", type=int)
            sp.add_argument("--t", type=int)
            sp.add_argument("--l", type=int)
            sp.add_argument("--specs", type=_spec_list, help="'s,t,l;s,t,l;...'")
        elif name == "spectrum":
            sp.add_argument("--m", type=lambda s: [int(v) for v in s.split(",")])
            sp.add_argument("--kmax", type=float)
            sp.add_argument("--ratio-range", type=_floats, dest="ratio_range")
            sp.add_argument("--samples", type=int)
            sp.add_argument("--m-max", type=int, dest="m_max")
            sp.add_argument("--states-per-m", type=int, dest="states_per_m")
        elif name == "mode":
            sp.add_argument("--l", type=int)
            sp.add_argument("--n", type=int)
            sp.add_argument("--m", type=int)
            sp.add_argument("--kmax", type=float)
            sp.add_argument("--grid", type=int)
        elif name == "selftest":
            sp.add_argument("--perturb", type=float, help="offset added to the closed-form action (mutation check)")
    return ap


def load_config(argv):
    """Parse flags, merge with an optional config file, validate."""
    args = build_parser().parse_args(argv)
    base = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(base, dict):
            raise ConfigError("config file must hold a JSON object")
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("config", "command", "tol_override")}
    merged = {**base, **flags}
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(base.get("tolerances", {}))
    for item in args.tol_override:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol-override expects KEY=VAL, got {item!r}")
        try:
            tol[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"tolerance {key} is not a number: {val!r}") from exc
    if args.command == "orbit" and any(k in flags for k in ("s", "t", "l")):
        if not all(k in flags for k in ("s", "t", "l")):
            raise ConfigError("--s, --t and --l must be given together")
        merged["specs"] = [[merged.pop("s"), merged.pop("t"), merged.pop("l")]]
    for k in ("s", "t", "l") if args.command == "orbit" else ():
        merged.pop(k, None)
    common = {k: merged.pop(k) for k in ("sigma0", "tau0", "out") if k in merged}
    formats = tuple(merged.pop("formats", ("csv",)))
    merged.pop("tolerances", None)
    merged.pop("command", None)
    cfg = RunConfig(args.command, formats=formats, params=merged, tolerances=tol, **common)
    return cfg.validate()


def _metadata(cfg, t0, achieved):
    return {
        "tool": f"paracavity {__version__}",
        "config": {**asdict(cfg), "formats": list(cfg.formats)},
        "wall_clock_s": round(time.time() - t0, 3),
        "achieved": achieved,
        "units": "natural units: hbar = 1, 2M = 1, E = k^2",
    }


def cmd_trajectory(cfg):
    p, cav = cfg.params, cfg.cavity
    mc = MotionConstants(p["P"], p["alpha"], p["beta"])
    traj = simulate(cav, starting_state(cav, mc, phi=p["phi"]), int(p["bounces"]), drift_abort=cfg.tolerances["drift_abort"])
    c0 = traj.constants0
    bounces = Table(
        [Column("index", "int"), Column("x", unit="L"), Column("y", unit="L"), Column("z", unit="L"),
         Column("wall", "str"), Column("length", unit="L"), Column("d_alpha", unit="L"),
         Column("d_beta", unit="L^2"), Column("d_P", unit="P")]
    )
    x0 = traj.initial.position
    bounces.add(0, x0[0], x0[1], x0[2], "start", 0.0, 0.0, 0.0, 0.0)
    for i, b in enumerate(traj.bounces, 1):
        c = b.constants
        bounces.add(i, *b.point, b.wall.value, b.length, c.alpha - c0.alpha, c.beta - c0.beta, c.P - c0.P)
    cp = caustics(mc.alpha, mc.beta)
    caus = Table([Column("sigma_c", unit="L^1/2"), Column("tau_c", unit="L^1/2"), Column("delta", unit="L")])
    caus.add(cp.sigma_c, cp.tau_c, cp.delta)
    bundle = ResultBundle("trajectory", {"bounces": bounces, "caustics": caus})
    pts = traj.points
    bundle.svgs["xz"] = svg_polylines([pts[:, [0, 2]]])
    bundle.svgs["xy"] = svg_polylines([pts[:, [0, 1]]])
    return bundle, {"drift": traj.drift()}


def cmd_poincare(cfg):
    p = cfg.params
    cav = cfg.cavity
    n = int(p["grid"])
    w0 = cav.wall_param(p["plane"])
    q = np.linspace(0.0, w0, n)
    pm = np.linspace(-2.0 * w0, 2.0 * w0, n) * p["P"]
    tables, svgs = {}, {}
    for b in p["beta"]:
        qq = q[1:] if b > 0 else q
        grid = poincare_field(p["plane"], "alpha", qq, pm, P=p["P"], beta=b)
        key = f"alpha_beta{b:g}"
        tables[key] = _grid_table(qq, pm, grid, "alpha", "L")
        svgs[key] = svg_contours(qq, pm, grid.T)
    for a in p["alpha"]:
        grid = poincare_field(p["plane"], "beta", q, pm, P=p["P"], alpha=a)
        key = f"beta_alpha{a:g}"
        tables[key] = _grid_table(q, pm, grid, "beta", "L^2")
        svgs[key] = svg_contours(q, pm, grid.T)
    bundle = ResultBundle("poincare", tables)
    bundle.svgs = svgs
    return bundle, {"grids": len(tables)}


def _grid_table(q, pm, grid, name, unit):
    t = Table([Column("q", unit="L^1/2"), Column("p", unit="P L^1/2"), Column(name, unit=unit)])
    for i, qi in enumerate(q):
        for j, pj in enumerate(pm):
            t.add(qi, pj, grid[i, j])
    return t


def cmd_orbit(cfg):
    cav = cfg.cavity
    summary = Table(
        [Column("s", "int"), Column("t", "int"), Column("l", "int"), Column("alpha", unit="L"),
         Column("beta", unit="L^2"), Column("r1"), Column("r2"), Column("length", unit="L"),
         Column("arc_length", unit="L"), Column("closure_error", unit="L")]
    )
    tables, svgs = {"summary": summary}, {}
    achieved = {}
    from .actions import closure_residual
    from .orbits import SolverOptions

    opts = SolverOptions(tol=cfg.tolerances["orbit_residual"])
    for s, t, l in sorted(tuple(int(v) for v in spec) for spec in cfg.params["specs"]):
        spec = OrbitSpec(s, t, l)
        try:
            roots = solve_orbit_all(cav, spec, opts)
        except NoSolution:
            achieved[str(spec)] = "no solution"
            continue
        for r, c in enumerate(roots):
            orb = build_orbit(cav, spec, c, closure_tol=cfg.tolerances["closure"])
            r1, r2 = closure_residual(cav, c.alpha, c.beta, s, t, l)
            summary.add(s, t, l, c.alpha, c.beta, float(r1), float(r2), orb.length, orb.arc_length, orb.closure_error)
            key = f"bounces_{s}_{t}_{l}_{r}"
            bt = Table([Column("x", unit="L"), Column("y", unit="L"), Column("z", unit="L"), Column("wall", "str")])
            x0 = orb.trajectory.initial.position
            bt.add(*x0, "start")
            for b in orb.trajectory.bounces:
                bt.add(*b.point, b.wall.value)
            tables[key] = bt
            pts = orb.trajectory.points
            svgs[key] = svg_polylines([pts[:, [0, 1]]])
    bundle = ResultBundle("orbit", tables)
    bundle.svgs = svgs
    return bundle, achieved


def _pair_row(table, p, cav):
    mode = normalize(p, cav)
    table.add(p.l, p.n, p.m, p.a, p.k, p.energy, p.alpha, p.beta, penetration_ratio(mode))


def cmd_spectrum(cfg):
    p, cav = cfg.params, cfg.cavity
    cols = [Column("l", "int"), Column("n", "int"), Column("m", "int"), Column("a"), Column("k", unit="1/L"),
            Column("k2", unit="hbar^2/2M"), Column("alpha"), Column("beta", unit="L^2"), Column("Pi")]
    table = Table(cols)
    pairs = []
    opts = ScanOptions(newton_tol=cfg.tolerances["newton"])
    for m in sorted(set(abs(int(v)) for v in p["m"])):
        for pr in find_eigenpairs(cav, m, p["kmax"], opts):
            pairs.append(pr)
            if m and -m in p["m"]:
                pairs.append(pr.with_m(-m))
    pairs.sort(key=lambda q: (q.k, abs(q.m), q.m, q.l, q.n))
    for pr in pairs:
        _pair_row(table, pr, cav)
    tables = {"eigenpairs": table}
    achieved = {"pairs": len(pairs)}
    if p["ratio_range"] is not None:
        scan = spectrum_vs_deformation(cfg.tau0, p["ratio_range"], int(p["samples"]), int(p["m_max"]), int(p["states_per_m"]))
        st = Table([Column("ratio"), Column("l", "int"), Column("n", "int"), Column("m", "int"), Column("k2", unit="hbar^2/2M")])
        for row in scan.rows:
            st.add(*row)
        ct = Table([Column("first", "str"), Column("second", "str"), Column("ratio"), Column("k2", unit="hbar^2/2M")])
        for c in scan.crossings:
            ct.add("%d,%d,%d" % c.first, "%d,%d,%d" % c.second, c.ratio, c.energy)
        tables["deformation"] = st
        tables["crossings"] = ct
        achieved["crossings"] = len(scan.crossings)
    return ResultBundle("spectrum", tables), achieved


def cmd_mode(cfg):
    p, cav = cfg.params, cfg.cavity
    opts = ScanOptions(newton_tol=cfg.tolerances["newton"])
    pairs = [q for q in find_eigenpairs(cav, abs(int(p["m"])), p["kmax"], opts) if (q.l, q.n) == (p["l"], p["n"])]
    if not pairs:
        raise NoSolution(f"mode ({p['l']},{p['n']},{p['m']}) not found below kmax = {p['kmax']}")
    pair = pairs[0].with_m(int(p["m"]))
    mode = normalize(pair, cav)
    n = int(p["grid"])
    # meridional half-plane φ = 0 (x > 0) and φ = π (x < 0)
    xs = np.linspace(-cav.rim_radius, cav.rim_radius, n)
    zs = np.linspace(-0.5 * cav.sigma0**2, 0.5 * cav.tau0**2, n)
    X, Z = np.meshgrid(xs, zs, indexing="ij")
    pts = np.stack([X, np.zeros_like(X), Z], axis=-1)
    psi = eigenmode_eval(mode, pts)
    grid = Table([Column("x", unit="L"), Column("z", unit="L"), Column("density", unit="1/L^3"), Column("re_psi", unit="L^-3/2")])
    for i in range(n):
        for j in range(n):
            grid.add(xs[i], zs[j], abs(psi[i, j]) ** 2, psi[i, j].real)
    cp = caustics(pair.alpha, pair.beta)
    corr = correspond(pair, cav)
    info = Table([Column("l", "int"), Column("n", "int"), Column("m", "int"), Column("k2"), Column("alpha"),
                  Column("beta", unit="L^2"), Column("N"), Column("Pi"), Column("sigma_c"), Column("tau_c"),
                  Column("winding"), Column("approx", "str"), Column("approx_residual")])
    approx = str(corr.approx) if corr.approx is not None else "none"
    info.add(pair.l, pair.n, pair.m, pair.energy, pair.alpha, pair.beta, mode.N, penetration_ratio(mode),
             cp.sigma_c, cp.tau_c, corr.winding, approx, corr.residual)
    bundle = ResultBundle("mode", {"density": grid, "info": info})
    dens = np.abs(psi) ** 2
    bundle.svgs["density"] = svg_contours(xs, zs, dens.T)
    return bundle, {"Pi": info.rows[0][7]}


def run_selftest(perturb=0.0, out=None):
    """Oracle suites; returns a list of (name, passed, achieved, tolerance)."""
    out = out or sys.stdout
    results = []
    for s0, t0 in ((3.0, 2.0), (1.0, 1.0)):
        tri = Triangle(s0, t0)
        worst = 0.0
        for u in np.linspace(0.0, 1.0, 12):
            for v in np.linspace(0.0, 1.0, 12):
                a, b = tri.interior_point(u, v)
                worst = max(
                    worst,
                    abs(action_sigma_closed(s0, a, b) + perturb - action_sigma_quadrature(s0, a, b)),
                    abs(action_tau(t0, a, b) + perturb - action_tau_quadrature(t0, a, b)),
                )
        results.append((f"closed-form action vs quadrature ({s0:g},{t0:g})", worst < 1e-9, worst, 1e-9))
    rng = np.random.default_rng(7)
    worst_t, worst_e = 0.0, 0.0
    for _ in range(40):
        a = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        b = complex(rng.uniform(0.5, 4), rng.uniform(-2, 2))
        z = complex(rng.uniform(-20, 20), rng.uniform(-20, 20))
        m = kummer_m(a, b, z)
        worst_t = max(worst_t, abs(m - np.exp(z) * kummer_m(b - a, b, -z)) / abs(m))
        worst_e = max(worst_e, abs(kummer_m(a, a, z) - np.exp(z)) / abs(np.exp(z)))
    results.append(("Kummer transformation", worst_t < 1e-11, worst_t, 1e-11))
    results.append(("M(a,a,z) = e^z", worst_e < 1e-11, worst_e, 1e-11))
    cav = Cavity(3.0, 2.0)
    traj = simulate(cav, starting_state(cav, MotionConstants(1.0, -1.0, 2.0)), 2000)
    drift = max(traj.drift().values())
    results.append(("conservation over 2000 bounces", drift < 1e-9, drift, 1e-9))
    traj = simulate(cav, starting_state(cav, MotionConstants(1.0, -2.0, 0.0)), 500)
    q0 = planar_constant(traj.initial)
    qd = max(abs(planar_constant(type(traj.initial)(b.point, b.p_out), tol=1e-8) - q0) for b in traj.bounces)
    results.append(("planar constant at beta = 0", qd < 1e-9, qd, 1e-9))
    w = float(winding_number(cav, 0.0, 0.0))
    results.append(("winding number at the axial orbit", abs(w - 1.0) < 1e-12, abs(w - 1.0), 1e-12))
    for name, ok, val, tol in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {val:.3e} (tol {tol:g})", file=out)
    return results


HANDLERS = {
    "trajectory": cmd_trajectory,
    "poincare": cmd_poincare,
    "orbit": cmd_orbit,
    "spectrum": cmd_spectrum,
    "mode": cmd_mode,
}


def run(cfg):
    t0 = time.time()
    if cfg.command == "selftest":
        results = run_selftest(cfg.params.get("perturb", 0.0))
        return 0 if all(r[1] for r in results) else 3
    bundle, achieved = HANDLERS[cfg.command](cfg)
    bundle.metadata = _metadata(cfg, t0, achieved)
    files = write_bundle(bundle, cfg.out, cfg.formats)
    for f in files:
        print(f)
    return 0


def main(argv=None):
    try:
        cfg = load_config(argv)
        return run(cfg)
    except ConfigError as exc:
        print(f"paracavity: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"paracavity: numerical failure: {exc}", file=sys.stderr)
        return 3
    except DomainViolation as exc:
        print(f"paracavity: domain violation: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
