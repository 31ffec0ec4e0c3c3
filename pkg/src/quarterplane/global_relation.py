"""Algebra linking data transforms, trace transforms and jump functions.

With a = (ih/4)(zeta - 1/zeta) and b = (h/4)(zeta + 1/zeta) the global
relation reads

    a Phi1(zeta) + s_phi3 * b Phi3(zeta) = F(zeta),  F = (i/2)(U2 + s_u1 U1),

where the signs s_phi3, s_u1 are entries of the convention table.  The
jump functions are

    rho21 = a Phi1 - (i/2) U1 - u00/2,   rho32 = b Phi3 - (i/2) U2 + u00/2,
    rho31 = rho21 + rho32.
"""

import importlib.resources
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .core import ConfigError, DomainError, as_zeta, gr_valid


def coef_a(h, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    return 0.25j * h * (zeta - 1 / zeta)


def coef_b(h, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    return 0.25 * h * (zeta + 1 / zeta)


# ------------------------------------------------------------ convention table

PAIRINGS = {
    # intervals carrying A = F(z) + F(-1/z) and B = F(-z) + F(1/z); the first
    # interval of each pair is traversed with the row sign, the second with
    # its opposite
    "crossed": (("(0,1)", "(-inf,-1)"), ("(1,inf)", "(-1,0)")),
    "adjacent": (("(0,1)", "(-1,0)"), ("(1,inf)", "(-inf,-1)")),
}


@dataclass(frozen=True)
class ConventionTable:
    """Every sign and orientation choice consumed by the density and solver.

    u1_sign      sign of U1 in F
    phi3_sign    sign of the Phi3 term in the global relation
    a_sign       density on (0,1), C1, C2 is a_sign * A / a
    b_sign       density on (1,inf), C3, C4 is b_sign * B / a
    pairing      which real intervals carry A and B (see PAIRINGS)
    k_*          traversal direction of the pieces of the solution contour
                 relative to: outward for rays, away from 0 for segments,
                 counterclockwise for arcs
    """
    u1_sign: int = 1
    phi3_sign: int = 1
    a_sign: int = 1
    b_sign: int = 1
    pairing: str = "crossed"
    k_ray_1: int = 1
    k_ray_i: int = 1
    k_seg_mi: int = 1
    k_seg_m1: int = 1
    k_C1: int = 1
    k_C2: int = 1
    k_C3: int = -1
    k_C4: int = 1

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "pairing":
                if v not in PAIRINGS:
                    raise ConfigError(f"unknown pairing {v!r}")
            elif v not in (1, -1):
                raise ConfigError(f"{f.name} must be +1 or -1, got {v!r}")

    def k_orientations(self):
        return {"(1,inf)": self.k_ray_1, "(i,iinf)": self.k_ray_i, "(0,-i)": self.k_seg_mi,
                "(0,-1)": self.k_seg_m1, "C1": self.k_C1, "C2": self.k_C2, "C3": self.k_C3, "C4": self.k_C4}

    def density_rule(self, label):
        """(combo, sign) with r = sign * combo / a on the Gamma piece `label`."""
        if label in ("C1", "C2"):
            return "A", self.a_sign
        if label in ("C3", "C4"):
            return "B", self.b_sign
        (a1, a2), (b1, b2) = PAIRINGS[self.pairing]
        return {a1: ("A", self.a_sign), a2: ("A", -self.a_sign),
                b1: ("B", self.b_sign), b2: ("B", -self.b_sign)}[label]

    def to_text(self):
        lines = ["# quarterplane convention table (key=value)"]
        for k, v in asdict(self).items():
            lines.append(f"{k}={v:+d}" if isinstance(v, int) else f"{k}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        vals = {}
        names = {f.name for f in fields(cls)}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"convention line {lineno}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            if k not in names:
                raise ConfigError(f"convention line {lineno}: unknown key {k!r}")
            vals[k] = v if k == "pairing" else int(v)
        return cls(**vals)

    def with_flags(self, **kw):
        return replace(self, **kw)


def load_default_table():
    text = importlib.resources.files("quarterplane").joinpath("conventions.txt").read_text()
    return ConventionTable.from_text(text)


# ------------------------------------------------------------ residuals


def _val(f, z):
    return complex(f(z)) if callable(f) else complex(f)


def global_residual(Phi1, Phi3, F, zeta, h, table=None, check_domain=True):
    """a Phi1 + s b Phi3 - F at zeta; Phi1, Phi3, F are callables or values."""
    z = as_zeta(zeta)
    t = table or ConventionTable()
    if check_domain and not gr_valid(z, h):
        raise DomainError(f"zeta={z} lies in the sector where the global relation does not hold")
    return coef_a(h, z) * _val(Phi1, z) + t.phi3_sign * coef_b(h, z) * _val(Phi3, z) - _val(F, z)


def symmetry_residuals(Phi1, Phi3, F, zeta, h, table=None, check_domain=True):
    """Residuals of the relation transported by zeta -> -1/zeta, 1/zeta, -zeta.

    Uses Phi1(1/z) = Phi1(z) and Phi3(-1/z) = Phi3(z) so that each identity
    involves Phi1, Phi3 at the arguments z, -z, 1/z only.
    """
    z = as_zeta(zeta)
    t = table or ConventionTable()
    s = t.phi3_sign
    a, b = coef_a(h, z), coef_b(h, z)
    out = []
    for img, fn in ((-1 / z, lambda: a * Phi1(-z) - s * b * Phi3(z) - F(-1 / z)),
                    (1 / z, lambda: -a * Phi1(z) + s * b * Phi3(1 / z) - F(1 / z)),
                    (-z, lambda: -a * Phi1(-z) - s * b * Phi3(1 / z) - F(-z))):
        if check_domain and not gr_valid(img, h):
            raise DomainError(f"image point {img} lies outside the validity set")
        out.append(complex(fn()))
    return tuple(out)


def assemble_rho(Phi1, Phi3, U1, U2, u00, zeta, which, h):
    z = as_zeta(zeta)
    r21 = coef_a(h, z) * Phi1 - 0.5j * U1 - u00 / 2
    r32 = coef_b(h, z) * Phi3 - 0.5j * U2 + u00 / 2
    if which == 21:
        return complex(r21)
    if which == 32:
        return complex(r32)
    if which == 31:
        return complex(r21 + r32)
    raise ValueError("which must be 21, 32 or 31")


@dataclass(frozen=True)
class ClosureReport:
    max_abs: float
    scale: float
    relative: float
    worst_zeta: complex
    tol: float
    passed: bool


def radiation_closure(zetas, rho31_values, scale=1.0, tol=5e-2):
    """Check rho31 = 0 on the second-quadrant arc to tol * scale."""
    v = np.abs(np.asarray(rho31_values, dtype=complex))
    if len(v) == 0:
        raise ValueError("no samples")
    k = int(np.argmax(v))
    scale = float(scale) if scale > 0 else 1.0
    return ClosureReport(float(v[k]), scale, float(v[k]) / scale, complex(np.asarray(zetas)[k]), tol,
                         bool(v[k] <= tol * scale))


def jump_density_r(transforms, zeta, label, table=None):
    """Density r on the Gamma piece `label` at zeta: sign * combo / a."""
    t = table or ConventionTable()
    combo, sign = t.density_rule(label)
    z = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(z - 1) < 1e-14) or np.any(np.abs(z + 1) < 1e-14) or np.any(z == 0):
        raise DomainError("density requested inside the pole exclusion at 0 or +-1")
    c = transforms.A(z) if combo == "A" else transforms.B(z)
    return sign * c / coef_a(transforms.h, z)


def pole_coefficient(transforms):
    """Residue c of Phi1 at zeta = 1 times (zeta - 1): 2 (F(1) + F(-1)) / (ih)."""
    return 2 * (transforms.F(1.0 + 0j) + transforms.F(-1.0 + 0j)) / (1j * transforms.h)


# ------------------------------------------------------------ sign audit

AUDIT_FLAGS = ("u1_sign", "phi3_sign", "a_sign", "b_sign", "pairing", "k_C3")
AUDIT_PROBES = ((1.0, 1.0), (2.0, 0.5), (0.5, 2.0))


class AuditAmbiguityError(RuntimeError):
    """No candidate table beats the runner-up by the required margin."""

    def __init__(self, message, scores=None):
        super().__init__(message)
        self.scores = scores


@dataclass(frozen=True)
class AuditResult:
    table: ConventionTable
    score: float
    runner_up: float
    margin: float
    scores: tuple      # (table, total, (gr, jump, u)) in enumeration order


def audit_candidates(base=None):
    """All 64 tables obtained by varying the flagged conventions of `base`."""
    base = base or ConventionTable()
    out = []
    for bits in range(2 ** len(AUDIT_FLAGS)):
        kw = {}
        for j, name in enumerate(AUDIT_FLAGS):
            on = (bits >> j) & 1
            if name == "pairing":
                kw[name] = "adjacent" if on else "crossed"
            else:
                kw[name] = -1 if on else 1
        out.append(base.with_flags(**kw))
    return out


def _gr_samples():
    """Fixed spectral sample points (off the real line and the unit circle)."""
    pts = []
    for r in (0.45, 0.7, 1.6, 2.5):
        for th in np.linspace(-np.pi, np.pi, 16, endpoint=False) + 0.1:
            pts.append(complex(r * np.exp(1j * th)))
    return pts


def relation_residuals(Phi1, Phi3, F, zeta, h, table=None):
    """Global and symmetry residuals at zeta, each only where its image point is valid.

    Returns a list of (name, residual).
    """
    z = as_zeta(zeta)
    t = table or ConventionTable()
    s = t.phi3_sign
    a, b = coef_a(h, z), coef_b(h, z)
    out = []
    if gr_valid(z, h):
        out.append(("global", complex(a * Phi1(z) + s * b * Phi3(z) - F(z))))
    for name, img, fn in (("sym_neginv", -1 / z, lambda: a * Phi1(-z) - s * b * Phi3(z) - F(-1 / z)),
                          ("sym_inv", 1 / z, lambda: -a * Phi1(z) + s * b * Phi3(1 / z) - F(1 / z)),
                          ("sym_neg", -z, lambda: -a * Phi1(-z) - s * b * Phi3(1 / z) - F(-z))):
        if gr_valid(img, h):
            out.append((name, complex(fn())))
    return out


def _jump_samples():
    """(label, zeta, omega-left-side, omega-right-side) sectors on each Gamma piece."""
    out = []
    for lab, xs in (("(-inf,-1)", (-3.0, -1.7)), ("(-1,0)", (-0.7, -0.3)),
                    ("(0,1)", (0.3, 0.7)), ("(1,inf)", (1.7, 3.0))):
        for x in xs:
            z = complex(x)
            inside = abs(x) < 1
            out.append((lab, z, (inside, True), (inside, False)))
    for lab, ths in (("C1", (0.4, 1.1)), ("C2", (2.0, 2.7)), ("C3", (-2.7, -2.0)), ("C4", (-1.1, -0.4))):
        for th in ths:
            z = complex(np.exp(1j * th))
            upper = z.imag > 0
            out.append((lab, z, (True, upper), (False, upper)))
    return out


def _omega_from_phi1(phi1, z, sector):
    """Omega in a sector from an exact Phi1: Phi1(z) on D1, -Phi1(-z) elsewhere."""
    inside, upper = sector
    in_d1 = inside == upper
    return phi1(z) if in_d1 else -phi1(-z)


def sign_audit(src, base=None, spec=None, probes=AUDIT_PROBES, margin=10.0):
    """Pick the convention table that reproduces an exact field.

    Each candidate is scored by three relative residuals against the oracle
    source `src`: the global relation and its three symmetry images, the
    Plemelj jump of Omega on Gamma versus the density rule, and u at the
    probe points from the oracle jump functions on the solution contour with
    the candidate orientations.  The minimizer must beat the runner-up by
    `margin`, otherwise AuditAmbiguityError is raised.
    """
    from .core import QuadratureSpec
    from .oracle import oracle_rho, oracle_transforms
    from .solver import KRepresentation

    spec = spec or QuadratureSpec()
    h = src.h
    cache = {}

    def tr(z):
        z = complex(z)
        if z not in cache:
            cache[z] = oracle_transforms(src, z)
        return cache[z]

    def F(z, s1):
        t = tr(z)
        return 0.5j * (t["U2"] + s1 * t["U1"])

    phi1 = lambda z: tr(z)["Phi1"]
    phi3 = lambda z: tr(z)["Phi3"]

    gr_pts = []
    for z in _gr_samples():
        try:
            for w in (z, -z, 1 / z, -1 / z):
                tr(w)
        except DomainError:
            continue        # a continuation cut passes through an image point
        gr_pts.append(z)
    jumps = [(lab, z, _omega_from_phi1(phi1, z, sl) - _omega_from_phi1(phi1, z, sr))
             for lab, z, sl, sr in _jump_samples()]
    jump_scale = max(abs(j) for _, _, j in jumps)

    def rho_fn(z, label):
        if label == "C2":
            return 0j
        r21, r32, r31 = oracle_rho(src, z)
        if label in ("(1,inf)", "(0,-1)"):
            return r21
        if label == "C4":
            return r31
        return r32

    k_base = KRepresentation.from_function(h, rho_fn, spec, ConventionTable(k_C3=1))
    u_ref = np.array([complex(src.u(x, z)) for x, z in probes])
    u_scale = max(float(np.max(np.abs(u_ref))), 1e-300)

    scored = []
    for t in audit_candidates(base):
        s1 = t.u1_sign
        Fz = lambda z: F(z, s1)
        g = 0.0
        gs = 0.0
        for z in gr_pts:
            for _, v in relation_residuals(phi1, phi3, Fz, z, h, t):
                g = max(g, abs(v))
            gs = max(gs, abs(Fz(z)))
        g = g / gs if gs > 0 else 0.0
        jres = 0.0
        for lab, z, j in jumps:
            combo, sign = t.density_rule(lab)
            c = Fz(z) + Fz(-1 / z) if combo == "A" else Fz(-z) + Fz(1 / z)
            jres = max(jres, abs(sign * c / coef_a(h, z) - j))
        jres = jres / jump_scale if jump_scale > 0 else 0.0
        kr = k_base.with_signs(t.k_orientations())
        u = np.array([kr.u(x, z) for x, z in probes])
        ures = float(np.max(np.abs(u - u_ref))) / u_scale
        scored.append((t, g + jres + ures, (g, jres, ures)))

    order = sorted(range(len(scored)), key=lambda i: (scored[i][1], i))
    best, second = scored[order[0]], scored[order[1]]
    if not best[1] * margin < second[1]:
        raise AuditAmbiguityError(
            f"best score {best[1]:.3e} does not beat the runner-up {second[1]:.3e} by {margin}x",
            scores=tuple(scored))
    ratio = second[1] / best[1] if best[1] > 0 else float("inf")
    return AuditResult(best[0], best[1], second[1], ratio, tuple(scored))
