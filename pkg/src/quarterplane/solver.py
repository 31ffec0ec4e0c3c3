"""Inverse path: boundary data -> density on Gamma -> Omega -> Phi1, Phi3 -> u.

Omega equals Phi1 on D1 = {|z| < 1, Im z > 0} U {|z| > 1, Im z < 0} and
-Phi1(-z) elsewhere.  Phi1 has a simple pole at z = 1, so Omega has poles at
+-1 in alternating sectors.  They are removed explicitly: with
c = 2 (F(1) + F(-1)) / (ih),

    P1  =  c/(z-1) on inside-upper,  -c/(z-1) on outside-lower,
    P-1 =  c/(z+1) on inside-lower,  -c/(z+1) on outside-upper,

and Omega = C[r - p] + P1 + P-1 where p is the jump of P1 + P-1.
"""

import csv
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .core import (AccuracyError, DomainError, QuadratureSpec, Wavenumber, build_contour_Gamma,
                   build_contour_K, gr_valid)
from .global_relation import (ConventionTable, coef_a, coef_b, jump_density_r, load_default_table,
                              pole_coefficient)
from .quadrature import DensitySamples, cauchy_boundary, cauchy_offcontour
from .transforms import DataTransforms

ON_TOL = 1e-12


def _on_real(z):
    return abs(z.imag) < ON_TOL


def _on_circle(z):
    return abs(abs(z) - 1) < ON_TOL


def gamma_label(z):
    """Label of the Gamma piece containing z (z on the real line or circle)."""
    z = complex(z)
    if _on_real(z):
        x = z.real
        if x < -1:
            return "(-inf,-1)"
        if x < 0:
            return "(-1,0)"
        if x < 1:
            return "(0,1)"
        return "(1,inf)"
    if _on_circle(z):
        if z.imag > 0:
            return "C1" if z.real > 0 else "C2"
        return "C3" if z.real < 0 else "C4"
    raise DomainError(f"{z} is not on Gamma")


def _d1_side(z):
    """Side (+1 left, -1 right) of Gamma facing D1 at a point z on Gamma."""
    if _on_real(z):
        return 1 if abs(z) < 1 else -1
    return 1 if z.imag > 0 else -1


class SectionalField:
    """Density samples on Gamma plus evaluators of Omega and its boundary values."""

    def __init__(self, transforms, table, gamma, spec):
        self.transforms = transforms
        self.table = table
        self.gamma = gamma
        self.spec = spec
        self.h = transforms.h
        self.c = pole_coefficient(transforms)
        values = []
        for p in gamma.pieces:
            values.append(self.rtilde(p.nodes, p.label))
        self.samples = DensitySamples(gamma.pieces, values)
        self._index = {p.label: i for i, p in enumerate(gamma.pieces)}
        self._u00 = None
        self._k = None
        self.corner_spread = None

    # --- density pieces
    def pole_jump(self, z, label):
        z = np.asarray(z, dtype=complex)
        pm = -self.c / (z + 1) if label.startswith("(") else self.c / (z + 1)
        return self.c / (z - 1) + pm

    def r(self, z, label):
        return jump_density_r(self.transforms, z, label, self.table)

    def rtilde(self, z, label):
        return self.r(z, label) - self.pole_jump(z, label)

    def poles(self, z, inside, upper):
        c = self.c
        v = 0j
        if inside and upper:
            v += c / (z - 1)
        if not inside and not upper:
            v -= c / (z - 1)
        if inside and not upper:
            v += c / (z + 1)
        if not inside and upper:
            v -= c / (z + 1)
        return v

    # --- Omega
    def omega(self, z):
        z = complex(z)
        if _on_real(z) or _on_circle(z):
            raise DomainError(f"{z} lies on Gamma; use boundary()")
        v = cauchy_offcontour(self.samples, z, density=self._foot_density)
        return v + self.poles(z, abs(z) < 1, z.imag > 0)

    def _foot_density(self, z, k, step=1e-3):
        """Quadratic Taylor data of r - p at the point of Gamma nearest to z.

        The coefficients come from the interpolant through the foot point and
        its two neighbours at distance `step` along Gamma.  Near 0 and +-1,
        where pieces with different densities meet, the value at node k is
        returned instead.
        """
        on_circle = abs(abs(z) - 1) < abs(z.imag)
        w = z / abs(z) if on_circle else complex(z.real)
        if min(abs(w), abs(w - 1), abs(w + 1)) <= 3 * step or abs(w) > 0.5 * self.gamma.Lambda:
            return self.samples.r[k]
        if on_circle:
            pts = [w * np.exp(-1j * step), w, w * np.exp(1j * step)]
        else:
            pts = [w - step, w, w + step]
        zm, _, zp = pts
        fm, f0, fp = (complex(self.rtilde(np.array([q]), gamma_label(q))[0]) for q in pts)
        d_m = (f0 - fm) / (w - zm)
        b = ((fp - f0) / (zp - w) - d_m) / (zp - zm)
        return w, [f0, d_m + b * (w - zm), b]

    def boundary(self, z, label, side):
        """Boundary value of Omega from the left (+1) or right (-1) of piece `label`."""
        z = complex(z)
        idx = self._index[label]
        f = complex(self.rtilde(np.array([z]), label)[0])
        v = cauchy_boundary(self.samples, z, idx, side, f, delta=self.spec.delta)
        if self.gamma.pieces[idx].kind == "arc":
            inside, upper = side > 0, z.imag > 0
        else:
            inside, upper = abs(z) < 1, side > 0
        return v + self.poles(z, inside, upper)

    def phi1(self, z):
        """Phi1 on the closure of D1 (D1-side boundary value on Gamma)."""
        z = complex(z)
        if _on_real(z) or _on_circle(z):
            return self.boundary(z, gamma_label(z), _d1_side(z))
        if not ((abs(z) < 1 and z.imag > 0) or (abs(z) > 1 and z.imag < 0)):
            raise DomainError(f"{z} is outside D1, where Omega does not equal Phi1")
        return self.omega(z)

    def b_phi3(self, z):
        """b(z) * Phi3(z) from Phi1 and F through the global relation."""
        z = complex(z)
        tr, t = self.transforms, self.table
        a = coef_a(self.h, z)
        w = -z
        w_in_d1 = _on_real(w) or _on_circle(w) or (abs(w) < 1 and w.imag > 0) or (abs(w) > 1 and w.imag < 0)
        if w_in_d1 and gr_valid(-1 / z, self.h):
            return t.phi3_sign * (a * self.phi1(-z) - tr.F(-1 / z))
        z_in_d1 = _on_real(z) or _on_circle(z) or (abs(z) < 1 and z.imag > 0) or (abs(z) > 1 and z.imag < 0)
        if z_in_d1 and gr_valid(z, self.h):
            return t.phi3_sign * (tr.F(z) - a * self.phi1(z))
        raise DomainError(f"Phi3 cannot be reconstructed at {z}")

    # --- downstream quantities
    @property
    def u00(self):
        if self._u00 is None:
            self._u00 = corner_value(self)
        return self._u00

    def rho(self, z, label):
        """Jump function used on the solution-contour piece `label` at z."""
        z = complex(z)
        tr, h = self.transforms, self.h
        if label == "C2":
            return 0j
        a = coef_a(h, z)
        if label in ("(1,inf)", "(0,-1)"):
            return a * self.phi1(z) - 0.5j * tr.U1(z) - self.u00 / 2
        if label in ("(i,iinf)", "(0,-i)", "C1", "C3"):
            return self.b_phi3(z) - 0.5j * tr.U2(z) + self.u00 / 2
        if label == "C4":
            return a * self.phi1(z) - 0.5j * tr.U1(z) + self.b_phi3(z) - 0.5j * tr.U2(z)
        raise KeyError(label)

    def k_representation(self):
        if self._k is None:
            self._k = KRepresentation.from_field(self)
        return self._k


def build_sectional(data, wavenumber, spec=QuadratureSpec(), table=None):
    table = table or load_default_table()
    tr = DataTransforms(data, wavenumber, table.u1_sign)
    return SectionalField(tr, table, build_contour_Gamma(spec), spec)


def phi1_from_omega(field, zeta):
    return field.phi1(zeta)


def phi3_reconstruct(field, zeta):
    z = complex(zeta)
    b = coef_b(field.h, z)
    if abs(b) < 1e-12 * abs(field.h) or min(abs(z - 1j), abs(z + 1j)) < 1e-6:
        raise DomainError("Phi3 reconstruction excluded near zeta = +-i (b vanishes)")
    return field.b_phi3(z) / b


def corner_sequence(field, s_values=(10.0, 20.0, 40.0)):
    """Samples of (ih/2)(z + 1/z) Omega(z) along z = -i s."""
    v = []
    for s in s_values:
        z = -1j * s
        v.append(0.5j * field.h * (z + 1 / z) * field.omega(z))
    return np.array(v)


def corner_value(field, s_values=(10.0, 20.0, 40.0)):
    """u(0,0) as the limit of (ih/2)(z + 1/z) Omega(z) along z = -i s, s -> inf.

    Three samples and two Richardson steps remove the 1/s and 1/s^2 terms.
    The relative difference of the two first-step estimates is stored on the
    field as `corner_spread` (a diagnostic, flagged above 0.1).
    """
    v = corner_sequence(field, s_values)
    r1, r2 = 2 * v[1] - v[0], 2 * v[2] - v[1]
    u00 = complex((4 * r2 - r1) / 3)
    field.corner_spread = float(abs(r2 - r1) / abs(u00)) if u00 != 0 else 0.0
    return u00


# ------------------------------------------------------------ solution contour


SEGMENT_MARGIN = 0.03


@dataclass
class KRepresentation:
    """Nodes, weights (with orientation) and jump values on the pieces of K."""
    h: complex
    labels: list
    nodes: list
    weights: list
    rho: list
    ray_length: float
    segment_floor: float = 1e-4
    _cat: tuple = field(default=None, repr=False)

    @classmethod
    def from_field(cls, fld, spec=None):
        spec = spec or fld.spec
        K = build_contour_K(spec, fld.table.k_orientations())
        labels, nodes, weights, rho = [], [], [], []
        for p in K.pieces:
            labels.append(p.label)
            nodes.append(p.nodes)
            weights.append(p.weights)
            rho.append(np.array([fld.rho(z, p.label) for z in p.nodes]))
        return cls(fld.h, labels, nodes, weights, rho, spec.ray_length, spec.segment_floor)

    @classmethod
    def from_function(cls, h, rho_fn, spec=QuadratureSpec(), table=None):
        """Build from rho_fn(z, label), e.g. jump functions of an exact field."""
        table = table or ConventionTable()
        K = build_contour_K(spec, table.k_orientations())
        rho = [np.array([rho_fn(complex(z), p.label) for z in p.nodes]) for p in K.pieces]
        return cls(h, [p.label for p in K.pieces], [p.nodes for p in K.pieces],
                   [p.weights for p in K.pieces], rho, spec.ray_length, spec.segment_floor)

    def with_signs(self, signs):
        """Copy with per-piece sign multipliers applied to the weights."""
        w = [wt * signs.get(lab, 1) for lab, wt in zip(self.labels, self.weights)]
        return KRepresentation(self.h, self.labels, self.nodes, w, self.rho, self.ray_length,
                               self.segment_floor)

    def _concat(self):
        if self._cat is None:
            z = np.concatenate(self.nodes)
            self._cat = (z, np.concatenate(self.rho) / z * np.concatenate(self.weights))
        return self._cat

    def check_point(self, x, z):
        if not (x > 0 and z > 0):
            raise DomainError(f"evaluation point ({x}, {z}) is not strictly interior")
        T = self.ray_length
        h0, hi = self.h.real, self.h.imag
        # -Re E at the far ends of the rays (1, inf) and (i, i inf)
        decay = min(0.5 * h0 * (T - 1 / T) * x + 0.5 * hi * (T + 1 / T) * z,
                    0.5 * h0 * (T - 1 / T) * z - 0.5 * hi * (T + 1 / T) * x)
        # Near zeta = 0 on (0,-1) the jump tends to a nonzero constant and
        # exp(E) ~ exp(-h (x + iz) / (2t)); along (i, i inf) it tends to a
        # constant and exp(E) ~ exp(-h (z + ix) s / 2).  Both integrals
        # converge only for eps z < x and eps x < z.  Close to those lines the
        # integrands barely decay and oscillate, so keep a margin.
        for w in (self.h * complex(x, z), self.h * complex(z, x)):
            if w.real < SEGMENT_MARGIN * abs(w) or 0.5 * w.real / self.segment_floor < 30:
                raise DomainError(f"point ({x}, {z}) lies outside the sector eps z < x, eps x < z "
                                  "(with margin) where the representation converges")
        if decay < 30:
            raise DomainError(f"point ({x}, {z}) is too close to the boundary for ray length {T}")

    def u(self, x, z):
        """(1/2 pi i) sum over pieces of exp(E) rho / zeta dzeta."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        zz = np.atleast_1d(np.asarray(z, dtype=float))
        for xi, zi in zip(x, zz):
            self.check_point(xi, zi)
        nodes, kern = self._concat()
        h = self.h
        s, d = nodes + 1 / nodes, nodes - 1 / nodes
        out = np.empty(len(x), dtype=complex)
        for i, (xi, zi) in enumerate(zip(x, zz)):
            E = 0.5j * h * s * zi - 0.5 * h * d * xi
            out[i] = np.sum(np.exp(E) * kern) / (2j * np.pi)
        return out if out.size > 1 else complex(out[0])

    def phi(self, x, z, zeta):
        """Contour representation of the eigenfunction at spectral point zeta."""
        nodes, _ = self._concat()
        rho = np.concatenate(self.rho)
        w = np.concatenate(self.weights)
        h = self.h
        E = 0.5j * h * (nodes + 1 / nodes) * z - 0.5 * h * (nodes - 1 / nodes) * x
        return complex(np.sum(np.exp(E) * rho * w / (nodes - zeta)) / (2j * np.pi))


def evaluate_u(field, x, z):
    return field.k_representation().u(x, z)


# ------------------------------------------------------------ solve + output


@dataclass
class SolverOutput:
    points: list
    u: np.ndarray
    u00: complex
    diagnostics: list


def plemelj_check(field, n=10, seed=0, offset=1e-6):
    """Jump of Omega evaluated just off Gamma at random points versus r.

    Returns the worst residual relative to max(1, |r|) and diagnostic rows.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    rows = []
    for i in range(n):
        p = field.gamma.pieces[i % len(field.gamma.pieces)]
        t = rng.uniform(0.2, 0.8)
        if p.kind == "arc":
            z0 = complex(np.exp(1j * (p.start.real + t * (p.end.real - p.start.real))))
            left = -z0
        else:
            lo, hi = max(p.start.real, -5.0), min(p.end.real, 5.0)
            z0 = complex(lo + t * (hi - lo))
            left = 1j
        jump = field.omega(z0 + offset * left) - field.omega(z0 - offset * left)
        rv = complex(field.r(np.array([z0]), p.label)[0])
        res = abs(jump - rv)
        worst = max(worst, res / max(1.0, abs(rv)))
        rows.append((f"plemelj:{p.label}", f"{z0.real:.6f}{z0.imag:+.6f}j", res))
    return worst, rows


def solve(data, wavenumber, points, spec=QuadratureSpec(), table=None):
    fld = build_sectional(data, wavenumber, spec, table)
    worst, rows = plemelj_check(fld)
    diags = list(rows)
    u00 = fld.u00
    diags.append(("corner_spread", "-is,s=10..40", fld.corner_spread))
    kr = fld.k_representation()
    xs = np.array([p[0] for p in points], dtype=float)
    zs = np.array([p[1] for p in points], dtype=float)
    u = np.atleast_1d(kr.u(xs, zs))
    return fld, SolverOutput(list(points), u, u00, diags)


def _fmt(v):
    return f"{v + 0.0:.16e}"    # + 0.0 folds -0.0 into 0.0


def write_csv_atomic(path, header, rows):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp_", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_solution_csv(path, points, u, reference=None):
    header = ["x", "z", "re_u", "im_u", "abs_u"]
    if reference is not None:
        header.append("rel_err")
    rows = []
    for i, ((x, z), v) in enumerate(zip(points, u)):
        row = [float(x), float(z), float(v.real), float(v.imag), float(abs(v))]
        if reference is not None:
            ref = reference[i]
            row.append(float(abs(v - ref) / abs(ref)) if ref != 0 else float(abs(v)))
        rows.append(row)
    write_csv_atomic(path, header, rows)


def write_diagnostics_csv(path, diags):
    write_csv_atomic(path, ["check", "location", "residual"], [(c, l, float(r)) for c, l, r in diags])
