"""Stationary-phase estimates of the arc terms of the solution representation.

In polar coordinates x = R cos(theta), z = R sin(theta) the exponent
E(zeta) = (ih/2)(zeta + 1/zeta) z - (h/2)(zeta - 1/zeta) x is stationary at
zeta1 = sin(theta) - i cos(theta) on C4 and zeta2 = -zeta1 on C2.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .core import DomainError, as_zeta, gauss_legendre

ASYMPTOTIC_RH = 10.0


def _h(h):
    return complex(getattr(h, "h", h))


def phase_E(zeta, x, z, h):
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(zeta == 0):
        raise DomainError("E is singular at zeta = 0")
    h = _h(h)
    return 0.5j * h * (zeta + 1 / zeta) * z - 0.5 * h * (zeta - 1 / zeta) * x


def phase_E_polar(zeta, R, theta, h):
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(zeta == 0):
        raise DomainError("E is singular at zeta = 0")
    h = _h(h)
    return 0.5j * R * h * ((zeta + 1 / zeta) * np.sin(theta) + 1j * (zeta - 1 / zeta) * np.cos(theta))


def phase_E1(zeta, x, z, h):
    """First derivative of E in zeta."""
    zeta = np.asarray(zeta, dtype=complex)
    h = _h(h)
    return 0.5j * h * (1 - zeta ** -2) * z - 0.5 * h * (1 + zeta ** -2) * x


def phase_E2(zeta, x, z, h):
    """Second derivative of E in zeta: (ihz + hx) / zeta^3."""
    zeta = np.asarray(zeta, dtype=complex)
    h = _h(h)
    return (1j * h * z + h * x) / zeta ** 3


def stationary_points(theta):
    if not -1e-14 <= theta <= np.pi / 2 + 1e-14:
        raise DomainError("theta must lie in [0, pi/2]")
    z1 = complex(np.sin(theta), -np.cos(theta))
    return z1, -z1


def _regime(R, h):
    Rh = R * abs(_h(h))
    if Rh < ASYMPTOTIC_RH:
        warnings.warn(f"Rh = {Rh:.3g} is below the asymptotic regime (Rh >= {ASYMPTOTIC_RH})",
                      RuntimeWarning, stacklevel=3)


def farfield_C4(rho31_at_zeta1, R, theta, h):
    """Leading stationary-phase value of the C4 term."""
    h = _h(h)
    _regime(R, h)
    z1, _ = stationary_points(theta)
    return (rho31_at_zeta1 / z1 * np.exp(1j * R * h) * np.exp(1j * theta) * np.sqrt(2 / (R * h))
            * np.exp(-0.25j * np.pi) * np.sqrt(np.pi) / (2j * np.pi))


def farfield_C2(rho13_at_point, R, theta, h, reading="zeta2"):
    """Leading stationary-phase value of the C2 term.

    `reading` selects the point in the prefactor rho13(zeta)/zeta: "zeta2"
    (the stationary point on C2, default) or "zeta1"; the caller supplies
    rho13 at that same point.
    """
    h = _h(h)
    _regime(R, h)
    z1, z2 = stationary_points(theta)
    zp = {"zeta2": z2, "zeta1": z1}[reading]
    return (rho13_at_point / zp * np.exp(-1j * R * h) * np.exp(1j * theta) * np.sqrt(2 / (R * h))
            * np.exp(0.25j * np.pi) * np.sqrt(np.pi) / (2j * np.pi))


# ------------------------------------------------------------ direct quadrature

ARC_RANGES = {"C4": (-np.pi / 2, 0.0), "C2": (np.pi / 2, np.pi)}


@dataclass
class ArcSamples:
    """Gauss nodes on a quarter arc (counterclockwise) with jump values."""
    label: str
    zeta: np.ndarray
    dzeta: np.ndarray
    rho: np.ndarray

    @classmethod
    def build(cls, label, rho_fn, panels=100, n=16):
        a, b = ARC_RANGES[label]
        xg, wg = gauss_legendre(n)
        e = np.linspace(a, b, panels + 1)
        lo, hi = e[:-1, None], e[1:, None]
        th = ((lo + hi) / 2 + (hi - lo) / 2 * xg).ravel()
        w = ((hi - lo) / 2 * wg).ravel()
        z = np.exp(1j * th)
        rho = np.array([rho_fn(complex(q)) for q in z], dtype=complex)
        return cls(label, z, 1j * z * w, rho)

    def integral(self, R, theta, h):
        x, z = R * np.cos(theta), R * np.sin(theta)
        E = phase_E(self.zeta, x, z, h)
        return complex(np.sum(np.exp(E) * self.rho / self.zeta * self.dzeta) / (2j * np.pi))


@dataclass
class FarFieldRow:
    Rh: float
    theta: float
    direct: complex
    estimate: complex

    @property
    def ratio(self):
        return self.direct / self.estimate if self.estimate != 0 else complex("nan")

    @property
    def abs_err(self):
        return abs(self.ratio - 1) if self.estimate != 0 else float("nan")


@dataclass
class FarFieldReport:
    rows: list
    c2_over_c4: list          # |direct C2| / |direct C4| per row
    rate: float               # fitted exponent p in |ratio - 1| ~ (Rh)^-p
    c2_reading_errors: dict   # "reading/orientation" -> worst |estimate/direct - 1| on C2

    def decreasing(self):
        e = [r.abs_err for r in self.rows]
        return all(b < a for a, b in zip(e, e[1:]))


def farfield_verify(rho31, rho13, h, Rh_list, theta=np.pi / 4, panels=100):
    """Compare direct arc quadrature with the stationary-phase estimates.

    rho31, rho13 are callables on C4 and C2.  Rows with vanishing estimates
    (zero data) are reported with nan ratio.  The C4 integral runs
    counterclockwise.  The C2 estimate is compared for both point readings
    and both traversal directions of C2.
    """
    h = _h(h)
    if not 0.05 <= theta <= np.pi / 2 - 0.05:
        raise DomainError("theta within 0.05 of an arc endpoint is excluded")
    c4 = ArcSamples.build("C4", rho31, panels)
    c2 = ArcSamples.build("C2", rho13, panels)
    z1, z2 = stationary_points(theta)
    r31_1 = complex(rho31(z1))
    r13 = {"zeta2": complex(rho13(z2)), "zeta1": complex(rho13(z1))}
    rows, c2c4 = [], []
    reading_err = {f"{rd}/{o}": float("nan") for rd in ("zeta2", "zeta1") for o in ("ccw", "cw")}
    for Rh in Rh_list:
        R = Rh / h.real
        d4 = c4.integral(R, theta, h)
        d2 = c2.integral(R, theta, h)
        rows.append(FarFieldRow(float(Rh), float(theta), d4, farfield_C4(r31_1, R, theta, h)))
        c2c4.append(abs(d2) / abs(d4) if d4 != 0 else float("nan"))
        for key in reading_err:
            rd, o = key.split("/")
            est = farfield_C2(r13[rd], R, theta, h, rd)
            if abs(d2) > 1e-8 * (abs(d2) + abs(d4)):   # C2 term not at round-off level
                d = d2 if o == "ccw" else -d2
                reading_err[key] = np.nanmax([reading_err[key], abs(est / d - 1)])
    errs = np.array([r.abs_err for r in rows])
    ok = np.isfinite(errs) & (errs > 0)
    if ok.sum() >= 2:
        rate = float(-np.polyfit(np.log(np.asarray(Rh_list, dtype=float)[ok]), np.log(errs[ok]), 1)[0])
    else:
        rate = float("nan")
    return FarFieldReport(rows, c2c4, rate, reading_err)


def oracle_arc_rho(src):
    """(rho31 on C4, rho13 on C2) of an oracle source from its exact transforms."""
    from .oracle import oracle_rho

    return (lambda z: oracle_rho(src, z)[2]), (lambda z: -oracle_rho(src, z)[2])


def write_report_csv(path, report):
    from .solver import write_csv_atomic

    rows = [(r.Rh, r.theta, float(np.real(r.ratio)), float(np.imag(r.ratio)), float(r.abs_err))
            for r in report.rows]
    write_csv_atomic(path, ["Rh", "theta", "ratio_re", "ratio_im", "abs_err"], rows)
