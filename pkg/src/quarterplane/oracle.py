"""Manufactured solutions and independent checkers.

The reference field is a cylindrical wave radiating from a point (-a, -b)
outside the quadrant, u = H0(h R') with R' the distance to the source.
Its edge data and traces are exposed in the factored form amp * exp(phase)
used by the transform module, so their transforms can be continued
analytically.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import hankel1e, hankel2e

from .core import DomainError, Wavenumber, as_zeta
from .quadrature import integrate_finite
from .transforms import AnalyticHalfLine, BoundaryData, CompactHalfLine, half_line_transform

EULER_GAMMA = 0.57721566490153286061
SERIES_RADIUS = 13.0
HANKEL_SERIES_RADIUS = 13.0


# ------------------------------------------------------------ cylinder functions


def _csum(terms):
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def _check_arg(w):
    w = complex(w)
    if w.imag < -0.1:
        raise DomainError(f"cylinder functions need Im w >= -0.1, got {w}")
    if w.real <= 0 and abs(w.imag) < 1e-14 and w != 0:
        raise DomainError(f"argument {w} lies on the branch cut (negative real axis)")
    return w


def _series_J(nu, w, kmax=200):
    q = -(w / 2) ** 2
    term = (w / 2) ** nu / math.factorial(nu)
    terms = [term]
    for k in range(1, kmax):
        term = term * q / (k * (k + nu))
        terms.append(term)
        if abs(term) < 1e-18 * max(abs(x) for x in terms[-8:]) and k > 4:
            break
    return _csum(terms)


def _series_Y(nu, w, kmax=200):
    lg = np.log(w / 2)
    jv = _series_J(nu, w)
    q = -(w / 2) ** 2
    if nu == 0:
        terms = []
        term, H = 1.0 + 0j, 0.0
        for k in range(1, kmax):
            term = term * q / (k * k)
            H += 1.0 / k
            terms.append(-H * term)
            if abs(term) * (H + 1) < 1e-18 and k > 4:
                break
        return (2 / np.pi) * ((lg + EULER_GAMMA) * jv + _csum(terms))
    # nu == 1
    psi = lambda m: -EULER_GAMMA + sum(1.0 / j for j in range(1, m))
    terms = []
    term = w / 2
    for k in range(0, kmax):
        if k:
            term = term * q / (k * (k + 1))
        terms.append((psi(k + 1) + psi(k + 2)) * term)
        if abs(term) < 1e-18 and k > 4:
            break
    return (2 / np.pi) * jv * lg - 2 / (np.pi * w) - _csum(terms) / np.pi


def _asym_hankel(nu, w, kind):
    """Hankel's expansion, truncated at its smallest term."""
    mu = 4 * nu * nu
    sgn = 1j if kind == 1 else -1j
    terms = [1.0 + 0j]
    a = 1.0 + 0j
    for k in range(1, 60):
        a = a * (mu - (2 * k - 1) ** 2) / (k * 8 * w) * sgn
        if abs(a) > abs(terms[-1]):
            break
        terms.append(a)
        if abs(a) < 1e-17:
            break
    chi = w - nu * np.pi / 2 - np.pi / 4
    return np.sqrt(2 / (np.pi * w)) * np.exp(sgn * chi) * _csum(terms)


def _asym_pair(nu, w):
    """(H^(1), H^(2)) of order nu from the expansion, using the reflection
    w -> -w for Re w < 0 so the expansion is only used with |arg w| <= pi/2."""
    if w.real >= 0:
        return _asym_hankel(nu, w, 1), _asym_hankel(nu, w, 2)
    wp = -w
    h1p, h2p = _asym_hankel(nu, wp, 1), _asym_hankel(nu, wp, 2)
    if nu == 0:
        return -h2p, h1p + 2 * h2p
    return h2p, -h1p - 2 * h2p


def bessel_J0(w):
    w = _check_arg(w)
    if abs(w) <= SERIES_RADIUS:
        return _series_J(0, w)
    h1, h2 = _asym_pair(0, w)
    return 0.5 * (h1 + h2)


def bessel_Y0(w):
    w = _check_arg(w)
    if w == 0:
        raise DomainError("Y0 is singular at 0")
    if abs(w) <= SERIES_RADIUS:
        return _series_Y(0, w)
    h1, h2 = _asym_pair(0, w)
    return (h1 - h2) / 2j


def hankel_H0_1(w):
    w = _check_arg(w)
    if abs(w) <= HANKEL_SERIES_RADIUS:
        return _series_J(0, w) + 1j * _series_Y(0, w)
    return _asym_pair(0, w)[0]


def hankel_H1_1(w):
    w = _check_arg(w)
    if abs(w) <= HANKEL_SERIES_RADIUS:
        return _series_J(1, w) + 1j * _series_Y(1, w)
    return _asym_pair(1, w)[0]


# ------------------------------------------------------------ point source


@dataclass(frozen=True)
class HankelSource:
    """u = H0(h R') with R' = |(x + a, z + b)|.

    kind='outgoing' uses H0^(1), kind='incoming' uses H0^(2); at eps = 0
    the latter is the complex conjugate of the former.
    """
    a: float
    b: float
    wavenumber: Wavenumber
    kind: str = "outgoing"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError("source offsets a, b must be positive")
        if self.kind not in ("outgoing", "incoming"):
            raise ValueError("kind must be 'outgoing' or 'incoming'")

    @property
    def h(self):
        return self.wavenumber.h

    @property
    def sigma(self):
        return 1 if self.kind == "outgoing" else -1

    def _he(self, nu, w):
        return hankel1e(nu, w) if self.sigma > 0 else hankel2e(nu, w)

    def dist(self, x, z):
        x = np.asarray(x, dtype=complex)
        z = np.asarray(z, dtype=complex)
        return np.sqrt((x + self.a) ** 2 + (z + self.b) ** 2)

    def factored(self, x, z):
        """(amp_u, amp_ux, amp_uz, phase) with u = amp_u * exp(phase)."""
        R = self.dist(x, z)
        h = self.h
        w = h * R
        h0 = self._he(0, w)
        h1 = self._he(1, w)
        x = np.asarray(x, dtype=complex)
        z = np.asarray(z, dtype=complex)
        return h0, -h * h1 * (x + self.a) / R, -h * h1 * (z + self.b) / R, self.sigma * 1j * w

    def u(self, x, z):
        a0, _, _, ph = self.factored(x, z)
        return a0 * np.exp(ph)

    def grad(self, x, z):
        _, ax, az, ph = self.factored(x, z)
        e = np.exp(ph)
        return ax * e, az * e

    @property
    def u00(self):
        return complex(self.u(0.0, 0.0))

    def _edge(self, which, comp):
        # only the Hankel function that the requested component needs is evaluated
        k = self.sigma * self.h
        h = self.h

        def xz(t):
            t = np.asarray(t, dtype=complex)
            return (np.zeros_like(t), t) if which == "z" else (t, np.zeros_like(t))

        def amp(t):
            x, z = xz(t)
            R = self.dist(x, z)
            if comp == 0:
                return self._he(0, h * R)
            off = x + self.a if comp == 1 else z + self.b
            return -h * self._he(1, h * R) * off / R

        def phase(t):
            x, z = xz(t)
            return self.sigma * 1j * h * self.dist(x, z)

        return AnalyticHalfLine(amp, phase, k, scale=min(self.a, self.b))

    def boundary_data(self):
        return BoundaryData(self._edge("z", 1), self._edge("x", 2))

    def traces(self):
        """(gamma_z, gamma_x): u(0, z) and u(x, 0)."""
        return self._edge("z", 0), self._edge("x", 0)

    def windowed_boundary_data(self, L, taper=0.1):
        w = smooth_window(L, taper)
        u1 = lambda t: self.grad(0.0, t)[0] * w(t)
        u2 = lambda t: self.grad(t, 0.0)[1] * w(t)
        k = abs(self.h)
        return BoundaryData(CompactHalfLine(u1, L, k), CompactHalfLine(u2, L, k))

    def windowed_traces(self, L, taper=0.1):
        w = smooth_window(L, taper)
        k = abs(self.h)
        gz = lambda t: self.u(0.0, t) * w(t)
        gx = lambda t: self.u(t, 0.0) * w(t)
        return CompactHalfLine(gz, L, k), CompactHalfLine(gx, L, k)


def c2_rho31_samples(src, n=24, L=None, table=None, u1_scale=1.0):
    """rho31 = a Phi1 + s b Phi3 - F at n points inside the arc C2.

    With L given, traces and data are cut off smoothly at L and transformed
    over [0, L] without continuation; otherwise the continued transforms of
    the exact half-line functions are used.  u1_scale multiplies the data u1
    (perturbation runs).  Returns (zetas, values, scale) where scale is the
    largest |F| among the samples.
    """
    from .global_relation import ConventionTable, coef_a, coef_b
    from .transforms import lam_x, lam_z

    t = table or ConventionTable()
    th = np.linspace(np.pi / 2, np.pi, n + 2)[1:-1]
    zs = np.exp(1j * th)
    if L is None:
        d, (gz, gx) = src.boundary_data(), src.traces()
    else:
        d, (gz, gx) = src.windowed_boundary_data(L), src.windowed_traces(L)
    h = src.h
    lz, lx = lam_z(h, zs), lam_x(h, zs)
    U1, U2 = half_line_transform(d.u1, lz), half_line_transform(d.u2, lx)
    P1, P3 = half_line_transform(gz, lz), half_line_transform(gx, lx)
    F = 0.5j * (U2 + t.u1_sign * u1_scale * U1)
    rho = coef_a(h, zs) * P1 + t.phi3_sign * coef_b(h, zs) * P3 - F
    return zs, rho, float(np.max(np.abs(F)))


def window_length(wavenumber, level=1e-4):
    """Shortest L with exp(-eps h0 L / 2) <= level: the source field has decayed
    to `level` relative size where the window cuts it off."""
    if not wavenumber.eps > 0:
        raise DomainError("a window length needs eps > 0")
    return 2 * math.log(1 / level) / (wavenumber.eps * wavenumber.h0)


def smooth_window(L, taper=0.1):
    """C-infinity cutoff equal to 1 on [0, (1 - taper) L] and 0 beyond L."""
    t0 = (1 - taper) * L

    def w(t):
        t = np.asarray(t, dtype=float)
        s = np.clip((t - t0) / (L - t0), 0.0, 1.0)
        out = np.ones_like(s)
        mid = (s > 0) & (s < 1)
        sm = s[mid]
        e1, e2 = np.exp(-1 / (1 - sm)), np.exp(-1 / sm)
        out[mid] = e1 / (e1 + e2)
        out[s >= 1] = 0.0
        return out

    return w


def oracle_u(src, x, z):
    return src.u(x, z)


def oracle_grad(src, x, z):
    return src.grad(x, z)


# ------------------------------------------------------------ Lax pair data


def lax_Q(src, zeta, x, z):
    """Factored (amp, phase) of Q = tau/2 - (ih/2 zeta) u with tau = u_z - i u_x."""
    a0, ax, az, ph = src.factored(x, z)
    tau = az - 1j * ax
    return 0.5 * tau - 0.5j * src.h / zeta * a0, ph


def lax_Qt(src, zeta, x, z):
    """Factored (amp, phase) of Q~ = (i/2) tau - (h/2 zeta) u."""
    a0, ax, az, ph = src.factored(x, z)
    tau = az - 1j * ax
    return 0.5j * tau - 0.5 * src.h / zeta * a0, ph


def volterra_phi(src, j, zeta, x, z):
    """Eigenfunctions obtained by integrating the Lax pair along the three rays.

    phi1 integrates in z from infinity, phi3 in x from infinity, phi2 from the
    corner along the bottom edge and then upward.
    """
    zeta = as_zeta(zeta)
    h = src.h
    s, d = zeta + 1 / zeta, zeta - 1 / zeta
    x, z = float(x), float(z)
    if j == 1:
        f = AnalyticHalfLine(lambda t: lax_Q(src, zeta, x, z + t)[0],
                             lambda t: lax_Q(src, zeta, x, z + t)[1], src.sigma * h)
        return -half_line_transform(f, -0.5j * h * s)
    if j == 3:
        f = AnalyticHalfLine(lambda t: lax_Qt(src, zeta, x + t, z)[0],
                             lambda t: lax_Qt(src, zeta, x + t, z)[1], src.sigma * h)
        return -half_line_transform(f, 0.5 * h * d)
    if j == 2:
        def g1(xp):
            amp, ph = lax_Qt(src, zeta, xp, 0.0)
            return amp * np.exp(ph + 0.5j * h * s * z + 0.5 * h * d * (xp - x))

        def g2(zp):
            amp, ph = lax_Q(src, zeta, x, zp)
            return amp * np.exp(ph + 0.5j * h * s * (z - zp))

        return integrate_finite(g1, 0.0, x, tol=1e-13) + integrate_finite(g2, 0.0, z, tol=1e-13)
    raise ValueError("j must be 1, 2 or 3")


def rho_from_eigenfunctions(src, zeta):
    """(rho13, rho21, rho32) from the eigenfunctions at the corner."""
    zeta = as_zeta(zeta)
    h = src.h
    s, d = zeta + 1 / zeta, zeta - 1 / zeta
    fq = AnalyticHalfLine(lambda t: lax_Q(src, zeta, 0.0, t)[0], lambda t: lax_Q(src, zeta, 0.0, t)[1], src.sigma * h)
    fqt = AnalyticHalfLine(lambda t: lax_Qt(src, zeta, t, 0.0)[0], lambda t: lax_Qt(src, zeta, t, 0.0)[1],
                           src.sigma * h)
    iq = half_line_transform(fq, -0.5j * h * s)
    iqt = half_line_transform(fqt, 0.5 * h * d)
    return -iq + iqt, iq, -iqt


def oracle_transforms(src, zeta):
    """Dict with U1, U2, Phi1, Phi3 of the source at zeta (continued values)."""
    from .transforms import lam_x, lam_z
    zeta = as_zeta(zeta)
    d = src.boundary_data()
    gz, gx = src.traces()
    lz, lx = lam_z(src.h, zeta), lam_x(src.h, zeta)
    return {"U1": half_line_transform(d.u1, lz), "U2": half_line_transform(d.u2, lx),
            "Phi1": half_line_transform(gz, lz), "Phi3": half_line_transform(gx, lx)}


def oracle_rho(src, zeta):
    """(rho21, rho32, rho31) from traces and data of the source."""
    zeta = as_zeta(zeta)
    t = oracle_transforms(src, zeta)
    h, u00 = src.h, src.u00
    a = 0.25j * h * (zeta - 1 / zeta)
    b = 0.25 * h * (zeta + 1 / zeta)
    r21 = a * t["Phi1"] - 0.5j * t["U1"] - u00 / 2
    r32 = b * t["Phi3"] - 0.5j * t["U2"] + u00 / 2
    return r21, r32, r21 + r32


# ------------------------------------------------------------ PDE residual


def helmholtz_residual(u, x, z, delta, h):
    """Five-point stencil residual of u_xx + u_zz + h^2 u at (x, z)."""
    if x - delta <= 0 or z - delta <= 0:
        raise DomainError("stencil leaves the quadrant")
    c = u(x, z)
    lap = (u(x + delta, z) + u(x - delta, z) + u(x, z + delta) + u(x, z - delta) - 4 * c) / delta ** 2
    return complex(lap + complex(h) ** 2 * c)


def phi_representation_check(src, zeta, x, z, j, k_eval):
    """Compare the contour representation of phi at (x, z) with volterra_phi.

    `k_eval(x, z, zeta)` evaluates the contour-K Cauchy representation; the
    report lists both values and their difference.
    """
    rep = complex(k_eval(x, z, zeta))
    ref = complex(volterra_phi(src, j, zeta, x, z))
    return {"zeta": complex(zeta), "representation": rep, "eigenfunction": ref, "difference": abs(rep - ref)}
