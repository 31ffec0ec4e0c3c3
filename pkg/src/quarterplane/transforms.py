"""Spectral transforms of edge data and traces.

Every edge function lives on t >= 0 and is transformed with an exponential
kernel exp(lam * t):

    U1(zeta)  = int exp(-(ih/2)(zeta + 1/zeta) z) u1(z) dz
    U2(zeta)  = int exp( (h/2)(zeta - 1/zeta) x) u2(x) dx
    Phi1, Phi3: the same kernels applied to the traces u(0, z), u(x, 0).

Three representations of edge functions are supported:

* AnalyticHalfLine: f = amp * exp(phase) with phase(t) ~ i k t, analytic in
  Re t > 0.  Transforms are taken along a rotated ray t * exp(i phi), which
  gives the analytic continuation of the transform wherever some ray with
  |phi| < phimax decays.
* CompactHalfLine: a callable vanishing beyond L, integrated on [0, L].
* SampledHalfLine: samples joined by straight lines; the transform of the
  interpolant is computed exactly panel by panel.
"""

from dataclasses import dataclass

import numpy as np

from .core import DomainError, Wavenumber, as_zeta, gauss_legendre
from .quadrature import ray_nodes

PHI_MAX = 1.5


class AnalyticHalfLine:
    def __init__(self, amp, phase, k, scale=1.0, factor=1.0):
        self.amp, self.phase, self.k = amp, phase, complex(k)
        self.scale, self.factor = float(scale), complex(factor)

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        return self.factor * self.amp(t) * np.exp(self.phase(t))

    def scaled(self, c):
        return AnalyticHalfLine(self.amp, self.phase, self.k, self.scale, self.factor * c)


class CompactHalfLine:
    def __init__(self, f, L, k_hint=1.0, factor=1.0):
        if not L > 0:
            raise DomainError("support length L must be positive")
        self.f, self.L, self.k_hint, self.factor = f, float(L), float(k_hint), complex(factor)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        m = (t >= 0) & (t <= self.L)
        out[m] = self.factor * np.asarray(self.f(t[m]), dtype=complex)
        return out

    def scaled(self, c):
        return CompactHalfLine(self.f, self.L, self.k_hint, self.factor * c)


class SampledHalfLine:
    def __init__(self, t, values):
        t = np.asarray(t, dtype=float)
        v = np.asarray(values, dtype=complex)
        if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
            raise ValueError("samples need matching 1-D arrays of length >= 2")
        if np.any(np.diff(t) <= 0) or t[0] < 0:
            raise ValueError("sample abscissae must be increasing and non-negative")
        self.t, self.v = t, v
        self.L = float(t[-1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.interp(t, self.t, self.v.real, right=0.0) + 1j * np.interp(t, self.t, self.v.imag, right=0.0)
        out[(t < self.t[0]) | (t > self.L)] = 0
        return out

    def scaled(self, c):
        return SampledHalfLine(self.t, self.v * c)


class ZeroHalfLine:
    def __call__(self, t):
        return np.zeros(np.shape(t), dtype=complex)

    def scaled(self, c):
        return self


class SumHalfLine:
    def __init__(self, *parts):
        self.parts = parts

    def __call__(self, t):
        return sum(p(t) for p in self.parts)

    def scaled(self, c):
        return SumHalfLine(*[p.scaled(c) for p in self.parts])


def load_two_column(path):
    """Read `argument value` rows (value may be given as two columns re im)."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.split("#", 1)[0].replace(",", " ").split()
            if not s:
                continue
            try:
                nums = [float(x) for x in s]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric entry") from None
            if len(nums) == 2:
                rows.append((nums[0], nums[1], 0.0))
            elif len(nums) == 3:
                rows.append(tuple(nums))
            else:
                raise ValueError(f"{path}:{lineno}: expected 2 or 3 columns")
    a = np.array(rows)
    return SampledHalfLine(a[:, 0], a[:, 1] + 1j * a[:, 2])


@dataclass(frozen=True)
class BoundaryData:
    """Neumann data: u1(z) = u_x(0, z) on the edge x = 0 and u2(x) = u_z(x, 0)."""
    u1: object
    u2: object

    def scaled(self, c1=1.0, c2=1.0):
        return BoundaryData(self.u1.scaled(c1), self.u2.scaled(c2))

    def __add__(self, other):
        return BoundaryData(SumHalfLine(self.u1, other.u1), SumHalfLine(self.u2, other.u2))


def zero_data():
    return BoundaryData(ZeroHalfLine(), ZeroHalfLine())


# ------------------------------------------------------------ the kernels


def _psi1(x):
    """(e^x - 1) / x, stable near 0."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < 0.5
    xs = x[small]
    term = np.ones_like(xs)
    acc = np.ones_like(xs)
    for k in range(2, 22):
        term = term * xs / k
        acc = acc + term
    out[small] = acc
    xb = x[~small]
    out[~small] = np.expm1(xb) / xb if np.iscomplexobj(xb) else (np.exp(xb) - 1) / xb
    return out


def _psi2(x):
    """integral_0^1 u e^{x u} du, stable near 0."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < 0.5
    xs = x[small]
    acc = np.zeros_like(xs)
    fact = 1.0
    p = np.ones_like(xs)
    for k in range(0, 24):
        if k:
            fact *= k
            p = p * xs
        acc = acc + p / (fact * (k + 2))
    out[small] = acc
    xb = x[~small]
    out[~small] = (np.exp(xb) * (xb - 1) + 1) / xb ** 2
    return out


def _check_growth(lam, L):
    g = np.max(np.real(np.atleast_1d(lam))) * L
    if g > 600:
        raise DomainError(f"kernel grows by exp({g:.0f}) over the data support; "
                          "the transform of compactly supported data overflows here")


def _sampled_transform(f, lams):
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    _check_growth(lams, f.L)
    t0 = f.t[:-1][None, :]
    dt = np.diff(f.t)[None, :]
    v0 = f.v[:-1][None, :]
    dv = np.diff(f.v)[None, :]
    lam = lams[:, None]
    x = lam * dt
    e0 = np.exp(lam * t0)
    val = e0 * dt * (v0 * _psi1(x) + dv * _psi2(x))
    return val.sum(axis=1)


def _compact_transform(f, lams, n=16):
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    _check_growth(lams, f.L)
    out = np.empty(len(lams), dtype=complex)
    xg, wg = gauss_legendre(n)
    for i, lam in enumerate(lams):
        npan = int(min(20000, max(8, np.ceil(f.L * (abs(lam) + f.k_hint + 1) / 3.0))))
        e = np.linspace(0, f.L, npan + 1)
        a, b = e[:-1, None], e[1:, None]
        t = ((a + b) / 2 + (b - a) / 2 * xg).ravel()
        w = ((b - a) / 2 * wg).ravel()
        out[i] = np.sum(w * f(t) * np.exp(lam * t))
    return out


def best_ray(mu, phimax=PHI_MAX):
    """Angle phi in [-phimax, phimax] maximizing the decay -Re(mu e^{i phi})."""
    th = np.angle(mu)
    target = np.pi - th
    target = (target + np.pi) % (2 * np.pi) - np.pi
    cands = [phimax, -phimax]
    if abs(target) <= phimax:
        cands.append(target)
    best = max(cands, key=lambda p: -np.real(mu * np.exp(1j * p)))
    return best, -np.real(mu * np.exp(1j * best)), abs(np.imag(mu * np.exp(1j * best)))


def _algebraic_transform(f, lam):
    """mu = 0: the integrand neither decays nor oscillates exponentially."""
    edges = np.concatenate([[0.0], np.geomspace(1e-3 * f.scale, 1e12, 170)])
    xg, wg = gauss_legendre(24)
    a, b = edges[:-1, None], edges[1:, None]
    t = ((a + b) / 2 + (b - a) / 2 * xg).ravel()
    w = ((b - a) / 2 * wg).ravel()
    if isinstance(f, AnalyticHalfLine):
        # combine the exponentials before evaluating so that neither overflows
        def g_of(s):
            return f.factor * f.amp(s) * np.exp(f.phase(s) + lam * s)
    else:
        def g_of(s):
            return f(s) * np.exp(lam * s)
    g = g_of(t)
    g1, g2 = g_of(np.array([1e11])), g_of(np.array([1e12]))
    p = -np.log10(abs(g2[0]) / abs(g1[0])) if abs(g1[0]) > 0 else np.inf
    if not p > 1.05:
        raise DomainError("transform does not converge: the integrand decays only like "
                          f"t^-{p:.2f} on the critical ray (pole of the transform)")
    tail = g2[0] * 1e12 / (p - 1) if np.isfinite(p) else 0
    return np.sum(w * g) + tail


def _analytic_transform(f, lam, tol=1e-16, phimax=PHI_MAX):
    mu = lam + 1j * f.k
    if abs(mu) < 1e-12 * (abs(lam) + abs(f.k) + 1):
        return _algebraic_transform(f, lam)
    phi, kappa, omega = best_ray(mu, phimax)
    if not kappa > 1e-9 * abs(mu):
        raise DomainError("no decaying ray for this transform (zeta on a continuation cut)")
    t, w = ray_nodes(kappa, omega, min(f.scale, 1.0 / abs(mu)), tol=tol)
    d = np.exp(1j * phi)
    z = t * d
    return np.sum(w * f.factor * f.amp(z) * np.exp(f.phase(z) + lam * z)) * d


def half_line_transform(f, lams, strict=False):
    """int_0^inf exp(lam t) f(t) dt for each lam (scalar or array)."""
    scalar = np.ndim(lams) == 0
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    if isinstance(f, ZeroHalfLine):
        out = np.zeros(len(lams), dtype=complex)
    elif isinstance(f, SumHalfLine):
        out = sum(half_line_transform(p, lams, strict) for p in f.parts)
    elif isinstance(f, SampledHalfLine):
        out = _sampled_transform(f, lams)
    elif isinstance(f, CompactHalfLine):
        out = _compact_transform(f, lams)
    elif isinstance(f, AnalyticHalfLine):
        out = np.empty(len(lams), dtype=complex)
        for i, lam in enumerate(lams):
            if strict and not np.real(lam + 1j * f.k) < 0:
                raise DomainError("the defining integral diverges on the real axis at this zeta")
            out[i] = _analytic_transform(f, lam)
    else:
        raise TypeError(f"unsupported edge function {type(f).__name__}")
    return complex(out[0]) if scalar else out


def lam_z(h, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    return -0.5j * h * (zeta + 1 / zeta)


def lam_x(h, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    return 0.5 * h * (zeta - 1 / zeta)


def _h(wavenumber):
    return wavenumber.h if isinstance(wavenumber, Wavenumber) else complex(wavenumber)


def eval_U1(data, h, zeta):
    return half_line_transform(data.u1, lam_z(_h(h), as_zeta(zeta)))


def eval_U2(data, h, zeta):
    return half_line_transform(data.u2, lam_x(_h(h), as_zeta(zeta)))


def eval_F(data, h, zeta, u1_sign=1):
    """F = (i/2)(U2 + u1_sign * U1); u1_sign comes from the convention table."""
    return 0.5j * (eval_U2(data, h, zeta) + u1_sign * eval_U1(data, h, zeta))


def eval_Phi1_from_trace(trace, h, zeta, strict=False):
    return half_line_transform(trace, lam_z(_h(h), as_zeta(zeta)), strict)


def eval_Phi3_from_trace(trace, h, zeta, strict=False):
    return half_line_transform(trace, lam_x(_h(h), as_zeta(zeta)), strict)


class DataTransforms:
    """Cached evaluators of U1, U2, F and the density combinations A, B."""

    def __init__(self, data, wavenumber, u1_sign=1):
        self.data = data
        self.h = _h(wavenumber)
        self.u1_sign = u1_sign
        self._c1, self._c2 = {}, {}

    def _cached(self, cache, f, lam_fn, zeta):
        z = np.atleast_1d(np.asarray(zeta, dtype=complex))
        if np.any(z == 0):
            raise DomainError("zeta = 0 is an essential singularity of the transforms")
        keys = z.tolist()
        todo = sorted({k for k in keys if k not in cache}, key=lambda c: (c.real, c.imag))
        if todo:
            vals = half_line_transform(f, lam_fn(self.h, np.array(todo)))
            cache.update(zip(todo, np.atleast_1d(vals).tolist()))
        out = np.array([cache[k] for k in keys], dtype=complex)
        return complex(out[0]) if np.ndim(zeta) == 0 else out

    def U1(self, zeta):
        return self._cached(self._c1, self.data.u1, lam_z, zeta)

    def U2(self, zeta):
        return self._cached(self._c2, self.data.u2, lam_x, zeta)

    def F(self, zeta):
        return 0.5j * (self.U2(zeta) + self.u1_sign * self.U1(zeta))

    def A(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return self.F(zeta) + self.F(-1 / zeta)

    def B(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return self.F(-zeta) + self.F(1 / zeta)


def comboA(data, h, zeta, u1_sign=1):
    z = as_zeta(zeta)
    return eval_F(data, h, z, u1_sign) + eval_F(data, h, -1 / z, u1_sign)


def comboB(data, h, zeta, u1_sign=1):
    z = as_zeta(zeta)
    return eval_F(data, h, -z, u1_sign) + eval_F(data, h, 1 / z, u1_sign)
