"""Panel quadrature, decaying-ray integrals and Cauchy transforms on Gamma."""

import math
from dataclasses import dataclass

import numpy as np

from .core import AccuracyError, ConfigError, DomainError, gauss_legendre

EXCLUDED_POINTS = (0.0, 1.0, -1.0, 1j, -1j)


def integrate_finite(g, a, b, tol=1e-12, n=16, max_panels=4096):
    """Adaptive Gauss-Legendre quadrature of a vectorized g over [a, b].

    Each panel is compared with its two halves; panels are processed in a
    fixed left-to-right order so the result is bit-reproducible.
    """
    if not b > a:
        if b == a:
            return 0j
        raise ConfigError("integrate_finite needs a < b")
    xg, wg = gauss_legendre(n)

    def rule(lo, hi):
        t = (lo + hi) / 2 + (hi - lo) / 2 * xg
        return np.sum(np.asarray(g(t), dtype=complex) * wg) * (hi - lo) / 2

    stack = [(a, b, rule(a, b))]
    done = []
    panels = 1
    total_est = abs(stack[0][2])
    while stack:
        lo, hi, val = stack.pop()
        mid = (lo + hi) / 2
        left, right = rule(lo, mid), rule(mid, hi)
        err = abs(left + right - val)
        total_est = max(total_est, abs(left + right))
        if err <= tol * (1 + total_est) * (hi - lo) / (b - a) or hi - lo < 1e-14 * (b - a):
            done.append((lo, left + right, err))
            continue
        panels += 1
        if panels > max_panels:
            done.append((lo, left + right, err))
            for s in stack:
                done.append((s[0], s[2], np.inf))
            done.sort(key=lambda d: d[0])
            est = sum(d[1] for d in done)
            raise AccuracyError("integrate_finite: panel budget exhausted", estimate=est,
                                error=sum(d[2] for d in done))
        stack.append((mid, hi, right))
        stack.append((lo, mid, left))
    done.sort(key=lambda d: d[0])
    return complex(sum(d[1] for d in done))


def ray_nodes(decay, omega=0.0, scale=1.0, tol=1e-16, n=24, growth=1.5):
    """Parameter nodes t >= 0 and weights for integrands bounded by exp(-decay t).

    Panels start at a size tied to `scale` and `omega`, grow geometrically,
    are capped so each holds a bounded number of oscillations and decay
    lengths, and stop where exp(-decay t) < tol.
    """
    if not decay > 0:
        raise ConfigError(f"decay rate must be positive, got {decay}")
    T = np.log(1.0 / tol) / decay
    first = 0.02 * min(scale, 1.0 / max(omega, 1e-300), 1.0 / decay)
    cap = min(12.0 / decay, 20.0 / omega if omega > 0 else np.inf)
    edges = [0.0]
    e, size = 0.0, first
    while e < T:
        e = min(e + size, T)
        edges.append(e)
        size = min(size * growth, cap)
        if len(edges) > 200000:
            raise AccuracyError("ray discretization too long (near a continuation cut)")
    xg, wg = gauss_legendre(n)
    a, b = np.array(edges[:-1])[:, None], np.array(edges[1:])[:, None]
    return ((a + b) / 2 + (b - a) / 2 * xg).ravel(), ((b - a) / 2 * wg).ravel()


def integrate_decaying_ray(g, start=0.0, direction=1.0, decay=1.0, tol=1e-14, omega=0.0, scale=1.0):
    """Integral of g(start + t*direction) * direction dt over t in [0, inf).

    The truncation point is chosen so that the tail bound
    C exp(-decay T) / decay is below tol, with C estimated from |g| on the
    first decay length.
    """
    if not decay > 0:
        raise ConfigError(f"decay rate must be positive, got {decay}")
    direction = complex(direction)
    probe = np.linspace(0.0, 1.0 / decay, 9)
    C = max(float(np.max(np.abs(g(start + probe * direction)))), 1e-300)
    t, w = ray_nodes(decay, omega, scale, tol=min(1e-3, tol * decay / C))
    return complex(np.sum(w * np.asarray(g(start + t * direction), dtype=complex)) * direction)


# ------------------------------------------------------------ Cauchy transforms


@dataclass
class DensitySamples:
    """A density sampled on the pieces of an oriented contour."""
    pieces: tuple
    values: list

    def __post_init__(self):
        for p, v in zip(self.pieces, self.values):
            if len(v) != len(p.nodes):
                raise ValueError(f"piece {p.label}: node/value count mismatch")
            if not np.all(np.isfinite(v)):
                k = int(np.argmin(np.isfinite(v)))
                raise ValueError(f"piece {p.label}: density not finite at node {p.nodes[k]}")
        self.z = np.concatenate([p.nodes for p in self.pieces])
        self.dz = np.concatenate([p.weights for p in self.pieces])
        self.r = np.concatenate([np.asarray(v, dtype=complex) for v in self.values])
        self.rdz = self.r * self.dz
        spacing = []
        for p in self.pieces:
            s = np.abs(np.diff(p.nodes))
            spacing.append(np.concatenate([s[:1], np.minimum(s[1:], s[:-1]), s[-1:]]) if len(s) else np.ones(1))
        self.spacing = np.concatenate(spacing)

    def piece_index(self, label):
        for i, p in enumerate(self.pieces):
            if p.label == label:
                return i
        raise KeyError(label)


def _log1m(w):
    return np.log(1 - w)


def cauchy_one_piece(piece, zeta, side=0):
    """Cauchy integral of the constant 1 over one piece, in closed form.

    side = 0 for zeta off the piece; +1 / -1 for the left / right boundary
    value when zeta lies on the piece (left of a rightward interval is the
    upper side, left of a counterclockwise arc is the inside).
    """
    o = piece.orientation
    if piece.kind == "arc":
        th0, th1 = piece.start.real, piece.end.real
        inside = side * o > 0 if side != 0 else abs(zeta) < 1
        if inside:
            v = 1j * (th1 - th0) + _log1m(zeta * np.exp(-1j * th1)) - _log1m(zeta * np.exp(-1j * th0))
        else:
            v = _log1m(np.exp(1j * th1) / zeta) - _log1m(np.exp(1j * th0) / zeta)
        return o * v / (2j * np.pi)
    p, q = (piece.start, piece.end) if o > 0 else (piece.end, piece.start)
    if side == 0:
        return np.log((q - zeta) / (p - zeta)) / (2j * np.pi)
    u = abs((q - zeta) / (p - zeta))
    return (np.log(u) + side * 1j * np.pi) / (2j * np.pi)


def cauchy_one(samples, zeta, piece_index=None, side=0):
    """Cauchy integral of 1 over every piece of the sampled contour."""
    tot = 0j
    for i, p in enumerate(samples.pieces):
        tot += cauchy_one_piece(p, zeta, side if i == piece_index else 0)
    return tot


def cauchy_offcontour(samples, zeta, density=None, near=24.0):
    """(1/2 pi i) times the integral of r(t) / (t - zeta) over the contour.

    If zeta is closer than `near` node spacings to a node, the plain rule is
    inaccurate.  With `density` given, singularity subtraction is used:
    density(zeta, k) returns r at the contour point w nearest to zeta (k is
    the index of the nearest node, a usable fallback for smooth r), or a
    tuple (w, coeffs) of Taylor coefficients of r about w.  Subtracting the
    Taylor polynomial of degree n leaves an error of order
    |zeta - w|^(n+1) / spacing instead of |zeta - w| / spacing.  Without
    `density` a DomainError asks the caller for cauchy_boundary.
    """
    zeta = complex(zeta)
    d = samples.z - zeta
    k = int(np.argmin(np.abs(d)))
    if abs(d[k]) > near * samples.spacing[k]:
        return complex(np.sum(samples.rdz / d) / (2j * np.pi))
    if density is None:
        raise DomainError(f"zeta={zeta} is too close to the contour; use cauchy_boundary")
    f = density(zeta, k)
    c1 = cauchy_one(samples, zeta)
    if not isinstance(f, tuple):
        return complex(np.sum((samples.r - f) * samples.dz / d) / (2j * np.pi) + f * c1)
    w, coeffs = f
    tw = samples.z - w
    poly = sum(c * tw ** n for n, c in enumerate(coeffs))
    rest = np.sum((samples.r - poly) * samples.dz / d) / (2j * np.pi)
    # (t - w)^n / (t - zeta) with t - w = (t - zeta) + e expands into e^n / (t - zeta)
    # plus polynomial moments S_j of (t - zeta)
    e = zeta - w
    S = [np.sum(d ** j * samples.dz) / (2j * np.pi) for j in range(len(coeffs) - 1)]
    back = 0j
    for n, c in enumerate(coeffs):
        back += c * e ** n * c1
        for m in range(1, n + 1):
            back += c * math.comb(n, m) * e ** (n - m) * S[m - 1]
    return complex(rest + back)


def cauchy_boundary(samples, zeta, piece_index, side, fval, delta=1e-9):
    """Sokhotski-Plemelj boundary value on piece `piece_index`.

    side = +1 is the left of the orientation, -1 the right.  `fval` is the
    density at zeta; the principal value is taken by subtracting it, so the
    left and right values differ by exactly fval.
    """
    zeta = complex(zeta)
    for p in EXCLUDED_POINTS:
        if abs(zeta - p) < delta:
            raise DomainError(f"zeta={zeta} lies in the excluded neighborhood of {p}")
    d = samples.z - zeta
    mask = np.abs(d) > 1e-14
    pv = np.sum(((samples.r - fval) * samples.dz)[mask] / d[mask]) / (2j * np.pi)
    return complex(pv + fval * cauchy_one(samples, zeta, piece_index, side))
