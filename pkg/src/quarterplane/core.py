"""Shared vocabulary: wavenumbers, spectral regions, symmetry maps and contours."""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

ON_CIRCLE_TOL = 1e-12


class DomainError(ValueError):
    """A spectral point or physical point lies outside an operation's domain."""


class ConfigError(ValueError):
    """Invalid configuration (bad tolerance, radius, key ...)."""


class AccuracyError(RuntimeError):
    """Quadrature did not reach its tolerance; `estimate` holds the best value."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class Wavenumber:
    h0: float
    eps: float = 0.0

    def __post_init__(self):
        if not self.h0 > 0:
            raise ConfigError(f"h0 must be positive, got {self.h0}")
        if not self.eps >= 0:
            raise ConfigError(f"eps must be non-negative, got {self.eps}")

    @property
    def h(self):
        return complex(self.h0, self.h0 * self.eps)


def as_zeta(zeta):
    """Return zeta as a Python complex, rejecting the essential singularity at 0."""
    if isinstance(zeta, SpectralPoint):
        return zeta.zeta
    z = complex(zeta)
    if z == 0:
        raise DomainError("zeta = 0 is an essential singularity of the transforms")
    return z


@dataclass(frozen=True)
class SpectralPoint:
    zeta: complex

    def __post_init__(self):
        z = complex(self.zeta)
        if z == 0:
            raise DomainError("zeta = 0 is not a spectral point")
        object.__setattr__(self, "zeta", z)


@dataclass(frozen=True)
class RegionTag:
    quadrant: str
    radial: str


def classify_region(zeta, tol=ON_CIRCLE_TOL):
    """Quadrant (by signs of Re, Im) and position relative to the unit circle.

    Points on the axes are attached to the quadrant that follows them
    counterclockwise: the positive real axis belongs to Q1, the positive
    imaginary axis to Q2, and so on.
    """
    z = as_zeta(zeta)
    x, y = z.real, z.imag
    if x > 0 and y >= 0:
        q = "Q1"
    elif x <= 0 and y > 0:
        q = "Q2"
    elif x < 0 and y <= 0:
        q = "Q3"
    else:
        q = "Q4"
    r = abs(z)
    if abs(r - 1.0) < tol:
        radial = "on"
    elif r < 1:
        radial = "inside"
    else:
        radial = "outside"
    return RegionTag(q, radial)


def sym_neg(zeta):
    return -as_zeta(zeta)


def sym_inv(zeta):
    return 1.0 / as_zeta(zeta)


def sym_neginv(zeta):
    return -1.0 / as_zeta(zeta)


def in_D1(zeta):
    """Domain where the z-edge trace transform converges: inside-upper or outside-lower."""
    z = as_zeta(zeta)
    r = abs(z)
    return (r < 1 and z.imag > 0) or (r > 1 and z.imag < 0)


def in_phi3_domain(zeta):
    z = as_zeta(zeta)
    r = abs(z)
    return (r < 1 and z.real > 0) or (r > 1 and z.real < 0)


def in_natural_gr_set(zeta):
    """Closed set where all transforms converge without continuation."""
    z = as_zeta(zeta)
    r = abs(z)
    q1 = z.real >= 0 and z.imag >= 0
    q3 = z.real <= 0 and z.imag <= 0
    return (r <= 1 + ON_CIRCLE_TOL and q1) or (r >= 1 - ON_CIRCLE_TOL and q3)


def branch_sides(zeta, h):
    """Side indicators of the continuation cuts issuing from zeta = 1 and zeta = -i.

    The analytically continued z-edge transforms are singular where
    h(1 - s/2) lies on the negative imaginary axis (s = zeta + 1/zeta); this
    is a curve through zeta = 1.  The x-edge transforms fail where
    h(1 - i d/2) does (d = zeta - 1/zeta), a curve through zeta = -i.
    """
    z = as_zeta(zeta)
    al = np.angle(h)
    sq = np.sqrt(z)
    w1 = (z - 1) / sq * np.exp(-1j * (np.pi / 4 - al / 2))
    w3 = (z + 1j) / sq * np.exp(1j * al / 2)
    return int(np.sign(w1.imag)), int(np.sign(w3.imag))


def gr_valid(zeta, h):
    """True when the global relation holds for the continued transforms at zeta.

    The exceptional sector lies between the two cuts and contains (1, inf),
    the segment (0, -i) and the fourth-quadrant arc.
    """
    s1, s3 = branch_sides(zeta, h)
    return not (s1 <= 0 and s3 >= 0)


# ---------------------------------------------------------------- contours


@lru_cache(maxsize=None)
def gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(edges, n):
    """Gauss-Legendre nodes and weights on consecutive panels given by `edges`."""
    e = np.asarray(edges, dtype=float)
    xg, wg = gauss_legendre(n)
    a, b = e[:-1, None], e[1:, None]
    t = (a + b) / 2 + (b - a) / 2 * xg
    w = (b - a) / 2 * wg
    return t.ravel(), w.ravel()


def graded_edges(a, b, ratio=0.35, min_size=None, grade_a=True, grade_b=True, base=4):
    """Panel edges on [a, b] refined geometrically toward the graded ends."""
    length = b - a
    if min_size is None:
        min_size = 1e-3 * length
    pts = set(np.linspace(a, b, base + 1).tolist())
    half = length / 2
    k = 1
    while half * ratio ** k > min_size:
        if grade_a:
            pts.add(a + half * ratio ** k)
        if grade_b:
            pts.add(b - half * ratio ** k)
        k += 1
    if grade_a:
        pts.add(a + min_size)
    if grade_b:
        pts.add(b - min_size)
    return np.array(sorted(pts))


@dataclass(frozen=True)
class QuadratureSpec:
    tol: float = 1e-10
    max_panels: int = 4000
    nodes_per_panel: int = 16
    delta: float = 1e-9
    Lambda: float = 1e4
    grading: float = 0.35
    far_panels: int = 40
    ray_length: float = 1000.0
    segment_floor: float = 1e-4

    def __post_init__(self):
        if not self.Lambda > 1:
            raise ConfigError(f"truncation radius Lambda must exceed 1, got {self.Lambda}")
        if not self.delta > 0:
            raise ConfigError("pole exclusion radius delta must be positive")
        if not self.tol > 0:
            raise ConfigError("tolerance must be positive")
        if self.nodes_per_panel < 2 or self.max_panels < 1:
            raise ConfigError("panel configuration must be positive")
        if not self.ray_length > 1:
            raise ConfigError("ray_length must exceed 1")


@dataclass(frozen=True)
class ContourPiece:
    """One oriented piece, discretized.

    kind is 'interval' (real line), 'segment', 'ray' or 'arc'.  For straight
    pieces `start`/`end` are complex endpoints; for arcs they are the angles.
    `nodes` and `weights` (complex dzeta along `orientation`) come from a
    panel rule in the real parameter `t`.
    """
    label: str
    kind: str
    start: complex
    end: complex
    orientation: int
    t: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def point(self, t):
        if self.kind == "arc":
            return np.exp(1j * np.asarray(t))
        d = self.end - self.start
        return self.start + (np.asarray(t) - 0.0) * d / abs(d)

    @property
    def length(self):
        if self.kind == "arc":
            return abs(self.end.real - self.start.real)
        return abs(self.end - self.start)


@dataclass(frozen=True)
class ContourSpec:
    pieces: tuple
    Lambda: float

    def piece(self, label):
        for p in self.pieces:
            if p.label == label:
                return p
        raise KeyError(label)

    @property
    def labels(self):
        return [p.label for p in self.pieces]


def _straight(label, kind, a, b, t, w, orientation=1):
    d = (b - a) / abs(b - a)
    nodes = a + t * d
    weights = w * d * orientation
    return ContourPiece(label, kind, complex(a), complex(b), orientation, t, nodes, weights)


def _arc(label, th0, th1, edges, n, orientation=1):
    t, w = panel_rule(edges, n)
    z = np.exp(1j * t)
    return ContourPiece(label, "arc", complex(th0), complex(th1), orientation, t, z, 1j * z * w * orientation)


GAMMA_LABELS = ("(-inf,-1)", "(-1,0)", "(0,1)", "(1,inf)", "C1", "C2", "C3", "C4")
K_LABELS = ("(1,inf)", "(i,iinf)", "(0,-i)", "(0,-1)", "C1", "C2", "C3", "C4")


def build_contour_Gamma(spec=QuadratureSpec()):
    """Real line (-Lambda, Lambda) oriented left to right plus the unit circle
    oriented counterclockwise, with gaps of radius delta at 0 and +-1.

    Mirror-image pieces carry exactly mirrored nodes, so values of the data
    transforms at zeta, -zeta, 1/zeta, -1/zeta can be shared between pieces.
    """
    if not spec.Lambda > 1:
        raise ConfigError("Lambda must exceed 1")
    n, d, L, g = spec.nodes_per_panel, spec.delta, spec.Lambda, spec.grading
    near = graded_edges(1 + d, 2.0, g, min_size=d, grade_b=False)
    far = np.geomspace(2.0, L, spec.far_panels)
    T, W = panel_rule(np.unique(np.concatenate([near, far])), n)
    t, w = panel_rule(graded_edges(d, 1 - d, g, min_size=d), n)
    th, wth = panel_rule(graded_edges(d, np.pi / 2, g, min_size=d, grade_b=False), n)

    def real(label, a, b, nodes, weights):
        return ContourPiece(label, "interval", complex(a), complex(b), 1, np.abs(nodes - a),
                            nodes.astype(complex), weights.astype(complex))

    def arc(label, a, b, theta, wt):
        z = np.exp(1j * theta)
        return ContourPiece(label, "arc", complex(a), complex(b), 1, theta, z, 1j * z * wt)

    c1 = np.exp(1j * th)
    q = np.pi / 2
    pieces = [
        real("(-inf,-1)", -L, -1 - d, -T[::-1], W[::-1]),
        real("(-1,0)", -1 + d, -d, -t[::-1], w[::-1]),
        real("(0,1)", d, 1 - d, t, w),
        real("(1,inf)", 1 + d, L, T, W),
        arc("C1", d, q, th, wth),
        ContourPiece("C2", "arc", complex(q), complex(np.pi - d), 1, np.pi - th[::-1],
                     -np.conj(c1[::-1]), 1j * (-np.conj(c1[::-1])) * wth[::-1]),
        ContourPiece("C3", "arc", complex(-np.pi + d), complex(-q), 1, th - np.pi, -c1, 1j * (-c1) * wth),
        ContourPiece("C4", "arc", complex(-q), complex(-d), 1, -th[::-1], np.conj(c1[::-1]),
                     1j * np.conj(c1[::-1]) * wth[::-1]),
    ]
    return ContourSpec(tuple(pieces), L)


def build_contour_K(spec=QuadratureSpec(), orientations=None):
    """The eight pieces of the solution representation.

    Rays run outward from 1 and i, segments run from 0 to -i and to -1, arcs
    are discretized counterclockwise; `orientations` (label -> +-1) flips the
    traversal direction of a piece.
    """
    if not spec.Lambda > 1:
        raise ConfigError("Lambda must exceed 1")
    o = dict.fromkeys(K_LABELS, 1)
    if orientations:
        o.update(orientations)
    n, g, T = spec.nodes_per_panel, spec.grading, spec.ray_length
    ray_edges = np.unique(np.concatenate([graded_edges(1.0, 2.0, g, min_size=1e-3, grade_b=False),
                                          np.geomspace(2.0, T, max(30, int(np.ceil(5.5 * np.log(T / 2)))))]))
    seg_edges = np.unique(np.concatenate([[0.0], np.geomspace(spec.segment_floor, 0.5, 24),
                                          graded_edges(0.5, 1.0, g, min_size=1e-3, grade_a=False)]))
    pieces = []
    t, w = panel_rule(ray_edges, n)
    pieces.append(_straight("(1,inf)", "ray", 1.0, T, t - 1, w, o["(1,inf)"]))
    pieces.append(_straight("(i,iinf)", "ray", 1j, 1j * T, t - 1, w, o["(i,iinf)"]))
    t, w = panel_rule(seg_edges, n)
    pieces.append(_straight("(0,-i)", "segment", 0.0, -1j, t, w, o["(0,-i)"]))
    pieces.append(_straight("(0,-1)", "segment", 0.0, -1.0, t, w, o["(0,-1)"]))
    q = np.pi / 2
    for lab, (a, b) in zip(("C1", "C2", "C3", "C4"), ((0, q), (q, np.pi), (-np.pi, -q), (-q, 0))):
        edges = graded_edges(a, b, g, min_size=1e-3)
        pieces.append(_arc(lab, a, b, edges, n, o[lab]))
    return ContourSpec(tuple(pieces), T)
