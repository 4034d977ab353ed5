"""Geometric complement primitives derived from an object silhouette.

Given a silhouette polygon this module produces the stroke primitives used
as a geometric complementary overlay: boundary edges, diagonals, interior
angle bisectors, the largest inscribed circle, the smallest enclosing
circle, and a Delaunay triangulation of the vertices plus an interior grid
sample. A rasterizer turns a primitive set into a transparent RGBA overlay.

Conventions: coordinates are pixel units, pixel centers on the integer
grid; polygons are simple vertex lists with positive shoelace area
(counter-clockwise in a y-up frame).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .errors import DegenerateInputError, NonConvexPolygonError
from .image import validate_color

__all__ = [
    "Segment",
    "Circle",
    "Triangulation",
    "PrimitiveSet",
    "GeometryConfig",
    "as_polygon",
    "polygon_area",
    "is_convex",
    "polygon_contains",
    "distance_to_boundary",
    "polygon_diagonals",
    "angle_bisectors",
    "incircle",
    "min_enclosing_circle",
    "delaunay",
    "interior_grid",
    "geometric_complement",
    "rasterize",
    "load_polygon_txt",
    "save_polygon_txt",
]


@dataclass(frozen=True)
class Segment:
    a: tuple[float, float]
    b: tuple[float, float]

    def __post_init__(self):
        if tuple(self.a) == tuple(self.b):
            raise ValueError(f"degenerate segment at {self.a}")


@dataclass(frozen=True)
class Circle:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"circle radius must be > 0, got {self.radius}")


@dataclass
class Triangulation:
    points: np.ndarray  # (N, 2) float64
    triangles: np.ndarray  # (T, 3) int64, each row sorted, rows lexicographically sorted

    def edges(self) -> np.ndarray:
        """Unique undirected edges as sorted (i, j) index pairs."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [0, 2]]])
        e = np.sort(e, axis=1)
        return np.unique(e, axis=0)


@dataclass
class PrimitiveSet:
    segments: list[Segment] = field(default_factory=list)
    circles: list[Circle] = field(default_factory=list)
    stroke_width: float = 1.0
    stroke_color: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.stroke_width < 1:
            raise ValueError("stroke_width must be >= 1")


@dataclass(frozen=True)
class GeometryConfig:
    """Which primitive kinds a geometric complement includes."""

    edges: bool = True
    diagonals: bool = True
    bisectors: bool = True
    incircle: bool = True
    circumcircle: bool = True
    delaunay: bool = False
    delaunay_grid: int = 0
    stroke_width: float = 1.0
    stroke_color: tuple[float, float, float] = (1.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# Polygon validation and predicates
# ---------------------------------------------------------------------------

def polygon_area(vertices) -> float:
    """Signed shoelace area (positive for the accepted orientation)."""
    v = np.asarray(vertices, dtype=np.float64)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_properly_intersect(p1, p2, q1, q2) -> bool:
    """True if open segments cross or improperly overlap (shared endpoints excluded by caller)."""
    d1 = _orient_sign(q1, q2, p1)
    d2 = _orient_sign(q1, q2, p2)
    d3 = _orient_sign(p1, p2, q1)
    d4 = _orient_sign(p1, p2, q2)
    if d1 != d2 and d3 != d4 and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True

    def on_segment(a, b, c):
        return (
            _orient_sign(a, b, c) == 0
            and min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
        )

    return any(on_segment(q1, q2, p) for p in (p1, p2)) or any(
        on_segment(p1, p2, q) for q in (q1, q2)
    )


def as_polygon(vertices) -> np.ndarray:
    """Validate a polygon: >= 3 vertices, simple, positive signed area."""
    v = np.asarray(vertices, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise ValueError(f"polygon needs an (N>=3, 2) vertex array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("polygon has non-finite vertices")
    if polygon_area(v) <= 0:
        raise ValueError("polygon must have positive signed area (counter-clockwise order)")
    n = len(v)
    for i in range(n):
        a1, a2 = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            b1, b2 = v[j], v[(j + 1) % n]
            if _segments_properly_intersect(tuple(a1), tuple(a2), tuple(b1), tuple(b2)):
                raise ValueError("polygon is self-intersecting")
    return v


def is_convex(poly) -> bool:
    v = np.asarray(poly, dtype=np.float64)
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    scale = np.abs(cross).max() + 1e-30
    return bool(np.all(cross >= -1e-12 * scale))


def _require_convex(poly) -> np.ndarray:
    v = as_polygon(poly)
    if not is_convex(v):
        raise NonConvexPolygonError("operation requires a convex polygon")
    return v


def polygon_contains(poly, xs, ys) -> np.ndarray:
    """Even-odd containment for arrays of points; boundary points count as inside."""
    v = np.asarray(poly, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    inside = np.zeros(xs.shape, dtype=bool)
    n = len(v)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for i in range(n):
            x1, y1 = v[i]
            x2, y2 = v[(i + 1) % n]
            crosses = ((y1 > ys) != (y2 > ys)) & (
                xs < (x2 - x1) * (ys - y1) / (y2 - y1 + 1e-300) + x1
            )
            inside ^= crosses
    on_edge = distance_to_boundary(v, xs, ys) <= 1e-9
    return inside | on_edge


def _dist_point_segment(px, py, ax, ay, bx, by):
    """Vectorized distance from points to one segment."""
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    if ll == 0:
        return np.hypot(px - ax, py - ay)
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / ll, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def distance_to_boundary(poly, xs, ys) -> np.ndarray:
    """Minimum distance from each point to the polygon boundary."""
    v = np.asarray(poly, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    n = len(v)
    best = np.full(xs.shape, np.inf)
    for i in range(n):
        ax, ay = v[i]
        bx, by = v[(i + 1) % n]
        np.minimum(best, _dist_point_segment(xs, ys, ax, ay, bx, by), out=best)
    return best


# ---------------------------------------------------------------------------
# Diagonals and bisectors
# ---------------------------------------------------------------------------

def polygon_diagonals(poly) -> list[Segment]:
    """All vertex-pair diagonals of a convex polygon, in ascending (i, j) order.

    A convex polygon keeps every diagonal interior, so there are n(n-3)/2.
    """
    v = _require_convex(poly)
    n = len(v)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if j - i == 1 or (i == 0 and j == n - 1):
                continue
            out.append(Segment(tuple(v[i]), tuple(v[j])))
    return out


def angle_bisectors(poly) -> list[Segment]:
    """Interior angle bisector of each vertex, clipped at its first boundary hit."""
    v = _require_convex(poly)
    n = len(v)
    scale = float(np.abs(v).max()) + 1.0
    out = []
    for i in range(n):
        p = v[i]
        u = v[(i - 1) % n] - p
        w = v[(i + 1) % n] - p
        u = u / np.linalg.norm(u)
        w = w / np.linalg.norm(w)
        d = u + w
        nd = np.linalg.norm(d)
        if nd < 1e-12:
            # straight vertex: bisector is the inward normal of the outgoing edge
            d = np.array([-w[1], w[0]])
        else:
            d = d / nd
        t_hit = np.inf
        for j in range(n):
            a = v[j]
            b = v[(j + 1) % n]
            e = b - a
            denom = d[0] * e[1] - d[1] * e[0]
            if abs(denom) < 1e-15:
                continue
            rel = a - p
            t = (rel[0] * e[1] - rel[1] * e[0]) / denom
            s = (rel[0] * d[1] - rel[1] * d[0]) / denom
            if t > 1e-9 * scale and -1e-12 <= s <= 1 + 1e-12:
                t_hit = min(t_hit, t)
        if not np.isfinite(t_hit):
            raise NonConvexPolygonError("bisector ray failed to hit the boundary")
        q = p + t_hit * d
        out.append(Segment(tuple(p), tuple(q)))
    return out


# ---------------------------------------------------------------------------
# Inscribed circle (Chebyshev center of a convex polygon)
# ---------------------------------------------------------------------------

def incircle(poly) -> Circle:
    """Largest inscribed circle: Chebyshev center and its clearance radius.

    Solved as the linear program max r s.t. n_i . x - r >= n_i . p_i over the
    inward edge normals. The optimal-center set can be a segment (think of a
    rectangle); to stay symmetric we locate that segment's extent in x and y
    and return its midpoint.
    """
    v = _require_convex(poly)
    e = np.roll(v, -1, axis=0) - v
    nrm = np.stack([-e[:, 1], e[:, 0]], axis=1)  # inward for positive-area polygons
    nrm = nrm / np.linalg.norm(nrm, axis=1, keepdims=True)
    b = np.sum(nrm * v, axis=1)
    a_ub = np.column_stack([-nrm, np.ones(len(v))])
    bounds = [(None, None), (None, None), (0, None)]
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=a_ub, b_ub=-b, bounds=bounds, method="highs")
    if not res.success:
        raise DegenerateInputError(f"inscribed-circle LP failed: {res.message}")
    radius = float(res.x[2])
    if radius <= 0:
        raise DegenerateInputError("polygon has no interior clearance")

    # Midpoint of the optimal face: four more LPs pin the x/y extent at r ~ r*.
    diag = float(np.hypot(*(v.max(axis=0) - v.min(axis=0))))
    slack = max(1e-9 * diag, 1e-12)
    bounds_r = [(None, None), (None, None), (max(radius - slack, 0.0), None)]
    ext = []
    for cvec in ([1.0, 0, 0], [-1.0, 0, 0], [0, 1.0, 0], [0, -1.0, 0]):
        r2 = linprog(c=cvec, A_ub=a_ub, b_ub=-b, bounds=bounds_r, method="highs")
        if not r2.success:
            raise DegenerateInputError(f"inscribed-circle refinement failed: {r2.message}")
        ext.append(r2.x[:2])
    cx = 0.5 * (ext[0][0] + ext[1][0])
    cy = 0.5 * (ext[2][1] + ext[3][1])
    return Circle((float(cx), float(cy)), radius)


# ---------------------------------------------------------------------------
# Smallest enclosing circle (Welzl, move-to-front, deterministic shuffle)
# ---------------------------------------------------------------------------

_MEC_EPS = 1e-14


def _circle_contains(c, p, scale):
    return np.hypot(p[0] - c[0][0], p[1] - c[0][1]) <= c[1] * (1 + _MEC_EPS) + _MEC_EPS * scale


def _circle_two(p, q):
    cx = (p[0] + q[0]) / 2.0
    cy = (p[1] + q[1]) / 2.0
    return ((cx, cy), np.hypot(p[0] - cx, p[1] - cy))


def _circumcircle(a, b, c):
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        return None
    al = ax * ax + ay * ay
    bl = bx * bx + by * by
    cl = cx * cx + cy * cy
    ux = (al * (by - cy) + bl * (cy - ay) + cl * (ay - by)) / d
    uy = (al * (cx - bx) + bl * (ax - cx) + cl * (bx - ax)) / d
    return ((ux, uy), max(np.hypot(ax - ux, ay - uy), np.hypot(bx - ux, by - uy), np.hypot(cx - ux, cy - uy)))


def _cross3(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def min_enclosing_circle(points) -> Circle:
    """Smallest circle containing every input point.

    Expected-linear-time move-to-front construction over a deterministic
    shuffle, so identical inputs give identical circles.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected an (N, 2) point array, got shape {pts.shape}")
    uniq = np.unique(pts, axis=0)
    if len(uniq) < 2:
        raise DegenerateInputError("need at least 2 distinct points")
    scale = float(np.abs(uniq).max()) + 1.0
    order = [tuple(p) for p in uniq]
    random.Random(0x5EED).shuffle(order)

    c = None
    for i, p in enumerate(order):
        if c is None or not _circle_contains(c, p, scale):
            c = _mec_one_point(order[: i + 1], p, scale)
    return Circle((float(c[0][0]), float(c[0][1])), float(c[1]))


def _mec_one_point(pts, p, scale):
    c = (p, 0.0)
    for j, q in enumerate(pts):
        if not _circle_contains(c, q, scale):
            if c[1] == 0.0:
                c = _circle_two(p, q)
            else:
                c = _mec_two_points(pts[: j + 1], p, q, scale)
    return c


def _mec_two_points(pts, p, q, scale):
    circ = _circle_two(p, q)
    left = None
    right = None
    for r in pts:
        if _circle_contains(circ, r, scale):
            continue
        cross = _cross3(p, q, r)
        c3 = _circumcircle(p, q, r)
        if c3 is None:
            continue
        d = _cross3(p, q, c3[0])
        if cross > 0 and (left is None or d > _cross3(p, q, left[0])):
            left = c3
        elif cross < 0 and (right is None or d < _cross3(p, q, right[0])):
            right = c3
    if left is None and right is None:
        return circ
    if left is None:
        return right
    if right is None:
        return left
    return left if left[1] <= right[1] else right


# ---------------------------------------------------------------------------
# Delaunay triangulation (Bowyer-Watson with exact-fallback predicates)
# ---------------------------------------------------------------------------

def _sign(x) -> int:
    return int(x > 0) - int(x < 0)


def _orient_sign(pa, pb, pc) -> int:
    """Sign of the (pa, pb, pc) turn; exact (Fraction fallback near zero)."""
    t1 = (pb[0] - pa[0]) * (pc[1] - pa[1])
    t2 = (pb[1] - pa[1]) * (pc[0] - pa[0])
    det = t1 - t2
    mag = abs(t1) + abs(t2)
    if abs(det) > 1e-12 * mag:
        return _sign(det)
    f = Fraction
    det = (f(pb[0]) - f(pa[0])) * (f(pc[1]) - f(pa[1])) - (f(pb[1]) - f(pa[1])) * (
        f(pc[0]) - f(pa[0])
    )
    return _sign(det)


def _incircle_sign(pa, pb, pc, pd) -> int:
    """Positive iff pd lies strictly inside the circumcircle of CCW (pa, pb, pc)."""
    adx, ady = pa[0] - pd[0], pa[1] - pd[1]
    bdx, bdy = pb[0] - pd[0], pb[1] - pd[1]
    cdx, cdy = pc[0] - pd[0], pc[1] - pd[1]
    al = adx * adx + ady * ady
    bl = bdx * bdx + bdy * bdy
    cl = cdx * cdx + cdy * cdy
    t1 = adx * (bdy * cl - bl * cdy)
    t2 = ady * (bdx * cl - bl * cdx)
    t3 = al * (bdx * cdy - bdy * cdx)
    det = t1 - t2 + t3
    mag = (
        abs(adx) * (abs(bdy * cl) + abs(bl * cdy))
        + abs(ady) * (abs(bdx * cl) + abs(bl * cdx))
        + al * (abs(bdx * cdy) + abs(bdy * cdx))
    )
    if abs(det) > 1e-10 * mag:
        return _sign(det)
    f = Fraction
    fadx, fady = f(pa[0]) - f(pd[0]), f(pa[1]) - f(pd[1])
    fbdx, fbdy = f(pb[0]) - f(pd[0]), f(pb[1]) - f(pd[1])
    fcdx, fcdy = f(pc[0]) - f(pd[0]), f(pc[1]) - f(pd[1])
    fal = fadx * fadx + fady * fady
    fbl = fbdx * fbdx + fbdy * fbdy
    fcl = fcdx * fcdx + fcdy * fcdy
    det = (
        fadx * (fbdy * fcl - fbl * fcdy)
        - fady * (fbdx * fcl - fbl * fcdx)
        + fal * (fbdx * fcdy - fbdy * fcdx)
    )
    return _sign(det)


def _ccw(tri, verts):
    i, j, k = tri
    if _orient_sign(verts[i], verts[j], verts[k]) < 0:
        return (i, k, j)
    return (i, j, k)


def delaunay(points) -> Triangulation:
    """Delaunay triangulation with the empty-circumcircle property.

    Bowyer-Watson incremental insertion in input order; the geometric
    predicates fall back to exact rational arithmetic near ties so the
    result is a valid (non-strict) Delaunay triangulation even for grids.
    Cocircular quads are canonicalized to the diagonal whose endpoint pair
    is lexicographically smaller, making degenerate inputs deterministic.
    Exact duplicate points are merged onto their first occurrence.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise DegenerateInputError(f"need an (N>=3, 2) point array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite values")

    seen: dict[tuple[float, float], int] = {}
    local_pts: list[tuple[float, float]] = []
    orig_index: list[int] = []
    for i, p in enumerate(map(tuple, pts)):
        if p not in seen:
            seen[p] = len(local_pts)
            local_pts.append(p)
            orig_index.append(i)
    n = len(local_pts)
    if n < 3:
        raise DegenerateInputError("need at least 3 distinct points")
    if all(_orient_sign(local_pts[0], local_pts[1], local_pts[k]) == 0 for k in range(2, n)):
        raise DegenerateInputError("points are collinear")

    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    c = (lo + hi) / 2.0
    r = float(max(hi[0] - lo[0], hi[1] - lo[1], 1.0))
    verts = list(local_pts) + [
        (c[0] - 64.0 * r, c[1] - 32.0 * r),
        (c[0] + 64.0 * r, c[1] - 32.0 * r),
        (c[0], c[1] + 64.0 * r),
    ]
    tris: list[tuple[int, int, int]] = [_ccw((n, n + 1, n + 2), verts)]

    for i in range(n):
        p = verts[i]
        bad = [t for t in tris if _incircle_sign(verts[t[0]], verts[t[1]], verts[t[2]], p) > 0]
        edge_count: dict[tuple[int, int], tuple[int, int]] = {}
        counts: dict[tuple[int, int], int] = {}
        for t in bad:
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                key = (min(a, b), max(a, b))
                counts[key] = counts.get(key, 0) + 1
                edge_count[key] = (a, b)
        boundary = [edge_count[k] for k, cnt in counts.items() if cnt == 1]
        bad_set = set(bad)
        tris = [t for t in tris if t not in bad_set]
        for a, b in boundary:
            tris.append(_ccw((i, a, b), verts))

    tris = [t for t in tris if max(t) < n]
    tris = _canonicalize_ties(verts, tris)

    mapped = np.array(
        sorted(tuple(sorted(orig_index[v] for v in t)) for t in tris), dtype=np.int64
    )
    return Triangulation(points=pts, triangles=mapped)


def _canonicalize_ties(verts, tris):
    """Flip cocircular (or stray non-Delaunay) quads toward the canonical diagonal."""
    tris = [_ccw(t, verts) for t in tris]
    while True:
        edge_map: dict[tuple[int, int], list[int]] = {}
        for ti, t in enumerate(tris):
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                edge_map.setdefault((min(a, b), max(a, b)), []).append(ti)
        flipped = False
        for key in sorted(edge_map, key=lambda k: sorted((verts[k[0]], verts[k[1]]))):
            owners = edge_map[key]
            if len(owners) != 2:
                continue
            i, j = key
            t1, t2 = tris[owners[0]], tris[owners[1]]
            k = next(v for v in t1 if v != i and v != j)
            m = next(v for v in t2 if v != i and v != j)
            s_k = _orient_sign(verts[i], verts[j], verts[k])
            s_m = _orient_sign(verts[i], verts[j], verts[m])
            if s_k == 0 or s_m == 0 or s_k == s_m:
                continue
            if _orient_sign(verts[k], verts[m], verts[i]) == 0 or _orient_sign(
                verts[k], verts[m], verts[i]
            ) == _orient_sign(verts[k], verts[m], verts[j]):
                continue
            s = _incircle_sign(verts[t1[0]], verts[t1[1]], verts[t1[2]], verts[m])
            do_flip = s > 0
            if s == 0:
                old = sorted((verts[i], verts[j]))
                new = sorted((verts[k], verts[m]))
                do_flip = new < old
            if do_flip:
                tris[owners[0]] = _ccw((i, k, m), verts)
                tris[owners[1]] = _ccw((j, k, m), verts)
                flipped = True
                break
        if not flipped:
            return tris


# ---------------------------------------------------------------------------
# Assembly and rasterization
# ---------------------------------------------------------------------------

def interior_grid(poly, n: int) -> np.ndarray:
    """n x n bounding-box grid sample restricted to the strict polygon interior."""
    if n <= 0:
        return np.zeros((0, 2), dtype=np.float64)
    v = as_polygon(poly)
    lo = v.min(axis=0)
    hi = v.max(axis=0)
    fr = np.arange(1, n + 1, dtype=np.float64) / (n + 1)
    xs = lo[0] + fr * (hi[0] - lo[0])
    ys = lo[1] + fr * (hi[1] - lo[1])
    gx, gy = np.meshgrid(xs, ys)
    gx = gx.ravel()
    gy = gy.ravel()
    keep = polygon_contains(v, gx, gy) & (distance_to_boundary(v, gx, gy) > 1e-9)
    return np.column_stack([gx[keep], gy[keep]])


def geometric_complement(poly, config: GeometryConfig = GeometryConfig()) -> PrimitiveSet:
    """Assemble the enabled primitive kinds for a silhouette polygon."""
    v = as_polygon(poly)
    segments: list[Segment] = []
    circles: list[Circle] = []
    n = len(v)
    if config.edges:
        segments.extend(Segment(tuple(v[i]), tuple(v[(i + 1) % n])) for i in range(n))
    if config.diagonals:
        segments.extend(polygon_diagonals(v))
    if config.bisectors:
        segments.extend(angle_bisectors(v))
    if config.incircle:
        circles.append(incircle(v))
    if config.circumcircle:
        circles.append(min_enclosing_circle(v))
    if config.delaunay:
        pts = np.vstack([v, interior_grid(v, config.delaunay_grid)])
        tri = delaunay(pts)
        for i, j in tri.edges():
            segments.append(Segment(tuple(tri.points[i]), tuple(tri.points[j])))
    return PrimitiveSet(
        segments=segments,
        circles=circles,
        stroke_width=config.stroke_width,
        stroke_color=tuple(config.stroke_color),
    )


def _stroke_mask_window(width, height, x_lo, x_hi, y_lo, y_hi):
    x0 = max(int(np.floor(x_lo)), 0)
    x1 = min(int(np.ceil(x_hi)), width - 1)
    y0 = max(int(np.floor(y_lo)), 0)
    y1 = min(int(np.ceil(y_hi)), height - 1)
    if x0 > x1 or y0 > y1:
        return None
    gx, gy = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1))
    return x0, y0, gx.astype(np.float64), gy.astype(np.float64)


def rasterize(prims: PrimitiveSet, width: int, height: int) -> np.ndarray:
    """Stroke a primitive set into a transparent RGBA image.

    Hard (non-antialiased) coverage: a pixel is opaque iff its center lies
    within stroke_width/2 of a primitive locus. Deterministic.
    """
    if width < 1 or height < 1:
        raise ValueError("raster dimensions must be positive")
    color = validate_color(prims.stroke_color)
    hw = prims.stroke_width / 2.0
    img = np.zeros((height, width, 4), dtype=np.float64)

    def paint(x0, y0, mask):
        ys_i, xs_i = np.nonzero(mask)
        img[ys_i + y0, xs_i + x0, :3] = color
        img[ys_i + y0, xs_i + x0, 3] = 1.0

    for seg in prims.segments:
        (ax, ay), (bx, by) = seg.a, seg.b
        win = _stroke_mask_window(
            width, height, min(ax, bx) - hw - 1, max(ax, bx) + hw + 1, min(ay, by) - hw - 1, max(ay, by) + hw + 1
        )
        if win is None:
            continue
        x0, y0, gx, gy = win
        d = _dist_point_segment(gx, gy, ax, ay, bx, by)
        paint(x0, y0, d <= hw)

    for circ in prims.circles:
        (cx, cy), r = circ.center, circ.radius
        win = _stroke_mask_window(width, height, cx - r - hw - 1, cx + r + hw + 1, cy - r - hw - 1, cy + r + hw + 1)
        if win is None:
            continue
        x0, y0, gx, gy = win
        d = np.abs(np.hypot(gx - cx, gy - cy) - r)
        paint(x0, y0, d <= hw)

    return img


# ---------------------------------------------------------------------------
# Plain-text polygon i/o: one "x y" vertex per line, counter-clockwise
# ---------------------------------------------------------------------------

def load_polygon_txt(path) -> np.ndarray:
    verts = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"bad polygon line: {line!r}")
            verts.append((float(parts[0]), float(parts[1])))
    return as_polygon(verts)


def save_polygon_txt(poly, path) -> None:
    v = as_polygon(poly)
    with open(path, "w", encoding="utf-8") as fh:
        for x, y in v:
            fh.write(f"{float(x)!r} {float(y)!r}\n")
