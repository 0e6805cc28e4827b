"""Finite direction nets on the unit sphere.

A net at scale delta is a delta-packing (pairwise Euclidean distance > delta)
that is also a delta-covering (every unit vector within delta of some net
point).  Construction is greedy rejection sampling followed by a deterministic
repair step that closes residual coverage gaps:

* d = 2: sort by angle and subdivide any arc gap that is too wide.  Exact.
* d = 3: insert spherical Voronoi circumcenters that sit farther than delta
  from their generators, iterating until none remain.  Exact, because the
  covering radius of a point set on the sphere is attained at a Voronoi vertex.
* d >= 4 (or tiny degenerate nets): random probe passes until a full pass
  inserts nothing.  Monte Carlo only, so the net is marked uncertified.

Neighbor queries against large point sets go through blocked matrix products
to keep peak memory flat.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np


_BLOCK_ELEMS = 4_000_000


def blocked_max_dot(dirs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Row-wise max of dirs @ points.T without materializing the full product.

    The chunk product goes into one reused buffer, so the call does pure BLAS
    work regardless of how many chunks the points split into.
    """
    dirs = np.ascontiguousarray(np.atleast_2d(np.asarray(dirs, dtype=float)))
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m = len(dirs)
    out = np.full(m, -np.inf)
    step = max(1, _BLOCK_ELEMS // max(1, m))
    buf = np.empty((m, min(step, len(points))))
    for lo in range(0, len(points), step):
        chunk = points[lo : lo + step]
        if len(chunk) == buf.shape[1]:
            np.dot(dirs, chunk.T, out=buf)
            np.maximum(out, buf.max(axis=1), out=out)
        else:
            np.maximum(out, (dirs @ chunk.T).max(axis=1), out=out)
    return out


def blocked_argmax_dot(dirs: np.ndarray, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Argmax companion of blocked_max_dot: (indices into points, max dots)."""
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    points = np.atleast_2d(np.asarray(points, dtype=float))
    best = np.full(len(dirs), -np.inf)
    arg = np.zeros(len(dirs), dtype=np.int64)
    step = max(1, _BLOCK_ELEMS // max(1, len(dirs)))
    rows = np.arange(len(dirs))
    for lo in range(0, len(points), step):
        prod = dirs @ points[lo : lo + step].T
        k = prod.argmax(axis=1)
        val = prod[rows, k]
        better = val > best
        best[better] = val[better]
        arg[better] = k[better] + lo
    return arg, best


def _random_units(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1)
    # resample the (measure-zero) degenerate rows instead of dividing by ~0
    bad = norms < 1e-12
    while np.any(bad):
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms[bad] = np.linalg.norm(g[bad], axis=1)
        bad = norms < 1e-12
    return g / norms[:, None]


# ---------------------------------------------------------------------------
# the net object


@dataclass
class SphereNet:
    dim: int
    delta: float
    points: np.ndarray
    seed: int
    streak: int
    cover_radius: float
    certified: bool

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))

    def __len__(self) -> int:
        return len(self.points)

    def nearest(self, v: np.ndarray) -> tuple[int, float]:
        """Index of the nearest net point to unit v and the Euclidean distance."""
        v = np.asarray(v, dtype=float)
        arg, dot = blocked_argmax_dot(v[None, :], self.points)
        return int(arg[0]), math.sqrt(max(0.0, 2.0 - 2.0 * float(dot[0])))

    def coverage_distances(self, dirs: np.ndarray) -> np.ndarray:
        """Distance from each probe direction to the net."""
        dots = np.clip(blocked_max_dot(dirs, self.points), -1.0, 1.0)
        return np.sqrt(np.maximum(0.0, 2.0 - 2.0 * dots))

    def min_pairwise_distance(self) -> float:
        """Packing margin; quadratic in the net size, meant for small nets."""
        p = self.points
        best = -np.inf
        step = max(1, _BLOCK_ELEMS // max(1, len(p)))
        for lo in range(0, len(p), step):
            prod = p[lo : lo + step] @ p.T
            rows = np.arange(prod.shape[0])
            prod[rows, rows + lo] = -np.inf
            best = max(best, float(prod.max()))
        return math.sqrt(max(0.0, 2.0 - 2.0 * min(1.0, best)))


def default_streak(d: int, delta: float) -> int:
    """Stopping patience for the greedy phase: 50 / delta^(d-1) misses."""
    return int(math.ceil(50.0 / delta ** (d - 1)))


# ---------------------------------------------------------------------------
# construction


def build_net(
    d: int,
    delta: float,
    seed: int,
    *,
    streak: int | None = None,
    batch: int = 4096,
    repair: bool = True,
) -> SphereNet:
    """Greedy maximal-packing net with deterministic coverage repair.

    The greedy phase draws i.i.d. uniform directions and keeps those farther
    than delta from everything kept so far, stopping after `streak` consecutive
    rejections.  A maximal delta-packing is automatically a delta-covering;
    the random phase only approximates maximality, so the repair phase closes
    the remaining gaps exactly (d <= 3) or by probing (d >= 4).
    """
    if d < 2:
        raise ValueError("dimension must be >= 2")
    if not (0.0 < delta <= 1.0):
        raise ValueError("delta must be in (0, 1]")
    if streak is None:
        streak = default_streak(d, delta)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    thresh = 1.0 - delta**2 / 2.0  # dot > thresh  <=>  distance < delta

    store = np.empty((65536, d))
    n_kept = 0
    misses = 0
    keep_ptr = np.empty(batch, dtype=np.int64)
    while misses < streak:
        cand = _random_units(rng, batch, d)
        if n_kept:
            idx = np.flatnonzero(blocked_max_dot(cand, store[:n_kept]) <= thresh)
        else:
            idx = np.arange(batch)
        # walk only the pre-cleared candidates; runs of rejected ones in
        # between just advance the miss counter, exactly as a one-at-a-time
        # greedy over the full batch would
        k = 0
        prev = -1
        stopped = False
        if len(idx):
            sub = np.ascontiguousarray(cand[idx])
            gram = sub @ sub.T
            for ptr in range(len(idx)):
                i = int(idx[ptr])
                misses += i - prev - 1
                prev = i
                if misses >= streak:
                    stopped = True
                    break
                if k and float(np.max(gram[ptr, keep_ptr[:k]])) > thresh:
                    misses += 1
                    if misses >= streak:
                        stopped = True
                        break
                    continue
                if n_kept == len(store):
                    store = np.concatenate([store, np.empty_like(store)])
                store[n_kept] = sub[ptr]
                n_kept += 1
                keep_ptr[k] = ptr
                k += 1
                misses = 0
        if not stopped:
            misses += batch - 1 - prev
    if n_kept == 0:
        raise RuntimeError("greedy phase kept no points; streak too small")
    arr = store[:n_kept].copy()

    if repair:
        if d == 2:
            arr, cover, certified = _repair_circle(arr, delta)
        elif d == 3:
            try:
                arr, cover, certified = _repair_sphere(arr, delta)
            except Exception:
                arr, cover, certified = _repair_probe(arr, delta, rng)
        else:
            arr, cover, certified = _repair_probe(arr, delta, rng)
    else:
        cover, certified = float("nan"), False

    return SphereNet(
        dim=d,
        delta=float(delta),
        points=arr,
        seed=int(seed),
        streak=int(streak),
        cover_radius=float(cover),
        certified=bool(certified),
    )


def _repair_circle(pts: np.ndarray, delta: float) -> tuple[np.ndarray, float, bool]:
    """Subdivide over-wide arc gaps; exact covering certificate on S^1."""
    theta_c = 2.0 * math.asin(min(1.0, delta / 2.0))
    ang = np.sort(np.arctan2(pts[:, 1], pts[:, 0]))
    gaps = np.diff(np.append(ang, ang[0] + 2.0 * math.pi))
    out_ang = [ang]
    final_gaps = []
    for a, g in zip(ang, gaps):
        m = max(1, math.ceil(g / (2.0 * theta_c) - 1e-12))
        if m > 1:
            out_ang.append(a + g * np.arange(1, m) / m)
        final_gaps.append(g / m)
    full = np.sort(np.concatenate(out_ang))
    cover = 2.0 * math.sin(max(final_gaps) / 4.0)
    return np.column_stack([np.cos(full), np.sin(full)]), cover, True


def _voronoi_vertex_distances(pts: np.ndarray):
    """Spherical Voronoi vertices of pts and their distance to the net.

    Each vertex is equidistant from its incident generators and at least that
    far from every other point, so one incident generator per vertex suffices.
    """
    from scipy.spatial import SphericalVoronoi

    sv = SphericalVoronoi(pts, radius=1.0, threshold=1e-10)
    gen = np.full(len(sv.vertices), -1, dtype=np.int64)
    for i, region in enumerate(sv.regions):
        for v in region:
            if gen[v] < 0:
                gen[v] = i
    verts = sv.vertices / np.linalg.norm(sv.vertices, axis=1)[:, None]
    dist = np.linalg.norm(verts - pts[gen], axis=1)
    return verts, dist


def _repair_sphere(
    pts: np.ndarray, delta: float, max_rounds: int = 60
) -> tuple[np.ndarray, float, bool]:
    """Insert uncovered Voronoi circumcenters until the covering is exact (S^2)."""
    thresh = 1.0 - delta**2 / 2.0
    for _ in range(max_rounds):
        verts, dist = _voronoi_vertex_distances(pts)
        far = np.argsort(dist)[::-1]
        far = far[dist[far] > delta]
        if len(far) == 0:
            return pts, float(dist.max()), True
        buf = np.empty((len(far), pts.shape[1]))
        k = 0
        for i in far:
            v = verts[i]
            if k and float(np.max(buf[:k] @ v)) > thresh:
                continue
            buf[k] = v
            k += 1
        pts = np.vstack([pts, buf[:k]])
    raise RuntimeError("coverage repair did not converge")


def _repair_probe(
    pts: np.ndarray,
    delta: float,
    rng: np.random.Generator,
    probes: int = 100_000,
    max_rounds: int = 200,
) -> tuple[np.ndarray, float, bool]:
    """Insert uncovered random probes until a pass stays clean.  Not certified."""
    d = pts.shape[1]
    thresh = 1.0 - delta**2 / 2.0
    worst = 0.0
    for _ in range(max_rounds):
        cand = _random_units(rng, probes, d)
        dots = blocked_max_dot(cand, pts)
        worst = math.sqrt(max(0.0, 2.0 - 2.0 * float(dots.min())))
        holes = np.flatnonzero(dots <= thresh)
        if len(holes) == 0:
            return pts, worst, False
        buf = np.empty((len(holes), d))
        k = 0
        for i in holes:
            v = cand[i]
            if k and float(np.max(buf[:k] @ v)) > thresh:
                continue
            buf[k] = v
            k += 1
        pts = np.vstack([pts, buf[:k]])
    raise RuntimeError("probe repair did not converge")


# ---------------------------------------------------------------------------
# chaining decomposition


@dataclass
class Decomposition:
    """u = net[base] - sum_j coeff_j * net[index_j] - residual, exactly."""

    base: int
    terms: list[tuple[float, int]]
    residual: np.ndarray

    @property
    def error(self) -> float:
        return float(np.linalg.norm(self.residual))

    def approximation(self, net: SphereNet) -> np.ndarray:
        out = net.points[self.base].copy()
        for coeff, idx in self.terms:
            out -= coeff * net.points[idx]
        return out


def decompose(net: SphereNet, u: np.ndarray, depth: int) -> Decomposition:
    """Peel u into net directions with geometrically shrinking coefficients.

    On a delta-covering net the j-th coefficient is at most delta^j and the
    final residual at most delta^(depth+1): each step rescales the residual by
    the distance from its direction to the net.
    """
    u = np.asarray(u, dtype=float)
    if abs(float(np.linalg.norm(u)) - 1.0) > 1e-9:
        raise ValueError("u must be a unit vector")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    base, _ = net.nearest(u)
    r = net.points[base] - u
    terms: list[tuple[float, int]] = []
    for _ in range(depth):
        nr = float(np.linalg.norm(r))
        if nr < 1e-15:
            break
        idx, _ = net.nearest(r / nr)
        terms.append((nr, idx))
        r = r - nr * net.points[idx]
    return Decomposition(base=base, terms=terms, residual=r)


# ---------------------------------------------------------------------------
# certified sup bound


def certified_sup_deficit(net: SphereNet, h_big, h_small) -> tuple[float, float]:
    """Bound sup over the sphere of (h_big - h_small) from net evaluations alone.

    h_big and h_small map an (m, d) array of unit directions to (m,) support
    values of convex bodies contained in the unit ball, with the small body
    inside the big one.  Chaining over the net gives

        sup (h_big - h_small) <= net_sup + 2 * delta / (1 - delta)

    and for delta <= 1/2 the right side is at most 2 * max(net_sup, 4 * delta),
    which is what the certificate reports.
    """
    if net.delta > 0.5:
        raise ValueError("certificate requires delta <= 1/2")
    vals = np.asarray(h_big(net.points), dtype=float) - np.asarray(
        h_small(net.points), dtype=float
    )
    net_sup = float(vals.max())
    certified = 2.0 * max(net_sup, 4.0 * net.delta)
    return net_sup, certified


# ---------------------------------------------------------------------------
# JSON (de)serialization


def net_to_dict(net: SphereNet) -> dict:
    return {
        "dim": net.dim,
        "delta": net.delta,
        "seed": net.seed,
        "streak": net.streak,
        "cover_radius": net.cover_radius,
        "certified": net.certified,
        "points": net.points.tolist(),
    }


def net_from_dict(doc: dict) -> SphereNet:
    return SphereNet(
        dim=int(doc["dim"]),
        delta=float(doc["delta"]),
        points=np.asarray(doc["points"], dtype=float),
        seed=int(doc["seed"]),
        streak=int(doc["streak"]),
        cover_radius=float(doc["cover_radius"]),
        certified=bool(doc["certified"]),
    )


def save_net(net: SphereNet, path) -> None:
    with open(path, "w") as fh:
        json.dump(net_to_dict(net), fh)
        fh.write("\n")


def load_net(path) -> SphereNet:
    with open(path) as fh:
        return net_from_dict(json.load(fh))
