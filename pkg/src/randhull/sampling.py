"""Seeded i.i.d. point clouds inside a body or on its boundary.

Streams are Philox counter-based generators keyed by (seed, spawn_key), so the
same (body, mode, n, seed) always reproduces the identical cloud bit for bit
and distinct seeds can be consumed concurrently.  Ellipsoid interiors are the
affine image of the unit-ball draw with the same stream; that identity is load
bearing (tests rely on it), so do not reorder the draws.

Interior modes: ball by radial scaling, ellipsoid by affine pushforward,
polytope by bounding-box rejection, dented ball by rejection from its
enclosing ball.  Boundary modes: ball via normalized Gaussians, ellipsoid via
Jacobian-reweighted rejection off the sphere (exact area uniformity, no mesh).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    Ball,
    BodySpec,
    BumpBall,
    Ellipsoid,
    PolytopeV,
    contains_batch,
    support,
)

_MODE_KEYS = {"interior": 0, "boundary": 1}
_MAX_REJECTION_ROUNDS = 500


def philox(seed: int, *key: int) -> np.random.Generator:
    """Independent stream for a given seed and spawn key path."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))
    )


def unit_directions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1)
    bad = norms < 1e-12
    while np.any(bad):
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms[bad] = np.linalg.norm(g[bad], axis=1)
        bad = norms < 1e-12
    return g / norms[:, None]


def unit_ball_points(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """Uniform draw from the unit ball: direction times U^(1/d) radius."""
    dirs = unit_directions(rng, n, d)
    radii = rng.random(n) ** (1.0 / d)
    return dirs * radii[:, None]


@dataclass
class SampleCloud:
    points: np.ndarray
    body: BodySpec
    mode: str
    seed: int
    n: int

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.mode not in _MODE_KEYS:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.n != len(self.points):
            raise ValueError("n does not match the point count")

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def sample(body: BodySpec, mode: str, n: int, seed: int) -> SampleCloud:
    """n i.i.d. points, uniform in d-volume (interior) or surface area (boundary)."""
    if mode not in _MODE_KEYS:
        raise ValueError(f"unknown mode {mode!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = philox(seed, _MODE_KEYS[mode])
    if mode == "interior":
        pts = _sample_interior(body, n, rng)
    else:
        pts = _sample_boundary(body, n, rng)
    return SampleCloud(points=pts, body=body, mode=mode, seed=int(seed), n=n)


def _sample_interior(body: BodySpec, n: int, rng: np.random.Generator) -> np.ndarray:
    d = body.dim
    if isinstance(body, Ball):
        return body.center + body.radius * unit_ball_points(rng, n, d)
    if isinstance(body, Ellipsoid):
        z = unit_ball_points(rng, n, d)
        return body.center + (z * body.semi_axes) @ body.rotation.T
    if isinstance(body, PolytopeV):
        lo = body.vertices.min(axis=0)
        hi = body.vertices.max(axis=0)
        return _rejection_loop(
            n,
            lambda m: lo + (hi - lo) * rng.random((m, d)),
            lambda pts: contains_batch(body, pts),
        )
    if isinstance(body, BumpBall):
        return _rejection_loop(
            n,
            lambda m: body.radius * unit_ball_points(rng, m, d),
            lambda pts: contains_batch(body, pts),
        )
    raise TypeError(f"unknown body kind {type(body).__name__}")


def _sample_boundary(body: BodySpec, n: int, rng: np.random.Generator) -> np.ndarray:
    d = body.dim
    if isinstance(body, Ball):
        return body.center + body.radius * unit_directions(rng, n, d)
    if isinstance(body, Ellipsoid):
        s = body.semi_axes
        s_min = float(np.min(s))

        def propose(m: int) -> np.ndarray:
            theta = unit_directions(rng, m, d)
            accept_prob = s_min * np.linalg.norm(theta / s, axis=1)
            keep = rng.random(m) < accept_prob
            return theta[keep]

        theta = _collect(n, propose)
        return body.center + (theta * s) @ body.rotation.T
    raise ValueError(
        f"boundary sampling is not supported for {type(body).__name__}"
    )


def _rejection_loop(n: int, propose, accept) -> np.ndarray:
    def propose_accepted(m: int) -> np.ndarray:
        pts = propose(m)
        return pts[accept(pts)]

    return _collect(n, propose_accepted)


def _collect(n: int, propose_accepted) -> np.ndarray:
    """Run batched proposals until n points are accepted; keep the first n."""
    chunks = []
    got = 0
    batch = max(1024, n)
    for _ in range(_MAX_REJECTION_ROUNDS):
        pts = propose_accepted(batch)
        if len(pts):
            chunks.append(pts)
            got += len(pts)
        if got >= n:
            return np.vstack(chunks)[:n]
    raise RuntimeError("rejection sampler failed to accept enough points")


def empirical_cap_probability(cloud: SampleCloud, u: np.ndarray, eps: float) -> float:
    """Fraction of the cloud in the width-eps cap of the cloud's body at u."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    u = np.asarray(u, dtype=float)
    level = support(cloud.body, u) - eps
    return float(np.mean(cloud.points @ u >= level))


# ---------------------------------------------------------------------------
# point CSV I/O (one point per row, decimal literals that round-trip)


def points_to_csv(points: np.ndarray) -> str:
    """CSV text with an x0,...,x{d-1} header; floats written via repr (lossless)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    header = ",".join(f"x{j}" for j in range(points.shape[1]))
    body = "".join(",".join(repr(float(x)) for x in row) + "\n" for row in points)
    return header + "\n" + body


def save_points(points: np.ndarray, path) -> None:
    with open(path, "w") as fh:
        fh.write(points_to_csv(points))


def load_points(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("x0"):
                continue
            rows.append([float(tok) for tok in line.split(",")])
    return np.asarray(rows, dtype=float)
