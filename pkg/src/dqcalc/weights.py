"""Monte Carlo estimates of Kontsevich weight integrals for tiny graphs.

The weight of a graph with ``k`` aerial vertices and two ground vertices is

    c = int_{H^k} prod_edges (1/2pi) d arg((z_s - z_t)/(conj(z_s) - z_t))

with the ground points pinned at 0 and 1, which fixes the affine gauge.  The
pulled-back top form is ``det(J) dx1 dy1 ... dxk dyk / (2pi)^E`` where row
``e`` of ``J`` is the gradient of the angle of edge ``e``.  With this
orientation the wedge graph has weight ``+1/2``.

Sampling is sequential importance sampling.  Each aerial point is drawn from
an equal mixture of kernels centred at the two ground points (restricted to
the upper half-plane) and at the aerial points drawn before it (over the whole
plane; samples below the real line contribute zero).  Each kernel has radial
density ``1/(1+r)^2``, so the proposal behaves like ``1/r`` at every
collision point and the estimator has finite variance.

Random numbers come from numpy's PCG64 seeded by ``SeedSequence(seed)``;
block ``b`` uses the ``b``-th spawned child, so results are bit-identical for
fixed ``(graph, samples, seed)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, GraphError

BLOCK = 1 << 16
MAX_AERIAL = 3


@dataclass(frozen=True)
class WeightEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int
    exact: bool = False

    def within(self, value: float, sigmas: float = 3.0) -> bool:
        return abs(self.mean - value) <= sigmas * self.stderr


def propagator_angle(z: complex, w: complex) -> float:
    """``arg((z - w)/(conj(z) - w))`` in ``[0, 2pi)``."""
    z, w = complex(z), complex(w)
    if z.imag <= 0:
        raise ValueError("z must lie in the open upper half-plane")
    if w.imag < 0:
        raise ValueError("w must lie in the closed upper half-plane")
    if z == w:
        raise ValueError("coincident points")
    a = math.atan2(((z - w) / (z.conjugate() - w)).imag, ((z - w) / (z.conjugate() - w)).real)
    return a % (2 * math.pi)


def _angle_gradient(zx, zy, wx, wy):
    """Gradients of ``phi = arg(z - w) - arg(conj(z) - w)`` in ``(zx, zy)`` and ``(wx, wy)``."""
    dx, dy = zx - wx, zy - wy
    ex, ey = zx - wx, -zy - wy
    r1 = dx * dx + dy * dy
    r2 = ex * ex + ey * ey
    # d arg(u) = (ux duy - uy dux)/|u|^2 with u = z - w and u = conj(z) - w
    gz = (-dy / r1 + ey / r2, dx / r1 + ex / r2)
    gw = (dy / r1 - ey / r2, -dx / r1 + ex / r2)
    return gz, gw


def _radial(rng, size):
    u = rng.random(size)
    return u / (1.0 - u)  # inverse cdf of 1/(1+r)^2


def _radial_pdf(r):
    return 1.0 / (1.0 + r) ** 2


def _sample_block(g: Graph, rng, size: int) -> np.ndarray:
    k = g.aerial
    grounds = [0.0, 1.0]
    xs = np.empty((k, size))
    ys = np.empty((k, size))
    logq = np.zeros(size)
    for i in range(k):
        n_comp = 2 + i
        comp = rng.integers(0, n_comp, size)
        r = _radial(rng, size)
        theta = rng.random(size)
        cx = np.where(comp == 0, grounds[0], grounds[1])
        cy = np.zeros(size)
        half = comp < 2
        for p in range(i):
            sel = comp == 2 + p
            cx = np.where(sel, xs[p], cx)
            cy = np.where(sel, ys[p], cy)
        ang = np.where(half, math.pi * theta, 2 * math.pi * theta)
        xs[i] = cx + r * np.cos(ang)
        ys[i] = cy + r * np.sin(ang)
        dens = np.zeros(size)
        for c in grounds:
            rr = np.hypot(xs[i] - c, ys[i])
            dens += _radial_pdf(rr) / (math.pi * rr)
        for p in range(i):
            rr = np.hypot(xs[i] - xs[p], ys[i] - ys[p])
            dens += _radial_pdf(rr) / (2 * math.pi * rr)
        logq += np.log(dens / n_comp)
    valid = np.all(ys > 0, axis=0)
    ys_safe = np.where(valid, ys, 1.0)
    jac = np.zeros((size, g.n_edges, 2 * k))
    for e, (s, t) in enumerate(g.edges):
        if t < k:
            wx, wy = xs[t], ys_safe[t]
        else:
            wx, wy = grounds[t - k], 0.0
        gz, gw = _angle_gradient(xs[s], ys_safe[s], wx, wy)
        jac[:, e, 2 * s] += gz[0]
        jac[:, e, 2 * s + 1] += gz[1]
        if t < k:
            jac[:, e, 2 * t] += gw[0]
            jac[:, e, 2 * t + 1] += gw[1]
    det = np.linalg.det(jac)
    vals = det / (2 * math.pi) ** g.n_edges * np.exp(-logq)
    return np.where(valid, vals, 0.0)


def estimate_weight(g: Graph, samples: int = 1_000_000, seed: int = 0) -> WeightEstimate:
    """Monte Carlo estimate of the weight of a Kontsevich graph with two ground vertices."""
    if g.species not in ("kontsevich", "brane"):
        raise GraphError("weights are estimated for kontsevich graphs")
    if g.n_edges != 2 * g.aerial + g.ground - 2:
        return WeightEstimate(0.0, 0.0, 0, seed, exact=True)
    if g.ground != 2:
        raise ValueError("the estimator pins exactly two ground points")
    if not 1 <= g.aerial <= MAX_AERIAL:
        raise ValueError(f"only 1..{MAX_AERIAL} aerial vertices are supported")
    if samples < 2:
        raise ValueError("need at least two samples")
    children = np.random.SeedSequence(seed).spawn((samples + BLOCK - 1) // BLOCK)
    total = 0.0
    total_sq = 0.0
    left = samples
    for child in children:
        size = min(BLOCK, left)
        vals = _sample_block(g, np.random.Generator(np.random.PCG64(child)), size)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        left -= size
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return WeightEstimate(mean, math.sqrt(var / samples), samples, seed)
