"""Coordinates for hex complexes: quality metric, init, untangling.

The corner scaled Jacobian of a hex corner is the determinant of the
three unit-normalized edge vectors leaving it, ordered so that every
corner of the reference cube scores +1.  Embeddings are arrays of shape
(vertex_count, 3); partial embeddings (prescribed boundaries) are dicts
mapping vertex id to a coordinate triple.

The optimizer is a two-phase penalty method.  Scaled Jacobians are
useless for untangling (they are scale invariant, so collapsing
elements see vanishing gradients), so phase one drives the raw corner
determinants above a small volume-relative margin; once nothing is
inverted, phase two pushes the scaled Jacobians above the configured
threshold, rejecting any step that would re-invert a corner.  Both
phases run monotone line-searched L-BFGS descent on the free vertices.
A deliberately simple substitute for published untangling schemes,
good enough to embed the packings produced here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEdge, MissingCoordinates
from .fixtures import pyramid36
from .hexmodel import HEX_EDGES, REF_CORNERS, classify_vertices


def _corner_neighbors():
    table = []
    for ci, p in enumerate(REF_CORNERS):
        adj = sorted(
            cj
            for cj, q in enumerate(REF_CORNERS)
            if sum(a != b for a, b in zip(p, q)) == 1
        )
        frame = np.array(
            [np.subtract(REF_CORNERS[cj], p) for cj in adj], dtype=float
        )
        if np.linalg.det(frame) < 0:
            adj[1], adj[2] = adj[2], adj[1]
        table.append(tuple(adj))
    return tuple(table)


# CORNER_NEIGHBORS[ci] lists the three corners adjacent to ci, ordered
# so the reference cube's determinant at every corner is +1.
CORNER_NEIGHBORS = _corner_neighbors()

_NA = np.array([n[0] for n in CORNER_NEIGHBORS])
_NB = np.array([n[1] for n in CORNER_NEIGHBORS])
_NC = np.array([n[2] for n in CORNER_NEIGHBORS])


@dataclass(frozen=True)
class QualityReport:
    per_hex_min: tuple
    global_min: float
    nonpositive_count: int


@dataclass(frozen=True)
class OptimizeParams:
    max_iterations: int = 10000
    step_control: float = 1.0
    barrier_strength: float = 0.5
    tolerance: float = 1e-10


@dataclass(frozen=True)
class OptimizeResult:
    embedding: np.ndarray
    report: QualityReport
    iterations: int
    energy: float
    stop_reason: str
    non_improvable: bool


def as_positions(e, vertex_count):
    """Coerce an embedding (dict or array-like) to a (V, 3) float array."""
    if isinstance(e, dict):
        out = np.empty((vertex_count, 3), dtype=float)
        for vid in range(vertex_count):
            if vid not in e:
                raise MissingCoordinates(f"no coordinates for vertex {vid}")
            out[vid] = e[vid]
    else:
        out = np.array(e, dtype=float)
        if out.shape != (vertex_count, 3):
            raise MissingCoordinates(
                f"embedding has shape {out.shape}, "
                f"expected ({vertex_count}, 3)"
            )
    if not np.isfinite(out).all():
        raise ValueError("embedding contains non-finite coordinates")
    return out


def _edge_frames(c, positions):
    corners = positions[np.asarray(c.hexes)]  # (H, 8, 3)
    u = corners[:, _NA] - corners
    v = corners[:, _NB] - corners
    w = corners[:, _NC] - corners
    return u, v, w


def corner_scaled_jacobians(c, e):
    """(H, 8) array of corner scaled Jacobians; values lie in [-1, 1]."""
    positions = as_positions(e, c.vertex_count)
    if len(c.hexes) == 0:
        return np.empty((0, 8), dtype=float)
    u, v, w = _edge_frames(c, positions)
    a = np.linalg.norm(u, axis=2)
    b = np.linalg.norm(v, axis=2)
    d = np.linalg.norm(w, axis=2)
    if not (a.all() and b.all() and d.all()):
        raise DegenerateEdge("zero-length hex edge in embedding")
    det = np.einsum("hci,hci->hc", u, np.cross(v, w))
    return np.clip(det / (a * b * d), -1.0, 1.0)


def quality_report(c, e):
    s = corner_scaled_jacobians(c, e)
    if s.size == 0:
        return QualityReport((), float("nan"), 0)
    return QualityReport(
        per_hex_min=tuple(float(x) for x in s.min(axis=1)),
        global_min=float(s.min()),
        nonpositive_count=int((s <= 0.0).sum()),
    )


def pyramid_boundary_coords():
    """Prescribed positions for the 18 boundary vertices of the pyramid."""
    c, coords = pyramid36()
    boundary, _ = classify_vertices(c)
    return {vid: coords[vid] for vid in boundary}


def init_interior(c, fixed, tolerance=1e-9, max_sweeps=100000):
    """Average interior vertices over their edge neighbors until settled.

    fixed maps exactly the boundary vertices to coordinates; those rows
    are returned untouched.  Jacobi sweeps run until the largest
    coordinate change drops below tolerance.
    """
    boundary, interior = classify_vertices(c)
    bset = set(boundary)
    missing = [vid for vid in boundary if vid not in fixed]
    if missing:
        raise MissingCoordinates(f"no coordinates for boundary vertex {missing[0]}")
    extra = sorted(set(fixed) - bset)
    if extra:
        raise ValueError(f"fixed contains non-boundary vertex {extra[0]}")

    positions = np.zeros((c.vertex_count, 3), dtype=float)
    banchor = np.array([fixed[vid] for vid in boundary], dtype=float)
    positions[list(boundary)] = banchor
    if not interior:
        return positions
    positions[list(interior)] = banchor.mean(axis=0)

    pairs = set()
    for corners in c.hexes:
        for a, b in HEX_EDGES:
            va, vb = corners[a], corners[b]
            pairs.add((va, vb))
            pairs.add((vb, va))
    rows = np.array(sorted(pairs))
    counts = np.bincount(rows[:, 0], minlength=c.vertex_count).reshape(-1, 1)
    ilist = list(interior)
    for _ in range(max_sweeps):
        sums = np.zeros_like(positions)
        np.add.at(sums, rows[:, 0], positions[rows[:, 1]])
        new = sums / np.maximum(counts, 1)
        delta = np.abs(new[ilist] - positions[ilist]).max()
        positions[ilist] = new[ilist]
        if delta < tolerance:
            break
    return positions


def _corner_dets(hexes, positions):
    corners = positions[hexes]
    u = corners[:, _NA] - corners
    v = corners[:, _NB] - corners
    w = corners[:, _NC] - corners
    return np.einsum("hci,hci->hc", u, np.cross(v, w))


def _scatter_corner_grads(hexes, positions, gu, gv, gw):
    grad = np.zeros_like(positions)
    np.add.at(grad, hexes[:, _NA], gu)
    np.add.at(grad, hexes[:, _NB], gv)
    np.add.at(grad, hexes[:, _NC], gw)
    np.add.at(grad, hexes, -(gu + gv + gw))
    return grad


def _quality_energy(hexes, positions, sigma, want_grad):
    corners = positions[hexes]
    u = corners[:, _NA] - corners
    v = corners[:, _NB] - corners
    w = corners[:, _NC] - corners
    a2 = np.einsum("hci,hci->hc", u, u)
    b2 = np.einsum("hci,hci->hc", v, v)
    c2 = np.einsum("hci,hci->hc", w, w)
    vw = np.cross(v, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        norm = np.sqrt(a2 * b2 * c2)
        s = np.einsum("hci,hci->hc", u, vw) / norm
    if not np.isfinite(s).all():
        return float("inf"), None
    gap = np.maximum(sigma - s, 0.0)
    energy = float((gap * gap).sum())
    if not want_grad:
        return energy, None
    coef = (-2.0 * gap / norm)[:, :, None]
    sn = (2.0 * gap * s)[:, :, None]
    gu = coef * vw + sn * u / a2[:, :, None]
    gv = coef * np.cross(w, u) + sn * v / b2[:, :, None]
    gw = coef * np.cross(u, v) + sn * w / c2[:, :, None]
    return energy, _scatter_corner_grads(hexes, positions, gu, gv, gw)


def _det_energy(hexes, positions, delta, want_grad):
    corners = positions[hexes]
    u = corners[:, _NA] - corners
    v = corners[:, _NB] - corners
    w = corners[:, _NC] - corners
    vw = np.cross(v, w)
    det = np.einsum("hci,hci->hc", u, vw)
    gap = np.maximum(delta - det, 0.0)
    energy = float((gap * gap).sum())
    if not want_grad:
        return energy, None
    co = (-2.0 * gap)[:, :, None]
    gu = co * vw
    gv = co * np.cross(w, u)
    gw = co * np.cross(u, v)
    return energy, _scatter_corner_grads(hexes, positions, gu, gv, gw)


def penalty_energy(c, e, sigma=OptimizeParams.barrier_strength):
    """Quality objective: sum over corners of max(0, sigma - s)^2."""
    positions = as_positions(e, c.vertex_count)
    energy, _ = _quality_energy(np.asarray(c.hexes), positions, sigma, False)
    return energy


def penalty_gradient(c, e, sigma=OptimizeParams.barrier_strength):
    """Analytic gradient of penalty_energy with respect to every vertex."""
    positions = as_positions(e, c.vertex_count)
    _, grad = _quality_energy(np.asarray(c.hexes), positions, sigma, True)
    if grad is None:
        raise DegenerateEdge("zero-length hex edge in embedding")
    return grad


def det_penalty_energy(c, e, delta):
    """Untangling objective: sum over corners of max(0, delta - det)^2."""
    positions = as_positions(e, c.vertex_count)
    energy, _ = _det_energy(np.asarray(c.hexes), positions, delta, False)
    return energy


def det_penalty_gradient(c, e, delta):
    """Analytic gradient of det_penalty_energy."""
    positions = as_positions(e, c.vertex_count)
    _, grad = _det_energy(np.asarray(c.hexes), positions, delta, True)
    return grad


# untangling margin: corner determinants are pushed above this fraction
# of the mean absolute corner determinant of the starting embedding
_UNTANGLE_MARGIN = 0.05

_STALL_WINDOW = 10


def _descend(fg, positions, free, budget, step0, tolerance):
    """Monotone L-BFGS descent of fg over the free rows of positions.

    fg(positions, want_grad) -> (energy, grad or None); an infinite
    energy marks a forbidden state, which the line search backs away
    from.  Returns (positions, energy, accepted_steps, reason); every
    accepted step strictly decreases the energy.
    """
    energy, grad = fg(positions, True)
    if energy == 0.0 or free.size == 0:
        return positions, energy, 0, "zero_energy" if energy == 0.0 else "stall"
    x = positions[free].ravel()
    g = grad[free].ravel()
    mem_s, mem_y, mem_rho = [], [], []
    history = [energy]
    accepted = 0

    def at(xv, want_grad):
        pts = positions.copy()
        pts[free] = xv.reshape(-1, 3)
        e, gr = fg(pts, want_grad)
        return pts, e, gr

    for _ in range(budget):
        q = g.copy()
        alpha = [0.0] * len(mem_s)
        for i in range(len(mem_s) - 1, -1, -1):
            alpha[i] = mem_rho[i] * float(mem_s[i] @ q)
            q -= alpha[i] * mem_y[i]
        if mem_y:
            q *= float(mem_s[-1] @ mem_y[-1]) / float(mem_y[-1] @ mem_y[-1])
        else:
            q /= max(1.0, float(np.linalg.norm(g)))
        for i in range(len(mem_s)):
            beta = mem_rho[i] * float(mem_y[i] @ q)
            q += (alpha[i] - beta) * mem_s[i]
        d = -q
        slope = float(g @ d)
        if slope >= 0.0:  # bad curvature model: fall back to steepest descent
            d = -g
            slope = -float(g @ g)
            if slope == 0.0:
                return positions, energy, accepted, "stall"
        trial = step0
        while True:
            _, cand, _ = at(x + trial * d, False)
            if cand <= energy + 1e-4 * trial * slope:
                break
            trial *= 0.5
            if trial < 1e-18 * step0:
                return positions, energy, accepted, "no_step"
        xn = x + trial * d
        positions, energy_n, grad_n = at(xn, True)
        gn = grad_n[free].ravel()
        s, y = xn - x, gn - g
        ys = float(y @ s)
        if ys > 1e-14 * float(np.linalg.norm(y)) * float(np.linalg.norm(s)):
            mem_s.append(s)
            mem_y.append(y)
            mem_rho.append(1.0 / ys)
            if len(mem_s) > 8:
                mem_s.pop(0)
                mem_y.pop(0)
                mem_rho.pop(0)
        x, g, energy = xn, gn, energy_n
        accepted += 1
        history.append(energy)
        if energy == 0.0:
            return positions, energy, accepted, "zero_energy"
        if (
            len(history) > _STALL_WINDOW
            and history[-_STALL_WINDOW - 1] - energy < tolerance
        ):
            return positions, energy, accepted, "stall"
    return positions, energy, accepted, "max_iterations"


def optimize_embedding(c, e, fixed, params=None):
    """Untangle, then raise low scaled Jacobians; fixed vertices pinned.

    Phase one pushes raw corner determinants above a small margin so
    nothing stays inverted; phase two minimizes the scaled-Jacobian
    penalty at params.barrier_strength and refuses steps that would
    re-invert a corner.  Accepted steps always decrease the phase
    objective.  Each phase ends at zero energy, on a stall (< tolerance
    improvement over 10 iterations), when no step length helps, or when
    the shared iteration budget runs out.  non_improvable is set when
    the result still has a non-positive corner but the optimizer
    stopped for lack of progress rather than budget.  Fixed rows of the
    result are bit-identical to the input.
    """
    if params is None:
        params = OptimizeParams()
    positions = as_positions(e, c.vertex_count).copy()
    fixed = set(fixed)
    for vid in fixed:
        if not 0 <= vid < c.vertex_count:
            raise IndexError(f"fixed vertex {vid} out of range")
    free = np.array(
        [vid for vid in range(c.vertex_count) if vid not in fixed], dtype=int
    )
    hexes = np.asarray(c.hexes)

    def finish(iters, energy, reason):
        rep = quality_report(c, positions)
        bad = (
            rep.nonpositive_count > 0
            and reason in ("stall", "no_step")
        )
        return OptimizeResult(positions, rep, iters, energy, reason, bad)

    if len(c.hexes) == 0:
        return finish(0, 0.0, "zero_energy")
    if free.size == 0:
        energy, _ = _quality_energy(
            hexes, positions, params.barrier_strength, False
        )
        return finish(0, energy, "zero_energy" if energy == 0.0 else "stall")

    dets = _corner_dets(hexes, positions)
    if not np.isfinite(dets).all():
        raise ValueError("embedding produces non-finite corner determinants")
    delta = _UNTANGLE_MARGIN * float(np.abs(dets).mean())
    used = 0
    if dets.min() < delta:
        positions, energy, steps, reason = _descend(
            lambda p, wg: _det_energy(hexes, p, delta, wg),
            positions,
            free,
            params.max_iterations,
            params.step_control,
            params.tolerance,
        )
        used += steps
        if reason not in ("zero_energy",) and energy > 0.0:
            return finish(used, energy, reason)

    feasible = _corner_dets(hexes, positions).min() > 0.0

    def quality_fg(pts, want_grad):
        if feasible and _corner_dets(hexes, pts).min() <= 0.0:
            return float("inf"), None
        return _quality_energy(hexes, pts, params.barrier_strength, want_grad)

    positions, energy, steps, reason = _descend(
        quality_fg,
        positions,
        free,
        params.max_iterations - used,
        params.step_control,
        params.tolerance,
    )
    if params.max_iterations - used == 0:
        reason = "max_iterations"
    return finish(used + steps, energy, reason)
