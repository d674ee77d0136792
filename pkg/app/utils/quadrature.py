"""
Quadrature on log coordinates.

After x = e^u every integrand used here is smooth on R^d and decays
double-exponentially on at least one side, so a uniform trapezoid rule with a
fixed step converges geometrically. Windows therefore get a number of nodes
proportional to their width; ``QuadratureSpec.points`` counts nodes across
the default window of width ``2 * window``.
"""
import logging
import math
from typing import Callable, List, Tuple

import numpy as np

from app.api.models import QuadratureSpec
from app.config.settings import config
from app.utils.errors import DomainError

logger = logging.getLogger(__name__)

TANH_SINH_T_MAX = 3.0
DISCRETISATION_MARGIN = 3.0
LogIntegrand = Callable[[np.ndarray], np.ndarray]
KernelFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def step_size(spec: QuadratureSpec) -> float:
    return 2.0 * spec.window / (spec.points - 1)


def max_batch_points() -> int:
    return int(config.get_quadrature_config().get('max_batch_points', 2000000))


def trapezoid_rule(lo: np.ndarray, hi: np.ndarray, points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of shape (B, points) for windows [lo_b, hi_b]"""
    t = np.linspace(0.0, 1.0, points)
    width = (hi - lo)[:, None]
    nodes = lo[:, None] + width * t[None, :]
    w = np.full(points, 1.0 / (points - 1))
    w[0] = w[-1] = 0.5 / (points - 1)
    return nodes, width * w[None, :]


def tanh_sinh_rule(lo: np.ndarray, hi: np.ndarray, points: int) -> Tuple[np.ndarray, np.ndarray]:
    t = np.linspace(-TANH_SINH_T_MAX, TANH_SINH_T_MAX, points)
    h = t[1] - t[0]
    arg = 0.5 * math.pi * np.sinh(t)
    s = np.tanh(arg)
    dw = h * 0.5 * math.pi * np.cosh(t) / np.cosh(arg) ** 2
    half = 0.5 * (hi - lo)[:, None]
    mid = 0.5 * (hi + lo)[:, None]
    return mid + half * s[None, :], half * dw[None, :]


RULES = {'trapezoid': trapezoid_rule, 'tanh-sinh': tanh_sinh_rule}


def tensor_grid(lo: np.ndarray, hi: np.ndarray, spec: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Product grid per batch row: nodes (B, N, d) and weights (B, N) for boxes lo/hi of shape (B, d)"""
    B, d = lo.shape
    h = step_size(spec)
    rule = RULES[spec.rule]
    axes_nodes, axes_weights = [], []
    for k in range(d):
        points = max(3, int(math.ceil(float(np.max(hi[:, k] - lo[:, k])) / h)) + 1)
        nodes, weights = rule(lo[:, k], hi[:, k], points)
        axes_nodes.append(nodes)
        axes_weights.append(weights)

    grids = np.meshgrid(*[np.arange(a.shape[1]) for a in axes_nodes], indexing='ij')
    idx = [g.ravel() for g in grids]
    nodes = np.stack([axes_nodes[k][:, idx[k]] for k in range(d)], axis=-1)
    weights = np.ones((B, idx[0].size))
    for k in range(d):
        weights = weights * axes_weights[k][:, idx[k]]
    return nodes, weights


def nodes_per_box(lo: np.ndarray, hi: np.ndarray, spec: QuadratureSpec) -> int:
    h = step_size(spec)
    count = 1
    for k in range(lo.shape[1]):
        count *= max(3, int(math.ceil(float(np.max(hi[:, k] - lo[:, k])) / h)) + 1)
    return count


def tolerance_spec(spec: QuadratureSpec, tol: float) -> QuadratureSpec:
    """
    Coarsest step (never finer than ``spec``) whose discretisation error stays
    well below ``tol``. The integrands are analytic in |Im u| < pi/2, where the
    trapezoid error behaves like exp(-pi^2 / h).
    """
    target = 1e-2 * tol
    h = math.pi ** 2 / (math.log(1.0 / target) + DISCRETISATION_MARGIN)
    points = max(16, int(math.ceil(2.0 * spec.window / h)) + 1)
    return spec.model_copy(update={'points': min(spec.points, points)})


def _row_chunks(width: np.ndarray, budget: int) -> List[np.ndarray]:
    """Rows grouped by box size so that rows x (largest box in the group) stays within budget"""
    order = np.argsort(np.prod(width, axis=1), kind='stable')
    chunks, current = [], []
    extent = np.zeros(width.shape[1], dtype=np.int64)
    for b in order:
        grown = np.maximum(extent, width[b])
        if current and (len(current) + 1) * int(np.prod(grown)) > budget:
            chunks.append(np.array(current))
            current, grown = [], width[b].copy()
        current.append(b)
        extent = grown
    if current:
        chunks.append(np.array(current))
    return chunks


def lattice_integrate(U: np.ndarray, lo: np.ndarray, hi: np.ndarray, log_kernel: KernelFn,
                      inner: LogIntegrand, spec: QuadratureSpec) -> np.ndarray:
    """
    Trapezoid rule on the lattice h Z^d shared by all rows.

    Row b approximates the integral of exp(log_kernel(U[b], v)) * inner(v) over
    the box lo[b]..hi[b], widened outwards to lattice points. ``inner`` is
    evaluated once on the bounding lattice of all boxes and every row reuses
    those values, so nested integrals cost one lower-level pass per level.
    """
    h = step_size(spec)
    B, d = lo.shape
    lo_k = np.floor(lo / h).astype(np.int64)
    hi_k = np.ceil(hi / h).astype(np.int64)
    base = lo_k.min(axis=0)
    extent = hi_k.max(axis=0) - base + 1
    if B > 1 and int(np.prod(extent)) > max_batch_points():
        # rows too far apart for one shared lattice
        order = np.argsort(lo.sum(axis=1), kind='stable')
        out = np.empty(B, dtype=complex)
        for part in (order[:B // 2], order[B // 2:]):
            out[part] = lattice_integrate(U[part], lo[part], hi[part], log_kernel, inner, spec)
        return out
    axes = [h * np.arange(base[k], base[k] + extent[k]) for k in range(d)]
    grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, d)
    lower = np.asarray(inner(grid)).reshape(tuple(extent))

    width = hi_k - lo_k + 1
    out = np.empty(B, dtype=complex)
    for rows in _row_chunks(width, max_batch_points()):
        ext = width[rows].max(axis=0)
        offsets = np.stack(np.meshgrid(*[np.arange(e) for e in ext], indexing='ij'), axis=-1).reshape(-1, d)
        nodes = lo_k[rows][:, None, :] + offsets[None, :, :]
        row_hi = hi_k[rows][:, None, :]
        inside = np.all(nodes <= row_hi, axis=-1)
        idx = np.minimum(nodes, row_hi) - base
        with np.errstate(over='ignore', invalid='ignore'):
            terms = np.exp(log_kernel(U[rows][:, None, :], h * nodes)) * lower[tuple(np.moveaxis(idx, -1, 0))]
        out[rows] = h ** d * np.sum(np.where(inside, terms, 0.0), axis=1)
    return out


def evaluate_chunked(fn: LogIntegrand, nodes: np.ndarray) -> np.ndarray:
    """fn over an (N, d) node array, in slices bounded by the batch budget"""
    budget = max_batch_points()
    if nodes.shape[0] <= budget:
        return fn(nodes)
    return np.concatenate([fn(nodes[k:k + budget]) for k in range(0, nodes.shape[0], budget)])


def _box_integral(fn: LogIntegrand, lo: np.ndarray, hi: np.ndarray, spec: QuadratureSpec) -> complex:
    nodes, weights = tensor_grid(lo[None, :], hi[None, :], spec)
    values = evaluate_chunked(fn, nodes[0])
    return complex(np.sum(weights[0] * values))


def trim_box(fn: LogIntegrand, center: np.ndarray, threshold: float, coarse_step: float = 1.0,
             start: float = 10.0, limit: float = 80.0) -> Tuple[np.ndarray, np.ndarray]:
    """Smallest box around ``center`` outside which |fn| stays below threshold * peak on a coarse grid"""
    d = center.size
    half = start
    while True:
        points = int(round(2 * half / coarse_step)) + 1
        axis = np.linspace(-half, half, points)
        grids = np.meshgrid(*([axis] * d), indexing='ij')
        nodes = center[None, :] + np.stack([g.ravel() for g in grids], axis=-1)
        mag = np.abs(evaluate_chunked(fn, nodes))
        mag = np.where(np.isfinite(mag), mag, 0.0)
        peak = float(np.max(mag))
        if peak == 0.0:
            raise DomainError("Integrand vanishes on the whole search box")
        kept = nodes[mag >= threshold * peak]
        lo = kept.min(axis=0) - coarse_step
        hi = kept.max(axis=0) + coarse_step
        touches = bool(np.any(kept.min(axis=0) <= center - half + 1e-9)
                       or np.any(kept.max(axis=0) >= center + half - 1e-9))
        if not touches or half >= limit:
            if touches:
                logger.warning(f"Integrand still above threshold at the search limit {limit}")
            return np.maximum(lo, center - half), np.minimum(hi, center + half)
        half *= 1.5


def integrate_over_log_space(fn: LogIntegrand, d: int, spec: QuadratureSpec, center: np.ndarray = None,
                             threshold: float = 1e-18) -> Tuple[complex, float]:
    """Integral of fn(u) du over R^d with an error estimate from the rule at twice the step"""
    if d == 0:
        return complex(fn(np.zeros((1, 0)))[0]), 0.0
    center = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    lo, hi = trim_box(fn, center, threshold)
    value = _box_integral(fn, lo, hi, spec)
    # same node count on twice the window is the rule at twice the step
    coarse = spec.model_copy(update={'window': 2 * spec.window})
    error = abs(value - _box_integral(fn, lo, hi, coarse))
    logger.debug(f"log-space integral over box {lo} .. {hi}: {value} (+/- {error:.2e})")
    return value, error

