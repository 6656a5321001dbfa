"""Protograph density evolution on the binary erasure channel.

Messages live on edge *instances*: an entry of multiplicity m contributes m
independent edges.  One iteration is a synchronous flooding update,

    CN side:  y_e = 1 - prod_{e' at the same CN, e' != e} (1 - x_e')
    VN side:  x_e = eps * prod_{e' at the same VN, e' != e} y_e'

starting from x_e = eps, with the a-posteriori erasure probability
P_j = eps * prod over all edges of VN j of y_e.  Edge instances follow the
canonical CN-major order of :func:`scldpc.protograph.edge_list`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .protograph import Protograph, construct, design_rate, EnsembleSpec, edge_list

__all__ = [
    "DEState",
    "DEResult",
    "ThresholdResult",
    "StructuralError",
    "de_iterate",
    "de_run",
    "bp_threshold",
    "iavg",
    "sweep_point",
    "sweep_rate_threshold",
]

STALL_DELTA = 1e-13
STALL_WINDOW = 10


class StructuralError(ValueError):
    """The protograph cannot be decoded for structural reasons."""


@dataclass
class DEState:
    """Per-edge message state after ``iteration`` updates."""

    x: np.ndarray
    y: np.ndarray
    iteration: int


@dataclass
class DEResult:
    p_vn: np.ndarray
    iterations_used: int
    converged: bool
    history: np.ndarray | None = None


@dataclass
class ThresholdResult:
    epsilon_star: float
    bracket: float
    max_iter: int
    target: float
    evaluations: int


class _Graph:
    """Compiled edge-instance structure for vectorized updates."""

    def __init__(self, p: Protograph):
        edge_cn, edge_vn = edge_list(p)
        self.n_cn = p.n_cn
        self.n_vn = p.n_vn
        self.n_edges = edge_cn.size
        # CN groups are contiguous in canonical order
        self.cn_starts = np.searchsorted(edge_cn, np.arange(p.n_cn))
        self.cn_ends = np.searchsorted(edge_cn, np.arange(p.n_cn) + 1)
        self.cn_group = edge_cn
        self.vn_perm = np.argsort(edge_vn, kind="stable")
        vn_sorted = edge_vn[self.vn_perm]
        self.vn_starts = np.searchsorted(vn_sorted, np.arange(p.n_vn))
        self.vn_ends = np.searchsorted(vn_sorted, np.arange(p.n_vn) + 1)
        self.vn_group = vn_sorted
        self.vn_degrees = self.vn_ends - self.vn_starts


def _group_products(values: np.ndarray, starts: np.ndarray, ends: np.ndarray):
    """Per-group (product of nonzero entries, zero count).

    Groups must be contiguous runs; empty groups get product 1, count 0.
    """
    nz = np.where(values == 0.0, 1.0, values)
    prod = np.ones(starts.size)
    zeros = np.zeros(starts.size, dtype=np.int64)
    nonempty = starts < ends
    if nonempty.any():
        prod[nonempty] = np.multiply.reduceat(nz, starts[nonempty])
        zeros[nonempty] = np.add.reduceat((values == 0.0).astype(np.int64), starts[nonempty])
    return prod, zeros


def _exclusive_products(
    values: np.ndarray,
    starts: np.ndarray,
    ends: np.ndarray,
    group_of: np.ndarray,
) -> np.ndarray:
    """For every element, the product of the other elements in its group."""
    prod, zeros = _group_products(values, starts, ends)
    z = zeros[group_of]
    p = prod[group_of]
    out = np.zeros_like(values)
    no_zero = z == 0
    out[no_zero] = p[no_zero] / values[no_zero]
    lone_zero = (z == 1) & (values == 0.0)
    out[lone_zero] = p[lone_zero]
    return out


def _iterate(g: _Graph, eps: float, x: np.ndarray):
    """One synchronous update; returns (x_next, y, p_vn)."""
    y = 1.0 - _exclusive_products(1.0 - x, g.cn_starts, g.cn_ends, g.cn_group)
    y_v = y[g.vn_perm]
    excl = _exclusive_products(y_v, g.vn_starts, g.vn_ends, g.vn_group)
    x_next = np.empty_like(x)
    x_next[g.vn_perm] = eps * excl
    prod, zeros = _group_products(y_v, g.vn_starts, g.vn_ends)
    p_vn = eps * np.where(zeros > 0, 0.0, prod)
    return x_next, y, p_vn


def _compile(p: Protograph) -> _Graph:
    if p.n_vn == 0:
        raise StructuralError("protograph has no variable nodes")
    return _Graph(p)


def de_iterate(p: Protograph, epsilon: float, state: DEState | None = None) -> tuple[DEState, np.ndarray]:
    """Run one density-evolution iteration; returns (new state, p_vn)."""
    _check_eps(epsilon)
    g = _compile(p)
    if state is None:
        state = DEState(x=np.full(g.n_edges, epsilon), y=np.ones(g.n_edges), iteration=0)
    x_next, y, p_vn = _iterate(g, epsilon, state.x)
    return DEState(x=x_next, y=y, iteration=state.iteration + 1), p_vn


def _check_eps(epsilon: float) -> None:
    if not (0.0 <= epsilon <= 1.0):
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")


def de_run(
    p: Protograph,
    epsilon: float,
    max_iter: int = 20000,
    target: float = 1e-12,
    record_history: bool = False,
) -> DEResult:
    """Iterate until max_j P_j <= target, a stall, or max_iter.

    A stall is the whole message vector moving less than STALL_DELTA in
    sup norm over STALL_WINDOW consecutive iterations while some P_j is
    still above target.  Tracking the messages rather than max_j P_j
    matters on long chains: while the resolution wave travels inward the
    interior erasure rate sits flat at its plateau even though decoding
    is making steady progress.
    """
    _check_eps(epsilon)
    g = _compile(p)
    x = np.full(g.n_edges, float(epsilon))
    history: list[float] = []
    p_vn = np.full(g.n_vn, float(epsilon))
    stall = 0
    it = 0
    while it < max_iter:
        x_prev = x
        x, _, p_vn = _iterate(g, epsilon, x)
        it += 1
        m = float(p_vn.max()) if p_vn.size else 0.0
        if record_history:
            history.append(m)
        if m <= target:
            return DEResult(p_vn, it, True, np.array(history) if record_history else None)
        if float(np.abs(x - x_prev).max()) < STALL_DELTA:
            stall += 1
            if stall >= STALL_WINDOW:
                break
        else:
            stall = 0
    return DEResult(p_vn, it, False, np.array(history) if record_history else None)


def bp_threshold(
    p: Protograph,
    tol: float = 1e-5,
    max_iter: int = 20000,
    target: float = 1e-12,
) -> ThresholdResult:
    """Belief-propagation threshold by bisection of the de_run predicate."""
    if p.n_vn == 0:
        raise StructuralError("protograph has no variable nodes")
    degs = p.vn_degrees
    if (degs == 0).any():
        bad = int(np.nonzero(degs == 0)[0][0])
        raise StructuralError(
            f"variable node {bad} has degree 0; density evolution can never converge"
        )
    evals = 0
    lo, hi = 0.0, 1.0
    if de_run(p, hi, max_iter, target).converged:
        return ThresholdResult(1.0, 0.0, max_iter, target, 1)
    evals += 1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        evals += 1
        if de_run(p, mid, max_iter, target).converged:
            lo = mid
        else:
            hi = mid
    return ThresholdResult(0.5 * (lo + hi), hi - lo, max_iter, target, evals)


def iavg(
    p: Protograph,
    epsilon: float,
    target_ber: float = 1e-6,
    max_iter: int = 20000,
) -> float:
    """Average over VNs of the first iteration with P_j <= target_ber.

    Requires epsilon below the BP threshold; a run that stalls or exhausts
    max_iter before every VN crosses target_ber is rejected.
    """
    _check_eps(epsilon)
    g = _compile(p)
    x = np.full(g.n_edges, float(epsilon))
    first_hit = np.zeros(g.n_vn, dtype=np.int64)
    stall = 0
    for it in range(1, max_iter + 1):
        x_prev = x
        x, _, p_vn = _iterate(g, epsilon, x)
        newly = (first_hit == 0) & (p_vn <= target_ber)
        first_hit[newly] = it
        if (first_hit > 0).all():
            return float(first_hit.mean())
        if float(np.abs(x - x_prev).max()) < STALL_DELTA:
            stall += 1
            if stall >= STALL_WINDOW:
                break
        else:
            stall = 0
    raise ValueError(
        f"density evolution did not push every VN below {target_ber} at epsilon={epsilon}; "
        "epsilon is at or above the decoding threshold"
    )


def sweep_point(
    family: str,
    L: int,
    dv: int,
    dc: int,
    omega: int,
    T_removed: int | None = None,
    tol: float = 1e-5,
    max_iter: int = 20000,
    target: float = 1e-12,
) -> dict:
    """Rate and threshold of a single (family, L) grid point."""
    spec = EnsembleSpec(
        family=family,
        dv=dv,
        dc=dc,
        L=L,
        omega=omega,
        T_removed=T_removed if family in ("C1", "S1", "M1") else None,
    )
    p = construct(spec)
    res = bp_threshold(p, tol=tol, max_iter=max_iter, target=target)
    return {
        "family": family,
        "dv": dv,
        "dc": dc,
        "L": L,
        "omega": omega,
        "T": spec.resolved_T,
        "rate": design_rate(p),
        "threshold": res.epsilon_star,
        "evaluations": res.evaluations,
    }


def sweep_rate_threshold(
    families: list[str],
    L_list: list[int],
    dv: int,
    dc: int,
    omega: int,
    T_removed: int | None = None,
    tol: float = 1e-5,
    max_iter: int = 20000,
    target: float = 1e-12,
) -> list[dict]:
    """Rate/threshold table over a (family, L) grid, sorted by grid key."""
    return [
        sweep_point(family, L, dv, dc, omega, T_removed, tol, max_iter, target)
        for family in sorted(set(families))
        for L in sorted(set(L_list))
    ]
