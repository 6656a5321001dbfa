"""Search over connection placements, maximizing the BP threshold.

A placement assigns the spare capacity of open-end check nodes (degree
below dc) to variable nodes, without adding nodes or touching the
terminated boundary. Candidates are enumerated either per spatial
position (all VNs of a position are interchangeable targets) or per
individual VN, and scored by bisection threshold.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .density_evolution import bp_threshold
from .protograph import CN_NON_CLOSURE, Protograph

__all__ = ["ConnectionCandidate", "enumerate_candidates", "optimize"]


@dataclass
class ConnectionCandidate:
    """One placement of spare check-node capacity.

    edges are (cn_index, vn_index, multiplicity) triples ready for
    Protograph.with_added_edges or EnsembleSpec.connection_overrides.
    """

    edges: list[tuple[int, int, int]] = field(default_factory=list)
    threshold: float | None = None
    feasible: bool = True


def _dc_of(base: Protograph) -> int:
    if base.spec is not None:
        return base.spec.dc
    return int(base.cn_degrees.max())


def _spare_cns(base: Protograph, dc: int) -> list[tuple[int, int]]:
    deg = base.cn_degrees
    return [
        (i, dc - int(deg[i]))
        for i, t in enumerate(base.cn_tag)
        if t == CN_NON_CLOSURE and deg[i] < dc
    ]


def _allowed_vns(base: Protograph, cn: int) -> np.ndarray:
    """VN indices a given CN may connect to.

    With a single chain every VN is allowed; across multiple chains the
    placement goes to the other chain only.
    """
    chains = np.unique(base.cn_chain)
    if len(chains) < 2:
        return np.arange(base.n_vn)
    return np.nonzero(base.vn_chain != base.cn_chain[cn])[0]


def _position_edges(base: Protograph, cn: int, positions: tuple[int, ...]) -> list[tuple[int, int, int]]:
    """Turn a position multiset into concrete edges.

    Slots cycle over the VNs of each position in ascending index;
    a repeated position advances to that position's next VN before
    wrapping into multiplicity 2.
    """
    allowed = set(_allowed_vns(base, cn).tolist())
    counts: dict[int, int] = {}
    cursor: dict[int, int] = {}
    for pos in positions:
        vns = [
            v
            for v in range(base.n_vn)
            if base.vn_pos[v] == pos and v in allowed
        ]
        k = cursor.get(pos, 0)
        vn = vns[k % len(vns)]
        cursor[pos] = k + 1
        counts[vn] = counts.get(vn, 0) + 1
    return [(cn, vn, m) for vn, m in sorted(counts.items())]


def enumerate_candidates(
    base: Protograph, granularity: str = "position"
) -> list[ConnectionCandidate]:
    """All placements of open-end spare capacity onto VN targets.

    granularity "position" treats the VNs of one spatial position as a
    single target; "node" distinguishes individual VNs. Returns an empty
    list when no check node has spare capacity.
    """
    if granularity not in ("position", "node"):
        raise ValueError(f"granularity must be 'position' or 'node', got {granularity!r}")
    dc = _dc_of(base)
    spare = _spare_cns(base, dc)
    if not spare:
        return []
    per_cn: list[list[list[tuple[int, int, int]]]] = []
    for cn, slots in spare:
        allowed = _allowed_vns(base, cn)
        options: list[list[tuple[int, int, int]]] = []
        if granularity == "position":
            pos_values = sorted({int(base.vn_pos[v]) for v in allowed})
            for combo in itertools.combinations_with_replacement(pos_values, slots):
                options.append(_position_edges(base, cn, combo))
        else:
            for combo in itertools.combinations_with_replacement(sorted(allowed.tolist()), slots):
                counts: dict[int, int] = {}
                for vn in combo:
                    counts[vn] = counts.get(vn, 0) + 1
                options.append([(cn, vn, m) for vn, m in sorted(counts.items())])
        per_cn.append(options)
    out = []
    for pick in itertools.product(*per_cn):
        edges: list[tuple[int, int, int]] = []
        for part in pick:
            edges.extend(part)
        out.append(ConnectionCandidate(edges=edges))
    return out


def _tie_key(base: Protograph, edges: list[tuple[int, int, int]]) -> tuple:
    """Deterministic preference among threshold ties.

    Prefer VN positions closest to L//3 counted from the terminated end,
    then lower VN indices.
    """
    L = int(base.vn_pos.max())
    anchor = L // 3
    parts = []
    for cn, vn, m in edges:
        pos = int(base.vn_pos[vn])
        parts.extend([(abs(pos - anchor), pos, vn)] * m)
    return tuple(sorted(parts))


def _score(base: Protograph, edges, dc, tol, max_iter):
    trial = base.with_added_edges(edges) if edges else base
    if (trial.cn_degrees > dc).any():
        return None
    return bp_threshold(trial, tol=tol, max_iter=max_iter).epsilon_star


def optimize(
    base: Protograph,
    granularity: str = "position",
    budget: int = 2000,
    tol: float = 1e-5,
    max_iter: int = 20000,
    candidates: list[ConnectionCandidate] | None = None,
) -> ConnectionCandidate:
    """Best placement by exhaustive scan or greedy slot filling.

    Exhaustive when the candidate count fits the budget of threshold
    evaluations; otherwise slots are filled one edge at a time, each
    step keeping the edge with the largest threshold. Ties within tol
    go to the position closest to L//3, then the lowest VN index.
    Returns the empty placement when nothing has spare capacity.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    dc = _dc_of(base)
    if candidates is None:
        candidates = enumerate_candidates(base, granularity)
    if not candidates:
        return ConnectionCandidate(
            edges=[], threshold=bp_threshold(base, tol=tol, max_iter=max_iter).epsilon_star
        )
    if len(candidates) == 1:
        only = candidates[0]
        only.threshold = _score(base, only.edges, dc, tol, max_iter)
        only.feasible = only.threshold is not None
        return only
    if len(candidates) <= budget:
        best: ConnectionCandidate | None = None
        for cand in candidates:
            cand.threshold = _score(base, cand.edges, dc, tol, max_iter)
            if cand.threshold is None:
                cand.feasible = False
                continue
            if best is None:
                best = cand
                continue
            if cand.threshold > best.threshold + tol:
                best = cand
            elif cand.threshold > best.threshold - tol and _tie_key(
                base, cand.edges
            ) < _tie_key(base, best.edges):
                best = cand
        if best is None:
            raise ValueError("no feasible candidate in the search space")
        return best
    return _greedy(base, granularity, dc, tol, max_iter)


def _greedy(base, granularity, dc, tol, max_iter):
    cur = base
    chosen: dict[tuple[int, int], int] = {}
    while True:
        spare = _spare_cns(cur, dc)
        if not spare:
            break
        step: list[tuple[int, int]] = []
        for cn, _slots in spare:
            allowed = _allowed_vns(cur, cn)
            if granularity == "position":
                seen = set()
                for vn in sorted(allowed.tolist()):
                    pos = int(cur.vn_pos[vn])
                    if pos not in seen:
                        seen.add(pos)
                        step.append((cn, vn))
            else:
                step.extend((cn, int(vn)) for vn in allowed)
        best_thr = -1.0
        best_edge = None
        for cn, vn in step:
            thr = _score(cur, [(cn, vn, 1)], dc, tol, max_iter)
            if thr is None:
                continue
            if thr > best_thr + tol:
                best_thr, best_edge = thr, (cn, vn)
            elif thr > best_thr - tol and best_edge is not None and _tie_key(
                cur, [(cn, vn, 1)]
            ) < _tie_key(cur, [(*best_edge, 1)]):
                best_thr, best_edge = thr, (cn, vn)
        if best_edge is None:
            break
        # keep the open-end tag so the remaining slots stay in the search
        cur = cur.with_added_edges([(*best_edge, 1)], tag_receivers=False)
        chosen[best_edge] = chosen.get(best_edge, 0) + 1
    edges = [(cn, vn, m) for (cn, vn), m in sorted(chosen.items())]
    return ConnectionCandidate(
        edges=edges,
        threshold=bp_threshold(cur, tol=tol, max_iter=max_iter).epsilon_star,
    )
