"""Protograph construction for spatially coupled LDPC chain ensembles.

A protograph is a small bipartite multigraph given as a non-negative integer
matrix: rows are check nodes (CNs), columns are variable nodes (VNs), entries
are edge multiplicities.  Chains are built by spreading the edges of a
(dv, dc)-regular block protograph over L spatial positions with coupling
width omega, then closing the boundary in one of several ways:

* ``C0``  full termination at both ends (extra low-degree boundary CNs)
* ``T``   tail-biting wrap-around, no boundary and no rate loss
* ``C1``  C0 with T_removed boundary CNs deleted at the high end, which
          leaves one open ("non-closure") end
* ``C2``  C0 with omega boundary CNs deleted, split between both ends,
          which removes the rate loss entirely
* ``S1``  C1 plus self-connection edges that fill the open-end CNs back
          up to degree dc
* ``S2``  C2 plus self-connection edges at both open ends
* ``M1``  two C1 chains cross-connected at their open ends

Spatial positions are 1-based.  VNs occupy positions 1..L and CNs occupy
positions 1..L+omega (before any removal).  Node indices are ordered by
(sub-chain, position, intra-position index), so position-major slices are
contiguous.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "FAMILIES",
    "CN_BULK",
    "CN_FULL_TERMINATION",
    "CN_NON_CLOSURE",
    "CN_CONNECTION_TARGET",
    "EnsembleSpec",
    "Protograph",
    "DegreeProfile",
    "build_block_protograph",
    "uniform_spreading",
    "balanced_spreading",
    "edge_spread",
    "construct",
    "degree_profile",
    "design_rate",
    "edge_list",
    "to_json",
    "from_json",
]

FAMILIES = ("C0", "C1", "C2", "T", "S1", "S2", "M1")

# per-CN role tags
CN_BULK = "bulk"
CN_FULL_TERMINATION = "full_termination"
CN_NON_CLOSURE = "non_closure"
CN_CONNECTION_TARGET = "added_by_connection_target"

_FAMILIES_WITH_REMOVAL = ("C1", "S1", "M1")
_FAMILIES_WITH_PLACEMENT = ("S1", "S2", "M1")


class ConstructionError(ValueError):
    """A requested ensemble cannot be built as specified."""


@dataclass
class EnsembleSpec:
    """Parameters that pin down one chain ensemble.

    ``T_removed`` (number of boundary CNs deleted for C1/S1/M1) defaults to
    ``omega - 1``.  ``spreading`` optionally supplies the edge-spreading
    matrices B_0..B_omega explicitly; by default the block matrix is split
    uniformly, which requires omega+1 to divide every entry.
    ``connection_overrides`` replaces the built-in S1/S2/M1 placement with
    an explicit list of ``(cn_index, vn_index, added_multiplicity)`` edges.
    """

    family: str
    dv: int
    dc: int
    L: int
    omega: int
    T_removed: int | None = None
    spreading: list[np.ndarray] | None = None
    connection_overrides: list[tuple[int, int, int]] | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ConstructionError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        if not (2 <= self.dv < self.dc):
            raise ConstructionError(f"need 2 <= dv < dc, got dv={self.dv} dc={self.dc}")
        if self.L < 2:
            raise ConstructionError(f"need L >= 2, got L={self.L}")
        if self.omega < 1:
            raise ConstructionError(f"need omega >= 1, got omega={self.omega}")
        if self.family in _FAMILIES_WITH_REMOVAL:
            if self.omega < 2:
                raise ConstructionError(
                    f"{self.family} removes T in [1, omega-1] boundary CNs, impossible for omega={self.omega}"
                )
            t = self.resolved_T
            if not (1 <= t <= self.omega - 1):
                raise ConstructionError(f"T_removed={t} outside [1, {self.omega - 1}]")
        elif self.T_removed is not None:
            raise ConstructionError(f"T_removed only applies to C1/S1/M1, not {self.family}")
        if self.connection_overrides is not None and self.family not in _FAMILIES_WITH_PLACEMENT:
            raise ConstructionError(
                f"connection_overrides only apply to S1/S2/M1, not {self.family}"
            )
        if self.spreading is not None:
            self.spreading = [np.asarray(b, dtype=np.int64) for b in self.spreading]

    @property
    def resolved_T(self) -> int | None:
        if self.family not in _FAMILIES_WITH_REMOVAL:
            return None
        return self.omega - 1 if self.T_removed is None else self.T_removed

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "dv": self.dv,
            "dc": self.dc,
            "L": self.L,
            "omega": self.omega,
            "T_removed": self.T_removed,
            "spreading": None
            if self.spreading is None
            else [b.tolist() for b in self.spreading],
            "connection_overrides": None
            if self.connection_overrides is None
            else [list(e) for e in self.connection_overrides],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        overrides = d.get("connection_overrides")
        return cls(
            family=d["family"],
            dv=int(d["dv"]),
            dc=int(d["dc"]),
            L=int(d["L"]),
            omega=int(d["omega"]),
            T_removed=None if d.get("T_removed") is None else int(d["T_removed"]),
            spreading=None
            if d.get("spreading") is None
            else [np.asarray(b, dtype=np.int64) for b in d["spreading"]],
            connection_overrides=None
            if overrides is None
            else [(int(c), int(v), int(m)) for c, v, m in overrides],
        )


@dataclass(eq=False)
class Protograph:
    """A positioned protograph: multiplicity matrix plus node metadata.

    ``mult[i, j]`` is the number of parallel edges between CN i and VN j.
    ``cn_pos``/``vn_pos`` hold 1-based spatial positions, ``cn_chain`` /
    ``vn_chain`` the sub-chain id (all zero except for multi-chain
    ensembles).  ``cn_tag`` records each CN's boundary role.
    """

    mult: np.ndarray
    cn_pos: np.ndarray
    vn_pos: np.ndarray
    cn_chain: np.ndarray
    vn_chain: np.ndarray
    cn_tag: list[str]
    spec: EnsembleSpec | None = field(default=None)

    def __post_init__(self) -> None:
        self.mult = np.asarray(self.mult, dtype=np.int64)
        if self.mult.ndim != 2:
            raise ValueError("mult must be a 2-D matrix")
        if (self.mult < 0).any():
            raise ValueError("edge multiplicities must be non-negative")
        self.cn_pos = np.asarray(self.cn_pos, dtype=np.int64)
        self.vn_pos = np.asarray(self.vn_pos, dtype=np.int64)
        self.cn_chain = np.asarray(self.cn_chain, dtype=np.int64)
        self.vn_chain = np.asarray(self.vn_chain, dtype=np.int64)
        n_cn, n_vn = self.mult.shape
        if self.cn_pos.shape != (n_cn,) or self.cn_chain.shape != (n_cn,):
            raise ValueError("cn_pos/cn_chain length must match the CN count")
        if self.vn_pos.shape != (n_vn,) or self.vn_chain.shape != (n_vn,):
            raise ValueError("vn_pos/vn_chain length must match the VN count")
        if len(self.cn_tag) != n_cn:
            raise ValueError("cn_tag length must match the CN count")

    @property
    def n_cn(self) -> int:
        return self.mult.shape[0]

    @property
    def n_vn(self) -> int:
        return self.mult.shape[1]

    @property
    def n_edges(self) -> int:
        return int(self.mult.sum())

    @property
    def cn_degrees(self) -> np.ndarray:
        return self.mult.sum(axis=1)

    @property
    def vn_degrees(self) -> np.ndarray:
        return self.mult.sum(axis=0)

    def with_added_edges(
        self, edges: list[tuple[int, int, int]], tag_receivers: bool = True
    ) -> "Protograph":
        """Return a copy with extra (cn, vn, multiplicity) edges.

        CNs that receive edges are retagged as connection targets.
        """
        mult = self.mult.copy()
        tags = list(self.cn_tag)
        for cn, vn, m in edges:
            if not (0 <= cn < self.n_cn and 0 <= vn < self.n_vn):
                raise ConstructionError(f"edge ({cn}, {vn}) out of range")
            if m < 1:
                raise ConstructionError(f"added multiplicity must be >= 1, got {m}")
            mult[cn, vn] += m
            if tag_receivers:
                tags[cn] = CN_CONNECTION_TARGET
        return Protograph(
            mult=mult,
            cn_pos=self.cn_pos.copy(),
            vn_pos=self.vn_pos.copy(),
            cn_chain=self.cn_chain.copy(),
            vn_chain=self.vn_chain.copy(),
            cn_tag=tags,
            spec=self.spec,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Protograph):
            return NotImplemented
        return (
            np.array_equal(self.mult, other.mult)
            and np.array_equal(self.cn_pos, other.cn_pos)
            and np.array_equal(self.vn_pos, other.vn_pos)
            and np.array_equal(self.cn_chain, other.cn_chain)
            and np.array_equal(self.vn_chain, other.vn_chain)
            and self.cn_tag == other.cn_tag
            and _spec_dict(self.spec) == _spec_dict(other.spec)
        )


def _spec_dict(spec: EnsembleSpec | None) -> dict | None:
    return None if spec is None else spec.to_dict()


@dataclass
class DegreeProfile:
    """Per-node (spatial position, degree) pairs in node-index order."""

    cn_degrees: list[tuple[int, int]]
    vn_degrees: list[tuple[int, int]]

    @property
    def total_edges(self) -> int:
        return sum(d for _, d in self.cn_degrees)


def build_block_protograph(dv: int, dc: int) -> Protograph:
    """Smallest (dv, dc)-regular block protograph.

    With g = gcd(dv, dc) this is the (dv/g) x (dc/g) all-g matrix: every
    column sums to dv and every row to dc.
    """
    if not (2 <= dv < dc):
        raise ConstructionError(f"need 2 <= dv < dc, got dv={dv} dc={dc}")
    g = math.gcd(dv, dc)
    b_c, b_v = dv // g, dc // g
    mult = np.full((b_c, b_v), g, dtype=np.int64)
    return Protograph(
        mult=mult,
        cn_pos=np.ones(b_c, dtype=np.int64),
        vn_pos=np.ones(b_v, dtype=np.int64),
        cn_chain=np.zeros(b_c, dtype=np.int64),
        vn_chain=np.zeros(b_v, dtype=np.int64),
        cn_tag=[CN_BULK] * b_c,
    )


def uniform_spreading(block_mult: np.ndarray, omega: int) -> list[np.ndarray]:
    """Split the block matrix into omega+1 equal parts B_0..B_omega.

    Requires omega+1 to divide every entry; supply explicit matrices (for
    example from :func:`balanced_spreading`) when it does not.
    """
    block_mult = np.asarray(block_mult, dtype=np.int64)
    if (block_mult % (omega + 1)).any():
        raise ConstructionError(
            f"uniform spreading needs {omega + 1} to divide every block entry; "
            "supply explicit spreading matrices"
        )
    part = block_mult // (omega + 1)
    return [part.copy() for _ in range(omega + 1)]


def balanced_spreading(block_mult: np.ndarray, omega: int) -> list[np.ndarray]:
    """Deterministic near-uniform split: entry m becomes floor/ceil parts.

    B_0..B_(r-1) get the ceiling share where r = m mod (omega+1).  Useful
    when the uniform split is not integral.
    """
    block_mult = np.asarray(block_mult, dtype=np.int64)
    q, r = np.divmod(block_mult, omega + 1)
    return [q + (i < r).astype(np.int64) for i in range(omega + 1)]


def _check_spreading(block: Protograph, spreading: list[np.ndarray], omega: int) -> list[np.ndarray]:
    if len(spreading) != omega + 1:
        raise ConstructionError(
            f"expected {omega + 1} spreading matrices, got {len(spreading)}"
        )
    mats = [np.asarray(b, dtype=np.int64) for b in spreading]
    for i, b in enumerate(mats):
        if b.shape != block.mult.shape:
            raise ConstructionError(f"spreading matrix {i} has shape {b.shape}, expected {block.mult.shape}")
        if (b < 0).any():
            raise ConstructionError(f"spreading matrix {i} has negative entries")
    if not np.array_equal(sum(mats), block.mult):
        raise ConstructionError("spreading matrices must sum to the block matrix")
    return mats


def edge_spread(
    block: Protograph,
    L: int,
    omega: int,
    spreading: list[np.ndarray] | None = None,
) -> Protograph:
    """Spread a block protograph into a fully terminated chain (C0 shape).

    VNs at position l in 1..L connect through B_i to CNs at position l+i,
    so the chain carries L*b_v VNs and (L+omega)*b_c CNs.  omega = 0 is
    allowed and yields L disjoint block copies.
    """
    if L < 1:
        raise ConstructionError(f"need L >= 1, got L={L}")
    if omega < 0:
        raise ConstructionError(f"need omega >= 0, got omega={omega}")
    if spreading is None:
        spreading = uniform_spreading(block.mult, omega)
    else:
        spreading = _check_spreading(block, spreading, omega)
    b_c, b_v = block.mult.shape
    n_cn = (L + omega) * b_c
    n_vn = L * b_v
    mult = np.zeros((n_cn, n_vn), dtype=np.int64)
    for l in range(1, L + 1):
        for i, b_i in enumerate(spreading):
            p = l + i
            rows = slice((p - 1) * b_c, p * b_c)
            cols = slice((l - 1) * b_v, l * b_v)
            mult[rows, cols] += b_i
    cn_pos = np.repeat(np.arange(1, L + omega + 1), b_c)
    vn_pos = np.repeat(np.arange(1, L + 1), b_v)
    full_deg = np.tile(block.mult.sum(axis=1), L + omega)
    deg = mult.sum(axis=1)
    tags = [
        CN_FULL_TERMINATION if deg[i] < full_deg[i] else CN_BULK for i in range(n_cn)
    ]
    return Protograph(
        mult=mult,
        cn_pos=cn_pos,
        vn_pos=vn_pos,
        cn_chain=np.zeros(n_cn, dtype=np.int64),
        vn_chain=np.zeros(n_vn, dtype=np.int64),
        cn_tag=tags,
    )


def _tail_biting(block: Protograph, L: int, omega: int, spreading: list[np.ndarray]) -> Protograph:
    b_c, b_v = block.mult.shape
    n_cn = L * b_c
    n_vn = L * b_v
    mult = np.zeros((n_cn, n_vn), dtype=np.int64)
    for l in range(1, L + 1):
        for i, b_i in enumerate(spreading):
            p = (l + i - 1) % L + 1
            rows = slice((p - 1) * b_c, p * b_c)
            cols = slice((l - 1) * b_v, l * b_v)
            mult[rows, cols] += b_i
    return Protograph(
        mult=mult,
        cn_pos=np.repeat(np.arange(1, L + 1), b_c),
        vn_pos=np.repeat(np.arange(1, L + 1), b_v),
        cn_chain=np.zeros(n_cn, dtype=np.int64),
        vn_chain=np.zeros(n_vn, dtype=np.int64),
        cn_tag=[CN_BULK] * n_cn,
    )


def _remove_cn_positions(p: Protograph, positions: set[int]) -> Protograph:
    keep = np.array([pos not in positions for pos in p.cn_pos])
    return Protograph(
        mult=p.mult[keep],
        cn_pos=p.cn_pos[keep],
        vn_pos=p.vn_pos.copy(),
        cn_chain=p.cn_chain[keep],
        vn_chain=p.vn_chain.copy(),
        cn_tag=[t for t, k in zip(p.cn_tag, keep) if k],
        spec=p.spec,
    )


def _retag(p: Protograph, dc: int, open_low: bool, open_high: bool) -> None:
    # boundary CNs below full degree get their role from which end was opened
    L = int(p.vn_pos.max())
    deg = p.cn_degrees
    for i in range(p.n_cn):
        if deg[i] >= dc:
            p.cn_tag[i] = CN_BULK
            continue
        if p.cn_pos[i] > L and open_high:
            p.cn_tag[i] = CN_NON_CLOSURE
        elif p.cn_pos[i] <= L and open_low:
            p.cn_tag[i] = CN_NON_CLOSURE
        else:
            p.cn_tag[i] = CN_FULL_TERMINATION


def _build_c1(spec: EnsembleSpec, block: Protograph, spreading: list[np.ndarray]) -> Protograph:
    c0 = edge_spread(block, spec.L, spec.omega, spreading)
    t = spec.resolved_T
    removed = set(range(spec.L + spec.omega - t + 1, spec.L + spec.omega + 1))
    p = _remove_cn_positions(c0, removed)
    _retag(p, spec.dc, open_low=False, open_high=True)
    return p


def _build_c2(spec: EnsembleSpec, block: Protograph, spreading: list[np.ndarray]) -> Protograph:
    c0 = edge_spread(block, spec.L, spec.omega, spreading)
    removed = {1} | set(range(spec.L + 2, spec.L + spec.omega + 1))
    p = _remove_cn_positions(c0, removed)
    _retag(p, spec.dc, open_low=True, open_high=True)
    return p


def _vns_at(p: Protograph, pos: int, chain: int) -> np.ndarray:
    return np.nonzero((p.vn_pos == pos) & (p.vn_chain == chain))[0]


def _slot_walk(p: Protograph, positions: list[int], chain: int):
    """Yield VN indices: each position's VNs in ascending index, cycling
    through the position list again for every extra multiplicity round."""
    per_round = []
    for pos in positions:
        per_round.extend(int(v) for v in _vns_at(p, pos, chain))
    if not per_round:
        return
    while True:
        yield from per_round


def _fill_spare(
    p: Protograph,
    cn_indices: list[int],
    positions: list[int],
    chain: int,
    dc: int,
) -> list[tuple[int, int, int]]:
    """Fill each listed CN up to degree dc from a shared slot walk.

    Slots rotate round-robin over the VNs at the listed positions (ascending
    VN index inside a position); a (CN, VN) pair only gains a second edge
    after the walk wraps a full round.
    """
    deg = p.cn_degrees
    total_spare = int(sum(dc - deg[c] for c in cn_indices))
    if total_spare == 0:
        return []
    walk = _slot_walk(p, positions, chain)
    first = next(walk, None)
    if first is None:
        raise ConstructionError(
            f"no VNs available at positions {positions} for self-connection; "
            f"{total_spare} spare edge slots cannot be placed"
        )
    added: dict[tuple[int, int], int] = {}
    slots = iter([first] + [next(walk) for _ in range(total_spare - 1)])
    for cn in cn_indices:
        for _ in range(dc - int(deg[cn])):
            vn = next(slots)
            added[(cn, vn)] = added.get((cn, vn), 0) + 1
    return [(cn, vn, m) for (cn, vn), m in sorted(added.items())]


def _build_s1(spec: EnsembleSpec, block: Protograph, spreading: list[np.ndarray]) -> Protograph:
    base = _build_c1(spec, block, spreading)
    if spec.connection_overrides is not None:
        return _apply_overrides(base, spec)
    p0 = max(1, spec.L // 3)
    nc = [i for i, t in enumerate(base.cn_tag) if t == CN_NON_CLOSURE]
    edges = _fill_spare(base, nc, list(range(p0, spec.L + 1)), 0, spec.dc)
    out = base.with_added_edges(edges)
    out.spec = spec
    return out


def _build_s2(spec: EnsembleSpec, block: Protograph, spreading: list[np.ndarray]) -> Protograph:
    base = _build_c2(spec, block, spreading)
    if spec.connection_overrides is not None:
        return _apply_overrides(base, spec)
    p0 = spec.L // 2
    nc = [i for i, t in enumerate(base.cn_tag) if t == CN_NON_CLOSURE]
    low = [i for i in nc if base.cn_pos[i] <= spec.L]
    high = [i for i in nc if base.cn_pos[i] > spec.L]
    positions = list(range(p0, spec.L + 1))
    edges = _fill_spare(base, low, positions, 0, spec.dc)
    edges += _fill_spare(base, high, positions, 0, spec.dc)
    out = base.with_added_edges(edges)
    out.spec = spec
    return out


def _build_m1(spec: EnsembleSpec, block: Protograph, spreading: list[np.ndarray]) -> Protograph:
    single = EnsembleSpec(
        family="C1",
        dv=spec.dv,
        dc=spec.dc,
        L=spec.L,
        omega=spec.omega,
        T_removed=spec.T_removed,
        spreading=spec.spreading,
    )
    a = _build_c1(single, block, spreading)
    pair = Protograph(
        mult=np.block(
            [
                [a.mult, np.zeros_like(a.mult)],
                [np.zeros_like(a.mult), a.mult],
            ]
        ),
        cn_pos=np.concatenate([a.cn_pos, a.cn_pos]),
        vn_pos=np.concatenate([a.vn_pos, a.vn_pos]),
        cn_chain=np.concatenate([np.zeros(a.n_cn, np.int64), np.ones(a.n_cn, np.int64)]),
        vn_chain=np.concatenate([np.zeros(a.n_vn, np.int64), np.ones(a.n_vn, np.int64)]),
        cn_tag=list(a.cn_tag) * 2,
    )
    if spec.connection_overrides is not None:
        return _apply_overrides(pair, spec)
    d0 = max(1, spec.L // 3)
    # Two cross-connections per chain, both into the other chain. The
    # open-end CNs fill to full degree at mid-chain VNs, planting a reliable
    # seed far from either boundary. The first boundary CN takes one extra
    # edge at position L//3, anchoring the other chain's early positions;
    # once that seed would sit more than five positions out it stops paying
    # for the boundary degree it costs, so it retreats to the protected
    # region at position 2.
    p_seed = d0 if d0 <= 5 else 2
    p_mid = (spec.L + 2) // 2
    edges: list[tuple[int, int, int]] = []
    for chain in (0, 1):
        other = 1 - chain
        nc = [
            i
            for i, t in enumerate(pair.cn_tag)
            if t == CN_NON_CLOSURE and pair.cn_chain[i] == chain
        ]
        mid_positions = list(range(p_mid, spec.L + 1)) + list(range(1, p_mid))
        edges += _fill_spare(pair, nc, mid_positions, other, spec.dc)
        seed_positions = list(range(p_seed, spec.L + 1)) + list(range(1, p_seed))
        walk = _slot_walk(pair, seed_positions, other)
        boundary = [
            i
            for i in range(pair.n_cn)
            if pair.cn_pos[i] == 1 and pair.cn_chain[i] == chain
        ]
        for cn in boundary:
            if pair.cn_degrees[cn] < spec.dc:
                edges.append((cn, next(walk), 1))
    out = pair.with_added_edges(edges)
    out.spec = spec
    return out


def _apply_overrides(base: Protograph, spec: EnsembleSpec) -> Protograph:
    edges = spec.connection_overrides or []
    out = base.with_added_edges([(int(c), int(v), int(m)) for c, v, m in edges])
    over = out.cn_degrees > spec.dc
    if over.any():
        bad = int(np.nonzero(over)[0][0])
        raise ConstructionError(
            f"connection_overrides push CN {bad} to degree {int(out.cn_degrees[bad])} > dc={spec.dc}"
        )
    out.spec = spec
    return out


def construct(spec: EnsembleSpec) -> Protograph:
    """Build the protograph for one ensemble family.

    Self-connected families fill every open-end CN to degree exactly dc;
    the default placement can be replaced via ``spec.connection_overrides``.
    """
    block = build_block_protograph(spec.dv, spec.dc)
    if spec.spreading is not None:
        spreading = _check_spreading(block, spec.spreading, spec.omega)
    else:
        spreading = uniform_spreading(block.mult, spec.omega)
    if spec.family == "C0":
        p = edge_spread(block, spec.L, spec.omega, spreading)
    elif spec.family == "T":
        p = _tail_biting(block, spec.L, spec.omega, spreading)
    elif spec.family == "C1":
        p = _build_c1(spec, block, spreading)
    elif spec.family == "C2":
        p = _build_c2(spec, block, spreading)
    elif spec.family == "S1":
        return _finish(_build_s1(spec, block, spreading), spec)
    elif spec.family == "S2":
        return _finish(_build_s2(spec, block, spreading), spec)
    else:
        return _finish(_build_m1(spec, block, spreading), spec)
    return _finish(p, spec)


def _finish(p: Protograph, spec: EnsembleSpec) -> Protograph:
    p.spec = spec
    return p


def degree_profile(p: Protograph) -> DegreeProfile:
    """Per-node degrees paired with spatial positions, in index order."""
    cn = [(int(pos), int(d)) for pos, d in zip(p.cn_pos, p.cn_degrees)]
    vn = [(int(pos), int(d)) for pos, d in zip(p.vn_pos, p.vn_degrees)]
    return DegreeProfile(cn_degrees=cn, vn_degrees=vn)


def design_rate(p: Protograph) -> Fraction:
    """Exact design rate 1 - n_cn/n_vn as a rational number.

    May be zero or negative when a short chain carries more checks than
    variables; the value is the formula, not a usefulness claim.
    """
    if p.n_vn == 0:
        raise ValueError("protograph has no variable nodes")
    return 1 - Fraction(p.n_cn, p.n_vn)


def edge_list(p: Protograph) -> tuple[np.ndarray, np.ndarray]:
    """Canonical edge-instance arrays (CN-major order).

    Returns (edge_cn, edge_vn); an entry of multiplicity m expands to m
    consecutive instances.
    """
    rows, cols = np.nonzero(p.mult)
    counts = p.mult[rows, cols]
    return np.repeat(rows, counts), np.repeat(cols, counts)


def to_json(p: Protograph) -> str:
    """Serialize to the interchange JSON schema (lossless round-trip)."""
    rows, cols = np.nonzero(p.mult)
    doc = {
        "n_cn": p.n_cn,
        "n_vn": p.n_vn,
        "entries": [[int(r), int(c), int(p.mult[r, c])] for r, c in zip(rows, cols)],
        "cn_pos": p.cn_pos.tolist(),
        "vn_pos": p.vn_pos.tolist(),
        "cn_chain": p.cn_chain.tolist(),
        "vn_chain": p.vn_chain.tolist(),
        "cn_tag": list(p.cn_tag),
        "spec": _spec_dict(p.spec),
    }
    return json.dumps(doc, sort_keys=True)


def from_json(text: str) -> Protograph:
    doc = json.loads(text)
    mult = np.zeros((doc["n_cn"], doc["n_vn"]), dtype=np.int64)
    for r, c, m in doc["entries"]:
        mult[r, c] = m
    spec = None if doc.get("spec") is None else EnsembleSpec.from_dict(doc["spec"])
    return Protograph(
        mult=mult,
        cn_pos=np.asarray(doc["cn_pos"], dtype=np.int64),
        vn_pos=np.asarray(doc["vn_pos"], dtype=np.int64),
        cn_chain=np.asarray(doc["cn_chain"], dtype=np.int64),
        vn_chain=np.asarray(doc["vn_chain"], dtype=np.int64),
        cn_tag=list(doc["cn_tag"]),
        spec=spec,
    )
