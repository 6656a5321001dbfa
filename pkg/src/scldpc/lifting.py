"""Quasi-cyclic lifting of protographs and alist import/export.

Every protograph edge instance becomes an M x M circulant permutation;
parallel edges of one cell get distinct shifts, so lifted row and
column weights equal the protograph degrees. Shifts are drawn by a
seeded greedy rule that avoids creating length-4 cycles among the
circulants already placed, falling back to a plain random distinct
shift when the forbidden set covers all of [0, M).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import gf2
from .protograph import Protograph, edge_list

__all__ = [
    "LiftedCode",
    "LiftingError",
    "RankDeficiencyError",
    "lift",
    "from_parity_matrix",
    "export_alist",
    "import_alist",
    "shift_manifest",
]

log = logging.getLogger(__name__)


class LiftingError(ValueError):
    pass


class RankDeficiencyError(LiftingError):
    pass


@dataclass
class LiftedCode:
    """A finite parity-check matrix lifted from a protograph.

    shifts aligns with edge_cn/edge_vn: one circulant shift per
    protograph edge instance. rank is None when certification was
    skipped; k is reported against the certified rank.
    """

    H: sp.csr_matrix
    M: int
    edge_cn: np.ndarray
    edge_vn: np.ndarray
    shifts: np.ndarray
    rank: int | None
    girth4_free: bool
    seed: int
    attempts: int = 1
    protograph: Protograph | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.H.shape[1]

    @property
    def m_rows(self) -> int:
        return self.H.shape[0]

    @property
    def k(self) -> int:
        r = self.rank if self.rank is not None else self.m_rows
        return self.n - r


def _expand_instances(p: Protograph) -> tuple[np.ndarray, np.ndarray]:
    return edge_list(p)


def _forbidden_shifts(
    cells: dict[tuple[int, int], list[int]], i: int, j: int, M: int
) -> set[int]:
    """Shift values at cell (i, j) that would close a 4-cycle.

    Collisions arise within the cell (2(s-a) = 0), against shift pairs
    sharing the row or the column, and around any rectangle of three
    occupied cells.
    """
    bad: set[int] = set()
    own = cells.get((i, j), [])
    for a in own:
        bad.add(a % M)
        if M % 2 == 0:
            bad.add((a + M // 2) % M)
    row_mates = [(jj, s) for (ii, jj), s in cells.items() if ii == i and jj != j]
    col_mates = [(ii, s) for (ii, jj), s in cells.items() if jj == j and ii != i]
    for a in own:
        for _, vs in row_mates:
            for v1 in vs:
                for v2 in vs:
                    if v1 != v2:
                        bad.add((a + v1 - v2) % M)
        for _, ts in col_mates:
            for t1 in ts:
                for t2 in ts:
                    if t1 != t2:
                        bad.add((a + t1 - t2) % M)
    for jp, vs in row_mates:
        for ip, ts in col_mates:
            us = cells.get((ip, jp))
            if not us:
                continue
            for v in vs:
                for u in us:
                    for t in ts:
                        bad.add((v - u + t) % M)
    return bad


def _draw_shifts(
    p: Protograph, M: int, rng: np.random.Generator
) -> tuple[np.ndarray, bool]:
    edge_cn, edge_vn = _expand_instances(p)
    cells: dict[tuple[int, int], list[int]] = {}
    shifts = np.empty(len(edge_cn), dtype=np.int64)
    clean = True
    for e, (i, j) in enumerate(zip(edge_cn, edge_vn)):
        key = (int(i), int(j))
        bad = _forbidden_shifts(cells, key[0], key[1], M)
        order = rng.permutation(M)
        pick = -1
        for s in order:
            if int(s) not in bad:
                pick = int(s)
                break
        if pick < 0:
            clean = False
            taken = set(cells.get(key, []))
            for s in order:
                if int(s) not in taken:
                    pick = int(s)
                    break
            if pick < 0:
                raise LiftingError(
                    f"cell ({key[0]}, {key[1]}) needs more distinct shifts than M={M}"
                )
        cells.setdefault(key, []).append(pick)
        shifts[e] = pick
    return shifts, clean


def _assemble(edge_cn, edge_vn, shifts, M, n_cn, n_vn) -> sp.csr_matrix:
    r = np.arange(M)
    rows = (edge_cn[:, None] * M + r[None, :]).ravel()
    cols = (edge_vn[:, None] * M + (r[None, :] + shifts[:, None]) % M).ravel()
    data = np.ones(rows.size, dtype=np.uint8)
    H = sp.coo_matrix((data, (rows, cols)), shape=(n_cn * M, n_vn * M))
    return H.tocsr()


def lift(
    p: Protograph,
    M: int,
    seed: int = 0,
    certify: bool = True,
    max_retries: int = 10,
    allow_deficient: bool = False,
) -> LiftedCode:
    """Lift a protograph by factor M with seeded shift selection.

    certify=True computes the GF(2) rank and retries with derived seeds
    until the matrix is full rank, raising RankDeficiencyError when
    max_retries consecutive draws stay deficient. certify=False skips
    rank computation entirely (rank=None), intended for blocklengths
    where dense elimination is not worth the wait.

    Some protographs cannot lift to full rank at all: when every VN
    position is covered exactly once by the CN rows of each index class
    modulo omega+1 (uniform spreading with both ends terminated), those
    class sums coincide over GF(2) in any permutation lifting, costing
    rank regardless of shifts. allow_deficient=True accepts the best
    draw with its certified rank instead of raising; the realized rate
    k/n then exceeds the design rate accordingly.
    """
    if M < 1:
        raise LiftingError(f"lifting factor must be >= 1, got {M}")
    max_mult = int(p.mult.max())
    if M < max_mult:
        raise LiftingError(
            f"M={M} cannot give distinct shifts to a multiplicity-{max_mult} edge"
        )
    best: LiftedCode | None = None
    for attempt in range(max_retries):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(attempt,))
        )
        shifts, clean = _draw_shifts(p, M, rng)
        edge_cn, edge_vn = _expand_instances(p)
        H = _assemble(edge_cn, edge_vn, shifts, M, p.n_cn, p.n_vn)
        code = LiftedCode(
            H=H,
            M=M,
            edge_cn=edge_cn,
            edge_vn=edge_vn,
            shifts=shifts,
            rank=None,
            girth4_free=clean,
            seed=seed,
            attempts=attempt + 1,
            protograph=p,
        )
        if not certify:
            return code
        code.rank = gf2.rank(H.toarray())
        if code.rank == code.m_rows:
            return code
        if best is None or code.rank > best.rank:
            best = code
        log.warning(
            "lift attempt %d of %s: rank %d < %d, retrying with derived seed",
            attempt + 1,
            f"M={M} seed={seed}",
            code.rank,
            code.m_rows,
        )
    if allow_deficient:
        log.warning(
            "accepting rank-deficient lift: rank %d of %d (k/n exceeds design rate)",
            best.rank,
            best.m_rows,
        )
        return best
    raise RankDeficiencyError(
        f"no full-rank lift of this protograph at M={M} within "
        f"{max_retries} seeded attempts (last rank {code.rank}/{code.m_rows})"
    )


def from_parity_matrix(H: sp.spmatrix | np.ndarray, certify: bool = True) -> LiftedCode:
    """Wrap an explicit parity-check matrix (e.g. loaded from alist).

    No circulant structure is assumed; M=1 and per-nonzero shifts 0.
    """
    H = sp.csr_matrix(H, dtype=np.uint8)
    H.eliminate_zeros()
    coo = H.tocoo()
    order = np.lexsort((coo.col, coo.row))
    code = LiftedCode(
        H=H,
        M=1,
        edge_cn=coo.row[order].astype(np.int64),
        edge_vn=coo.col[order].astype(np.int64),
        shifts=np.zeros(coo.nnz, dtype=np.int64),
        rank=None,
        girth4_free=False,
        seed=0,
    )
    if certify:
        code.rank = gf2.rank(H.toarray())
    return code


def shift_manifest(code: LiftedCode) -> dict:
    """JSON-ready record of every circulant placement."""
    return {
        "M": code.M,
        "seed": code.seed,
        "attempts": code.attempts,
        "girth4_free": code.girth4_free,
        "shifts": [
            [int(c), int(v), int(s)]
            for c, v, s in zip(code.edge_cn, code.edge_vn, code.shifts)
        ],
    }


def export_alist(code: LiftedCode, path: str) -> None:
    """Write the parity-check matrix in alist text format.

    Layout: "n m", "max_col_w max_row_w", column weights, row weights,
    then per-column 1-based row indices padded with 0 to the maximum
    column weight, then per-row column indices padded likewise.
    """
    H = code.H.tocsc()
    n = H.shape[1]
    m = H.shape[0]
    if n == 0 or m == 0:
        raise LiftingError("refusing to export an empty matrix")
    col_lists = [H.indices[H.indptr[j] : H.indptr[j + 1]] + 1 for j in range(n)]
    Hr = code.H.tocsr()
    row_lists = [Hr.indices[Hr.indptr[i] : Hr.indptr[i + 1]] + 1 for i in range(m)]
    max_cw = max(len(c) for c in col_lists)
    max_rw = max(len(r) for r in row_lists)
    lines = [f"{n} {m}", f"{max_cw} {max_rw}"]
    lines.append(" ".join(str(len(c)) for c in col_lists))
    lines.append(" ".join(str(len(r)) for r in row_lists))
    for c in col_lists:
        padded = list(map(str, sorted(c))) + ["0"] * (max_cw - len(c))
        lines.append(" ".join(padded))
    for r in row_lists:
        padded = list(map(str, sorted(r))) + ["0"] * (max_rw - len(r))
        lines.append(" ".join(padded))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def _parse_ints(line: str, lineno: int, expect: int | None = None) -> list[int]:
    try:
        vals = [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise LiftingError(f"alist line {lineno}: {exc}") from None
    if expect is not None and len(vals) != expect:
        raise LiftingError(
            f"alist line {lineno}: expected {expect} integers, got {len(vals)}"
        )
    return vals


def import_alist(path: str) -> LiftedCode:
    """Read an alist file back into a LiftedCode (M=1, no shift data)."""
    with open(path) as f:
        raw = [ln.rstrip("\n") for ln in f]
    lines = [(i + 1, ln) for i, ln in enumerate(raw) if ln.strip()]
    if len(lines) < 4:
        raise LiftingError(f"alist line {len(raw)}: truncated header")
    ln, header = lines[0]
    n, m = _parse_ints(header, ln, 2)
    if n < 1 or m < 1:
        raise LiftingError(f"alist line {ln}: matrix dimensions must be positive")
    ln, wline = lines[1]
    max_cw, max_rw = _parse_ints(wline, ln, 2)
    ln, cws = lines[2]
    col_w = _parse_ints(cws, ln, n)
    ln, rws = lines[3]
    row_w = _parse_ints(rws, ln, m)
    if len(lines) != 4 + n + m:
        raise LiftingError(
            f"alist line {lines[-1][0]}: expected {4 + n + m} data lines, got {len(lines)}"
        )
    rows: list[int] = []
    cols: list[int] = []
    for j in range(n):
        ln, body = lines[4 + j]
        vals = _parse_ints(body, ln, max_cw)
        live = [v for v in vals if v != 0]
        if len(live) != col_w[j]:
            raise LiftingError(
                f"alist line {ln}: column {j + 1} lists {len(live)} entries, "
                f"declared weight {col_w[j]}"
            )
        for v in live:
            if not 1 <= v <= m:
                raise LiftingError(f"alist line {ln}: row index {v} out of range 1..{m}")
            rows.append(v - 1)
            cols.append(j)
    declared = set(zip(rows, cols))
    for i in range(m):
        ln, body = lines[4 + n + i]
        vals = _parse_ints(body, ln, max_rw)
        live = [v for v in vals if v != 0]
        if len(live) != row_w[i]:
            raise LiftingError(
                f"alist line {ln}: row {i + 1} lists {len(live)} entries, "
                f"declared weight {row_w[i]}"
            )
        for v in live:
            if not 1 <= v <= n:
                raise LiftingError(f"alist line {ln}: column index {v} out of range 1..{n}")
            if (i, v - 1) not in declared:
                raise LiftingError(
                    f"alist line {ln}: entry ({i + 1}, {v}) missing from the column lists"
                )
    if len(declared) != sum(row_w):
        raise LiftingError(f"alist line {lines[-1][0]}: row and column lists disagree")
    H = sp.coo_matrix(
        (np.ones(len(rows), dtype=np.uint8), (rows, cols)), shape=(m, n)
    ).tocsr()
    return from_parity_matrix(H, certify=False)
