"""Monte Carlo decoding of lifted codes on the BEC and BI-AWGN channels.

Frames are seeded individually with a counter-based generator keyed by
(seed, frame index), so any chunking or parallel schedule reproduces
the same noise and the same aggregates. Erasures are decoded by
peeling (numba kernel); AWGN uses flooding sum-product on log ratios,
batched across frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import gf2
from .lifting import LiftedCode

__all__ = [
    "ChannelSpec",
    "SimPoint",
    "PeelResult",
    "BPResult",
    "Encoder",
    "peel_decode",
    "bec_bp_unresolved",
    "bp_decode_awgn",
    "simulate",
]


@dataclass(frozen=True)
class ChannelSpec:
    """Channel kind plus its single parameter.

    kind "BEC" reads param as the erasure probability; "BIAWGN" reads
    it as Eb/N0 in dB, converted to noise variance through the code
    rate (sigma^2 = 1/(2 R 10^{EbN0/10}) under unit-energy antipodal
    signaling). rate overrides the code's realized rate when set.
    """

    kind: str
    param: float
    rate: float | None = None

    def __post_init__(self):
        if self.kind not in ("BEC", "BIAWGN"):
            raise ValueError(f"channel kind must be BEC or BIAWGN, got {self.kind!r}")
        if self.kind == "BEC" and not 0.0 <= self.param <= 1.0:
            raise ValueError(f"erasure probability must be in [0,1], got {self.param}")
        if self.rate is not None and not 0.0 < self.rate < 1.0:
            raise ValueError(f"rate must be in (0,1), got {self.rate}")


@dataclass(frozen=True)
class SimPoint:
    """Aggregate of one simulated operating point."""

    channel_param: float
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    ci95_ber: float
    ci95_fer: float
    seed: int

    def as_row(self) -> dict:
        return {
            "channel_param": self.channel_param,
            "frames": self.frames,
            "bit_errors": self.bit_errors,
            "frame_errors": self.frame_errors,
            "ber": self.ber,
            "fer": self.fer,
            "ci95": self.ci95_ber,
            "seed": self.seed,
        }


@dataclass
class PeelResult:
    resolved: np.ndarray
    residual: np.ndarray

    @property
    def success(self) -> bool:
        return self.residual.size == 0


@dataclass
class BPResult:
    hard: np.ndarray
    success: bool
    iterations: int


class _Graph:
    """Flat adjacency of a lifted Tanner graph in both orientations."""

    def __init__(self, code: LiftedCode):
        H = code.H.tocsr()
        H.sort_indices()
        self.n_cn, self.n_vn = H.shape
        self.cn_ptr = H.indptr.astype(np.int64)
        self.cn_idx = H.indices.astype(np.int64)
        Hc = code.H.tocsc()
        Hc.sort_indices()
        self.vn_ptr = Hc.indptr.astype(np.int64)
        self.vn_idx = Hc.indices.astype(np.int64)
        self.n_edges = int(self.cn_idx.size)
        # edge e lives in CN-major order; vn_perm lists edges grouped by VN
        self.edge_vn = self.cn_idx
        self.vn_perm = np.argsort(self.edge_vn, kind="stable").astype(np.int64)
        self.edge_cn = np.repeat(
            np.arange(self.n_cn, dtype=np.int64), np.diff(self.cn_ptr)
        )


def _graph(code: LiftedCode) -> _Graph:
    g = getattr(code, "_decoder_graph", None)
    if g is None:
        g = _Graph(code)
        code._decoder_graph = g
    return g


@njit(nogil=True, cache=True)
def _peel_kernel(cn_ptr, cn_idx, vn_ptr, vn_idx, erased, cn_order):
    n_cn = cn_ptr.size - 1
    cnt = np.zeros(n_cn, dtype=np.int64)
    for c in range(n_cn):
        k = 0
        for e in range(cn_ptr[c], cn_ptr[c + 1]):
            if erased[cn_idx[e]]:
                k += 1
        cnt[c] = k
    queue = np.empty(cn_idx.size + n_cn, dtype=np.int64)
    head = 0
    tail = 0
    for q in range(n_cn):
        c = cn_order[q]
        if cnt[c] == 1:
            queue[tail] = c
            tail += 1
    while head < tail:
        c = queue[head]
        head += 1
        if cnt[c] != 1:
            continue
        v = -1
        for e in range(cn_ptr[c], cn_ptr[c + 1]):
            if erased[cn_idx[e]]:
                v = cn_idx[e]
                break
        erased[v] = False
        for e in range(vn_ptr[v], vn_ptr[v + 1]):
            c2 = vn_idx[e]
            cnt[c2] -= 1
            if cnt[c2] == 1:
                queue[tail] = c2
                tail += 1
    return erased


def peel_decode(
    code: LiftedCode, erased: np.ndarray, cn_order: np.ndarray | None = None
) -> PeelResult:
    """Iteratively resolve erasures through single-erasure checks.

    erased may be a boolean mask of length n or an index array. The
    residual is the unique maximal stopping set inside the erasure
    pattern, regardless of cn_order (exposed only to let tests shuffle
    the schedule).
    """
    g = _graph(code)
    mask = np.zeros(g.n_vn, dtype=np.bool_)
    erased = np.asarray(erased)
    if erased.dtype == np.bool_:
        if erased.size != g.n_vn:
            raise ValueError(f"mask length {erased.size} != n {g.n_vn}")
        mask[:] = erased
    else:
        if erased.size and (erased.min() < 0 or erased.max() >= g.n_vn):
            raise ValueError("erased index out of range")
        mask[erased.astype(np.int64)] = True
    before = mask.copy()
    if cn_order is None:
        cn_order = np.arange(g.n_cn, dtype=np.int64)
    left = _peel_kernel(
        g.cn_ptr, g.cn_idx, g.vn_ptr, g.vn_idx, mask, cn_order.astype(np.int64)
    )
    residual = np.nonzero(left)[0]
    resolved = np.nonzero(before & ~left)[0]
    return PeelResult(resolved=resolved, residual=residual)


def bec_bp_unresolved(code: LiftedCode, erased: np.ndarray, iters: int) -> np.ndarray:
    """Erasure message passing for a fixed iteration count.

    Flooding schedule with extrinsic messages, the finite-graph
    counterpart of density evolution: a check-to-variable message is
    known when every other incoming edge is known; a variable is
    unresolved while its channel value and all incoming messages are
    erased. Returns the boolean per-VN unresolved mask after iters
    rounds, comparable to the DE a-posteriori erasure probability at
    the same iteration.
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    g = _graph(code)
    ch_erased = np.zeros(g.n_vn, dtype=bool)
    ch_erased[:] = np.asarray(erased, dtype=bool)
    # vc[e]: VN->CN message on edge e is erased; edges in CN-major order
    vc = ch_erased[g.edge_vn].copy()
    vn_starts = g.vn_ptr[:-1]
    cn_starts = g.cn_ptr[:-1]
    cv = None
    for _ in range(iters):
        # CN->VN erased unless all other inputs known
        per_cn = np.add.reduceat(vc.astype(np.int64), cn_starts)
        cv = (per_cn[g.edge_cn] - vc) > 0
        # VN->CN known if channel known or any other incoming known
        cv_by_vn = cv[g.vn_perm]
        known_in = np.add.reduceat((~cv_by_vn).astype(np.int64), vn_starts)
        known_other = known_in[g.edge_vn[g.vn_perm]] - (~cv_by_vn).astype(np.int64)
        vc_by_vn = ch_erased[g.edge_vn[g.vn_perm]] & (known_other == 0)
        vc[g.vn_perm] = vc_by_vn
    any_known = np.zeros(g.n_vn, dtype=bool)
    np.logical_or.at(any_known, g.edge_vn, ~cv)
    return ch_erased & ~any_known


_TANH_CLIP = 1.0 - 1e-12


def _cn_update_sumproduct(msg: np.ndarray, g: _Graph) -> np.ndarray:
    """Extrinsic tanh-domain check update, batched over columns."""
    t = np.tanh(0.5 * msg)
    np.clip(t, -_TANH_CLIP, _TANH_CLIP, out=t)
    mag = np.abs(t)
    zero = mag < 1e-300
    logm = np.where(zero, 0.0, np.log(np.where(zero, 1.0, mag)))
    neg = (t < 0).astype(np.int64)
    starts = g.cn_ptr[:-1]
    sum_log = np.add.reduceat(logm, starts, axis=0)[g.edge_cn]
    n_zero = np.add.reduceat(zero.astype(np.int64), starts, axis=0)[g.edge_cn]
    n_neg = np.add.reduceat(neg, starts, axis=0)[g.edge_cn]
    excl_zero = n_zero - zero.astype(np.int64)
    excl_mag = np.where(excl_zero > 0, 0.0, np.exp(sum_log - logm))
    excl_sign = 1.0 - 2.0 * ((n_neg - neg) % 2)
    prod = excl_sign * np.clip(excl_mag, 0.0, _TANH_CLIP)
    return 2.0 * np.arctanh(prod)


def _cn_update_minsum(msg: np.ndarray, g: _Graph) -> np.ndarray:
    mag = np.abs(msg)
    starts = g.cn_ptr[:-1]
    min1 = np.minimum.reduceat(mag, starts, axis=0)
    spread = min1[g.edge_cn]
    is_min = mag == spread
    # first minimum of each group: running count inside the group hits 1
    cs = np.cumsum(is_min, axis=0)
    before_group = cs[starts] - is_min[starts]
    first = is_min & (cs - before_group[g.edge_cn] == 1)
    masked = np.where(first, np.inf, mag)
    min2 = np.minimum.reduceat(masked, starts, axis=0)[g.edge_cn]
    excl_mag = np.where(first, min2, spread)
    neg = (msg < 0).astype(np.int64)
    n_neg = np.add.reduceat(neg, starts, axis=0)[g.edge_cn]
    sign = 1.0 - 2.0 * ((n_neg - neg) % 2)
    return sign * excl_mag


def _bp_batch(
    code: LiftedCode, llr: np.ndarray, max_iter: int, min_sum: bool
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decode a batch (n, B) of channel LLRs; returns (hard, ok, iters)."""
    g = _graph(code)
    B = llr.shape[1]
    hard = np.zeros((g.n_vn, B), dtype=np.uint8)
    ok = np.zeros(B, dtype=bool)
    iters = np.full(B, max_iter, dtype=np.int64)
    active = np.arange(B)
    vc = llr[g.edge_vn][:, :]
    llr_act = llr
    vn_starts = g.vn_ptr[:-1]
    update = _cn_update_minsum if min_sum else _cn_update_sumproduct
    for it in range(1, max_iter + 1):
        cv = update(vc, g)
        cv_by_vn = cv[g.vn_perm]
        sums = np.add.reduceat(cv_by_vn, vn_starts, axis=0)
        app = llr_act + sums
        vc_new = np.empty_like(vc)
        vc_new[g.vn_perm] = app[g.edge_vn[g.vn_perm]] - cv_by_vn
        vc = vc_new
        bits = (app < 0).astype(np.uint8)
        syn = np.bitwise_xor.reduceat(bits[g.edge_vn], g.cn_ptr[:-1], axis=0)
        good = ~syn.any(axis=0)
        if good.any():
            sel = active[good]
            hard[:, sel] = bits[:, good]
            ok[sel] = True
            iters[sel] = it
            keep = ~good
            if not keep.any():
                return hard, ok, iters
            active = active[keep]
            vc = vc[:, keep]
            llr_act = llr_act[:, keep]
    # unconverged frames keep their final hard decisions
    cv = update(vc, g)
    cv_by_vn = cv[g.vn_perm]
    app = llr_act + np.add.reduceat(cv_by_vn, vn_starts, axis=0)
    hard[:, active] = (app < 0).astype(np.uint8)
    return hard, ok, iters


def bp_decode_awgn(
    code: LiftedCode, llr: np.ndarray, max_iter: int = 100, min_sum: bool = False
) -> BPResult:
    """Flooding belief propagation from channel log ratios.

    Positive llr favors bit 0. Stops early once the syndrome is zero;
    success reports exactly that event.
    """
    llr = np.asarray(llr, dtype=np.float64).reshape(-1, 1)
    if llr.shape[0] != code.n:
        raise ValueError(f"llr length {llr.shape[0]} != n {code.n}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    hard, ok, iters = _bp_batch(code, llr, max_iter, min_sum)
    return BPResult(hard=hard[:, 0], success=bool(ok[0]), iterations=int(iters[0]))


class Encoder:
    """Systematic GF(2) encoder from the reduced parity-check matrix.

    Intended for cross-checks on small codes; builds a dense RREF once.
    Free columns carry the message, pivot columns are solved per check.
    """

    def __init__(self, code: LiftedCode):
        R, pivots = gf2.rref(code.H.toarray())
        self.rank = len(pivots)
        self.n = code.n
        self.pivots = np.array(pivots, dtype=np.int64)
        free = np.setdiff1d(np.arange(self.n), self.pivots)
        self.free = free
        self.k = free.size
        self._rows = R[: self.rank][:, free].astype(np.int64)

    def encode(self, message: np.ndarray) -> np.ndarray:
        message = np.asarray(message, dtype=np.uint8) & 1
        if message.size != self.k:
            raise ValueError(f"message length {message.size} != k {self.k}")
        x = np.zeros(self.n, dtype=np.uint8)
        x[self.free] = message
        x[self.pivots] = (self._rows @ message) % 2
        return x


def _frame_rng(seed: int, frame: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, frame], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _realized_rate(code: LiftedCode, channel: ChannelSpec) -> float:
    if channel.rate is not None:
        return channel.rate
    if code.rank is None:
        raise ValueError(
            "code rank is uncertified and no explicit rate was given; "
            "Eb/N0 conversion needs one of them"
        )
    return (code.n - code.rank) / code.n


def simulate(
    code: LiftedCode,
    channel: ChannelSpec,
    min_frame_errors: int = 100,
    max_frames: int = 1_000_000,
    seed: int = 0,
    max_iter: int = 100,
    min_sum: bool = False,
    chunk: int = 256,
) -> SimPoint:
    """Run seeded frames until enough frame errors or the frame cap.

    The stop rule is evaluated at fixed chunk boundaries, so the result
    depends only on (code, channel, stop, seed, chunk), not on any
    execution schedule. BEC frames count residual erasures as bit
    errors; AWGN frames count wrong hard decisions against the all-zero
    codeword (channel symmetry makes that representative under BP).
    """
    if min_frame_errors < 1:
        raise ValueError(f"min_frame_errors must be >= 1, got {min_frame_errors}")
    if max_frames < 1:
        raise ValueError(f"max_frames must be >= 1, got {max_frames}")
    n = code.n
    if channel.kind == "BIAWGN":
        rate = _realized_rate(code, channel)
        sigma2 = 1.0 / (2.0 * rate * 10.0 ** (channel.param / 10.0))
        sigma = math.sqrt(sigma2)
    frames = 0
    bit_errors = 0
    frame_errors = 0
    sum_be = 0.0
    sum_be2 = 0.0
    while frames < max_frames and frame_errors < min_frame_errors:
        this = min(chunk, max_frames - frames)
        if channel.kind == "BEC":
            for f in range(frames, frames + this):
                rng = _frame_rng(seed, f)
                erased = rng.random(n) < channel.param
                res = peel_decode(code, erased)
                e = int(res.residual.size)
                bit_errors += e
                frame_errors += e > 0
                sum_be += e
                sum_be2 += e * e
        else:
            noise = np.empty((n, this))
            for j, f in enumerate(range(frames, frames + this)):
                noise[:, j] = _frame_rng(seed, f).standard_normal(n)
            llr = 2.0 * (1.0 + sigma * noise) / sigma2
            hard, ok, _ = _bp_batch(code, llr, max_iter, min_sum)
            errs = hard.sum(axis=0).astype(np.int64)
            bit_errors += int(errs.sum())
            frame_errors += int((errs > 0).sum())
            sum_be += float(errs.sum())
            sum_be2 += float((errs.astype(np.float64) ** 2).sum())
        frames += this
    ber = bit_errors / (frames * n)
    fer = frame_errors / frames
    mean_be = sum_be / frames
    var_be = max(sum_be2 / frames - mean_be * mean_be, 0.0)
    ci95_ber = 1.96 * math.sqrt(var_be / frames) / n
    ci95_fer = 1.96 * math.sqrt(max(fer * (1.0 - fer), 0.0) / frames)
    return SimPoint(
        channel_param=channel.param,
        frames=frames,
        bit_errors=bit_errors,
        frame_errors=frame_errors,
        ber=ber,
        fer=fer,
        ci95_ber=ci95_ber,
        ci95_fer=ci95_fer,
        seed=seed,
    )
