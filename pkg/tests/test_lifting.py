import numpy as np
import pytest

from scldpc import gf2
from scldpc.lifting import (
    LiftingError,
    RankDeficiencyError,
    export_alist,
    from_parity_matrix,
    import_alist,
    lift,
    shift_manifest,
)
from scldpc.protograph import EnsembleSpec, balanced_spreading, construct


def spec36(family, L, **kw):
    return EnsembleSpec(family=family, dv=3, dc=6, L=L, omega=2, **kw)


def test_weights_match_protograph_degrees():
    p = construct(spec36("C1", 8))
    code = lift(p, M=10, seed=1, certify=False)
    col_w = np.asarray(code.H.sum(axis=0)).ravel()
    row_w = np.asarray(code.H.sum(axis=1)).ravel()
    vn_deg = p.mult.sum(axis=0)
    cn_deg = p.mult.sum(axis=1)
    for b in range(p.n_vn):
        assert np.all(col_w[b * 10 : (b + 1) * 10] == vn_deg[b])
    for b in range(p.n_cn):
        assert np.all(row_w[b * 10 : (b + 1) * 10] == cn_deg[b])


def test_seed_determinism():
    p = construct(spec36("T", 6))
    a = lift(p, M=8, seed=3, certify=False)
    b = lift(p, M=8, seed=3, certify=False)
    assert np.array_equal(a.shifts, b.shifts)
    assert (a.H != b.H).nnz == 0
    c = lift(p, M=8, seed=4, certify=False)
    assert not np.array_equal(a.shifts, c.shifts)


def test_rank_deficiency_equals_parity_corank():
    # one-ended or two-ended uniform termination forces GF(2) row
    # collisions that survive every circulant assignment
    expected = {"C0": 2, "C1": 1, "S1": 1, "S2": 1, "M1": 0, "C2": 0, "T": 0}
    for fam, corank in expected.items():
        p = construct(spec36(fam, 10))
        assert p.n_cn - gf2.rank((p.mult % 2).astype(np.uint8)) == corank
        code = lift(p, M=20, seed=0, max_retries=2, allow_deficient=True)
        assert code.m_rows - code.rank == corank
        if corank == 0:
            assert code.attempts == 1
        else:
            assert code.k == code.n - code.m_rows + corank


def test_rank_deficient_raises_without_allowance():
    p = construct(spec36("C0", 5))
    with pytest.raises(RankDeficiencyError, match="full-rank"):
        lift(p, M=10, seed=0, max_retries=2)


def test_four_cycle_freedom():
    p = construct(spec36("T", 6))
    code = lift(p, M=8, seed=3, certify=False)
    assert code.girth4_free
    G = (code.H.astype(np.int64) @ code.H.T.astype(np.int64)).toarray()
    off = G - np.diag(np.diag(G))
    assert off.max() <= 1


def test_multiplicity_needs_room():
    sp1 = balanced_spreading(np.array([[3, 3]]), 1)
    p = construct(EnsembleSpec(family="C0", dv=3, dc=6, L=5, omega=1, spreading=sp1))
    assert int(p.mult.max()) == 2
    with pytest.raises(LiftingError, match="multiplicity"):
        lift(p, M=1, certify=False)
    with pytest.raises(LiftingError):
        lift(p, M=0, certify=False)


def test_from_parity_matrix():
    H = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    code = from_parity_matrix(H)
    assert code.M == 1
    assert code.rank == 2
    assert code.k == 1
    assert code.edge_cn.tolist() == [0, 0, 1, 1]
    assert code.edge_vn.tolist() == [0, 1, 1, 2]
    assert np.array_equal(code.H.toarray(), H)


def test_shift_manifest():
    p = construct(spec36("T", 4))
    code = lift(p, M=6, seed=9, certify=False)
    man = shift_manifest(code)
    assert man["M"] == 6
    assert man["seed"] == 9
    assert man["attempts"] == 1
    assert man["girth4_free"] == code.girth4_free
    assert len(man["shifts"]) == len(code.shifts)
    c, v, s = man["shifts"][5]
    assert (c, v, s) == (int(code.edge_cn[5]), int(code.edge_vn[5]), int(code.shifts[5]))


def test_alist_roundtrip(tmp_path):
    p = construct(spec36("T", 6))
    code = lift(p, M=8, seed=3, certify=False)
    path = tmp_path / "t.alist"
    export_alist(code, str(path))
    back = import_alist(str(path))
    assert (back.H != code.H).nnz == 0
    assert back.M == 1

    tokens = path.read_text().split("\n")
    n, m = map(int, tokens[0].split())
    assert (n, m) == (code.n, code.m_rows)
    max_cw, max_rw = map(int, tokens[1].split())
    assert max_cw == 3 and max_rw == 6


VALID_ALIST = ["3 2", "2 2", "1 2 1", "2 2", "1 0", "1 2", "2 0", "1 2", "2 3"]


def write_alist(tmp_path, lines):
    path = tmp_path / "h.alist"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_alist_small_valid(tmp_path):
    back = import_alist(write_alist(tmp_path, VALID_ALIST))
    assert np.array_equal(
        back.H.toarray(), np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    )


def test_alist_malformed_reports_line_numbers(tmp_path):
    cases = [
        (["3 x"] + VALID_ALIST[1:], "alist line 1"),
        (VALID_ALIST[:3], "truncated header"),
        (VALID_ALIST[:4] + ["0 0"] + VALID_ALIST[5:], "line 5.*column 1 lists 0"),
        (VALID_ALIST[:4] + ["5 0"] + VALID_ALIST[5:], "line 5.*row index 5 out of range"),
        (VALID_ALIST[:7] + ["1 3", "2 3"], "line 8.*missing from the column lists"),
        (VALID_ALIST + ["1 1"], "expected 9 data lines, got 10"),
        (VALID_ALIST[:8], "expected 9 data lines, got 8"),
    ]
    for lines, pattern in cases:
        with pytest.raises(LiftingError, match=pattern):
            import_alist(write_alist(tmp_path, lines))
