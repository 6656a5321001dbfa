import json
from fractions import Fraction

import numpy as np
import pytest

from scldpc.protograph import (
    CN_CONNECTION_TARGET,
    CN_FULL_TERMINATION,
    CN_NON_CLOSURE,
    ConstructionError,
    EnsembleSpec,
    Protograph,
    balanced_spreading,
    build_block_protograph,
    construct,
    design_rate,
    degree_profile,
    edge_list,
    from_json,
    to_json,
    uniform_spreading,
)


def spec36(family, L, omega=2, **kw):
    return EnsembleSpec(family=family, dv=3, dc=6, L=L, omega=omega, **kw)


def test_block_protograph_counts():
    p = build_block_protograph(3, 6)
    assert p.n_cn == 1 and p.n_vn == 2
    assert p.mult.sum() == 6
    assert list(p.cn_degrees) == [6]
    assert list(p.vn_degrees) == [3, 3]

    p = build_block_protograph(4, 6)
    assert p.n_cn == 2 and p.n_vn == 3
    assert list(p.cn_degrees) == [6, 6]
    assert list(p.vn_degrees) == [4, 4, 4]


def test_node_counts_per_family():
    assert construct(spec36("C0", 10)).n_cn == 12
    assert construct(spec36("C1", 10)).n_cn == 11
    assert construct(spec36("C2", 10)).n_cn == 10
    assert construct(spec36("T", 10)).n_cn == 10
    for family in ("C0", "C1", "C2", "T", "S1", "S2"):
        assert construct(spec36(family, 10)).n_vn == 20
    m1 = construct(spec36("M1", 10))
    assert m1.n_vn == 40 and m1.n_cn == 22


def test_exact_rates_reference_points():
    assert design_rate(construct(spec36("C0", 10))) == Fraction(2, 5)
    assert design_rate(construct(spec36("C0", 20))) == Fraction(9, 20)
    assert design_rate(construct(spec36("C1", 10, T_removed=1))) == Fraction(9, 20)
    assert design_rate(construct(spec36("C2", 10))) == Fraction(1, 2)
    assert design_rate(construct(spec36("T", 10))) == Fraction(1, 2)
    assert design_rate(construct(spec36("M1", 10))) == Fraction(9, 20)


def test_rate_closed_forms_over_grid():
    # b_v = 2, b_c = 1 for the (3, 6) block
    for omega in (1, 2, 3):
        spreading = None if omega == 2 else balanced_spreading(np.array([[3, 3]]), omega)
        for L in range(2, 41):
            c0 = EnsembleSpec("C0", 3, 6, L, omega, spreading=spreading)
            assert design_rate(construct(c0)) == Fraction(L - omega, 2 * L)
            t = EnsembleSpec("T", 3, 6, L, omega, spreading=spreading)
            assert design_rate(construct(t)) == Fraction(1, 2)
            c2 = EnsembleSpec("C2", 3, 6, L, omega, spreading=spreading)
            assert design_rate(construct(c2)) == Fraction(1, 2)
            s2 = EnsembleSpec("S2", 3, 6, L, omega, spreading=spreading)
            assert design_rate(construct(s2)) == Fraction(1, 2)
            if omega >= 2:
                for T in range(1, omega):
                    for family in ("C1", "S1", "M1"):
                        s = EnsembleSpec(family, 3, 6, L, omega, T_removed=T, spreading=spreading)
                        assert design_rate(construct(s)) == Fraction(L - omega + T, 2 * L)


def test_connection_families_preserve_rate():
    # adding edges to existing nodes must not change the rate
    for family, base in (("S1", "C1"), ("S2", "C2"), ("M1", "C1")):
        r = design_rate(construct(spec36(family, 9)))
        rb = design_rate(construct(spec36(base, 9)))
        assert r == rb


def test_degree_caps():
    for family in ("C0", "C1", "C2", "T", "S1", "S2", "M1"):
        p = construct(spec36(family, 9))
        assert p.cn_degrees.max() <= 6
        assert p.vn_degrees.min() >= 2
        # connection edges may raise a VN above dv, never above dv + dc
        assert p.vn_degrees.max() <= 9
    for family in ("C0", "T"):
        p = construct(spec36(family, 9))
        assert (p.vn_degrees == 3).all()
    # check removal leaves the boundary VNs short of dv
    for family in ("C1", "C2"):
        p = construct(spec36(family, 9))
        assert set(p.vn_degrees.tolist()) == {2, 3}


def test_c0_interior_checks_are_full():
    p = construct(spec36("C0", 12))
    interior = (p.cn_pos >= 3) & (p.cn_pos <= 10)
    assert (p.cn_degrees[interior] == 6).all()


def test_tail_biting_is_position_regular():
    p = construct(spec36("T", 10))
    assert (p.cn_degrees == 6).all()
    assert (p.vn_degrees == 3).all()


def test_c1_tags_and_removal():
    p = construct(spec36("C1", 10))
    tags = np.array(p.cn_tag)
    assert (tags == CN_NON_CLOSURE).sum() == 1
    nc = int(np.nonzero(tags == CN_NON_CLOSURE)[0][0])
    assert p.cn_pos[nc] == 11
    assert p.cn_degrees[nc] < 6
    assert (tags == CN_FULL_TERMINATION).sum() > 0


def test_s1_fills_non_closure_checks():
    base = construct(spec36("C1", 10))
    p = construct(spec36("S1", 10))
    tags = np.array(p.cn_tag)
    filled = np.nonzero(tags == CN_CONNECTION_TARGET)[0]
    assert filled.size == 1
    assert p.cn_degrees[filled[0]] == 6
    assert p.n_edges == base.n_edges + (6 - base.cn_degrees[filled[0]])


def test_m1_cross_chain_structure():
    p = construct(spec36("M1", 10))
    # connection edges always land on the other chain
    base = construct(spec36("C1", 10))
    extra = p.mult.copy()
    extra[: base.n_cn, : base.n_vn] -= base.mult
    extra[base.n_cn :, base.n_vn :] -= base.mult
    cn_idx, vn_idx = np.nonzero(extra)
    assert cn_idx.size > 0
    for c, v in zip(cn_idx, vn_idx):
        assert p.cn_chain[c] != p.vn_chain[v]


def test_connection_overrides_replace_default():
    base = construct(spec36("C1", 10))
    nc = int(np.nonzero(np.array(base.cn_tag) == CN_NON_CLOSURE)[0][0])
    p = construct(spec36("S1", 10, connection_overrides=[(nc, 0, 1), (nc, 3, 1)]))
    assert p.mult[nc, 0] == base.mult[nc, 0] + 1
    assert p.mult[nc, 3] == base.mult[nc, 3] + 1
    assert p.n_edges == base.n_edges + 2
    empty = construct(spec36("S1", 10, connection_overrides=[]))
    assert empty.mult.sum() == base.mult.sum()


def test_uniform_spreading_partition():
    block = build_block_protograph(3, 6)
    mats = uniform_spreading(block.mult, 2)
    assert len(mats) == 3
    assert sum(m.sum() for m in mats) == 6
    assert (sum(mats) == block.mult).all()
    with pytest.raises(ConstructionError):
        uniform_spreading(block.mult, 1)


def test_balanced_spreading_partition():
    block = build_block_protograph(3, 6)
    for omega in (1, 2, 3, 4):
        mats = balanced_spreading(block.mult, omega)
        assert len(mats) == omega + 1
        assert (sum(mats) == block.mult).all()
        spans = [int(m.max()) - int(m.min()) for m in mats]
        assert max(spans) <= 1


def test_spreading_validation():
    bad = [np.array([[2, 2]]), np.array([[1, 1]]), np.array([[1, 1]])]
    with pytest.raises(ConstructionError):
        construct(spec36("C0", 6, spreading=bad))
    wrong_count = [np.array([[1, 1]])] * 2
    with pytest.raises(ConstructionError):
        construct(spec36("C0", 6, spreading=wrong_count))


def test_spec_validation():
    with pytest.raises(ConstructionError):
        EnsembleSpec("C3", 3, 6, 10, 2)
    with pytest.raises(ConstructionError):
        EnsembleSpec("C0", 6, 3, 10, 2)
    with pytest.raises(ConstructionError):
        EnsembleSpec("C0", 3, 6, 1, 2)
    with pytest.raises(ConstructionError):
        EnsembleSpec("C1", 3, 6, 10, 1)
    with pytest.raises(ConstructionError):
        EnsembleSpec("C1", 3, 6, 10, 2, T_removed=2)
    with pytest.raises(ConstructionError):
        EnsembleSpec("C0", 3, 6, 10, 2, T_removed=1)
    with pytest.raises(ConstructionError):
        EnsembleSpec("C0", 3, 6, 10, 2, connection_overrides=[(0, 0, 1)])


def test_with_added_edges_bounds():
    p = construct(spec36("C2", 6))
    with pytest.raises(ConstructionError):
        p.with_added_edges([(p.n_cn, 0, 1)])
    with pytest.raises(ConstructionError):
        p.with_added_edges([(0, 0, 0)])
    q = p.with_added_edges([(0, 1, 2)])
    assert q.mult[0, 1] == p.mult[0, 1] + 2
    assert q.cn_tag[0] == CN_CONNECTION_TARGET
    assert p.mult[0, 1] != q.mult[0, 1] or p.mult is not q.mult


def test_edge_list_expands_multiplicity():
    p = construct(spec36("T", 4))
    cn, vn = edge_list(p)
    assert cn.size == p.n_edges
    for c, v in zip(cn[:10], vn[:10]):
        assert p.mult[c, v] >= 1
    counts = {}
    for c, v in zip(cn, vn):
        counts[(c, v)] = counts.get((c, v), 0) + 1
    for (c, v), k in counts.items():
        assert p.mult[c, v] == k


def test_degree_profile_positions():
    p = construct(spec36("C0", 5))
    prof = degree_profile(p)
    assert len(prof.cn_degrees) == p.n_cn
    assert len(prof.vn_degrees) == p.n_vn
    assert prof.total_edges == p.n_edges
    assert prof.vn_degrees[0] == (1, 3)


@pytest.mark.parametrize("family", ["C0", "C1", "C2", "T", "S1", "S2", "M1"])
def test_json_round_trip(family):
    p = construct(spec36(family, 7))
    q = from_json(to_json(p))
    assert (q.mult == p.mult).all()
    assert (q.cn_pos == p.cn_pos).all()
    assert (q.vn_pos == p.vn_pos).all()
    assert (q.cn_chain == p.cn_chain).all()
    assert (q.vn_chain == p.vn_chain).all()
    assert q.cn_tag == p.cn_tag
    assert q.spec == p.spec
    doc = json.loads(to_json(p))
    assert doc["n_vn"] == p.n_vn


def test_spec_dict_round_trip():
    s = spec36("S1", 9, T_removed=1, connection_overrides=[(10, 3, 1)])
    s2 = EnsembleSpec.from_dict(s.to_dict())
    assert s2 == s
