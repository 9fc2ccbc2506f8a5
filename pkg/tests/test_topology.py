from __future__ import annotations

import json

import pytest

from mirrorcell.errors import InvalidParameterError
from mirrorcell.fibration import FibrationParams, enumerate_infinity_points, sample_base_point
from mirrorcell.topology import (
    Pi1Structure,
    free_rank,
    free_rank_minus_one_variant,
    free_rank_product_form,
    genus,
    multidegree,
    pi1_structure,
    puncture_count,
    report,
    riemann_hurwitz_oracle,
)


def P(k, ell, r):
    return FibrationParams(k, ell, r)


def test_genus_examples():
    assert genus(P(0, 2, 2)) == 0
    assert genus(P(2, 2, 1)) == 1
    assert genus(P(0, 2, 1)) == 0


def test_puncture_examples():
    assert puncture_count(P(0, 2, 2)) == 2
    assert puncture_count(P(2, 2, 1)) == 3
    assert puncture_count(P(1, 3, 2)) == 6 == 1 * 2 + 2**2


def test_free_rank_examples():
    assert free_rank(P(0, 2, 1)) == 0
    assert free_rank(P(0, 2, 2)) == 1
    assert free_rank(P(2, 2, 1)) == 4


def test_pi1_examples():
    assert str(pi1_structure(P(0, 2, 1))) == "F_0 ⋊ B_2"
    assert str(pi1_structure(P(2, 2, 1))) == "F_4 ⋊ B_2"
    d = pi1_structure(P(1, 3, 2)).to_dict()
    assert d["fiber_group"] == {"type": "free", "rank": 13}
    assert d["base_group"] == {"type": "braid", "strands": 3}
    assert d["extension"] == "split"
    assert Pi1Structure(5, 4).braid_strands == 4


def test_plane_curve_genus_agrees_with_degree_genus_formula():
    # l = 2: the closed fiber is a smooth plane curve of degree d = k + r
    for k in range(3):
        for r in range(1, 7):
            d = k + r
            assert genus(P(k, 2, r)) == (d - 1) * (d - 2) // 2


INT_GRID = [(k, ell, r) for ell in range(2, 7) for r in range(1, 7) for k in range(min(ell, 6) + 1)]


@pytest.mark.parametrize("t", INT_GRID)
def test_free_rank_identities(t):
    p = P(*t)
    g, Pn, N = genus(p), puncture_count(p), free_rank(p)
    assert N == 2 * g + Pn - 1 == free_rank_product_form(p)
    assert free_rank_minus_one_variant(p) == N - 2
    assert Pn == p.bezout == p.k * p.r ** (p.ell - 2) + p.r ** (p.ell - 1)
    md = multidegree(p)
    assert len(md) == p.ell - 1 and md[0] == p.k + p.r
    prod = 1
    for d in md:
        prod *= d
    assert 2 * g - 2 == (sum(md) - p.ell - 1) * prod
    assert g >= 0 and N >= 0 and Pn >= 1


def test_oracle_examples():
    assert riemann_hurwitz_oracle(P(0, 2, 1), [0.7 + 0.2j]) == (0, 1, 0)
    assert riemann_hurwitz_oracle(P(0, 2, 2), [0.7 + 0.2j]) == (0, 2, 1)
    assert riemann_hurwitz_oracle(P(2, 2, 1), [0.7 + 0.2j]) == (1, 3, 4)


@pytest.mark.parametrize("t", [(k, 2, r) for k in range(3) for r in range(1, 5)])
def test_oracle_agrees_with_formulas(t):
    p = P(*t)
    for seed in range(3):
        z = sample_base_point(2, seed=seed)
        assert riemann_hurwitz_oracle(p, z, seed=seed) == (genus(p), puncture_count(p), free_rank(p))


def test_oracle_rejects_out_of_range():
    with pytest.raises(InvalidParameterError):
        riemann_hurwitz_oracle(P(1, 3, 2), [0.5, 0.9])
    with pytest.raises(InvalidParameterError):
        riemann_hurwitz_oracle(P(0, 2, 5), [0.5])


def test_minus_one_variant_disagrees_with_oracle_at_conic():
    p = P(0, 2, 2)
    _, _, N = riemann_hurwitz_oracle(p, sample_base_point(2, seed=0))
    assert N == 1
    assert free_rank_minus_one_variant(p) == -1


@pytest.mark.parametrize("t", [(k, ell, r) for ell in (2, 3, 4) for r in (1, 2, 3) for k in range(ell + 1)])
def test_punctures_match_enumeration(t):
    p = P(*t)
    assert len(enumerate_infinity_points(sample_base_point(p.ell, seed=5), p)) == puncture_count(p)


def test_report_examples():
    rep = report(P(1, 3, 2), seed=1)
    assert (rep.punctures, rep.genus, rep.free_rank) == (6, 4, 13)
    assert rep.ok
    assert {c.name for c in rep.checks} >= {"infinity_count", "free_rank_product_form"}
    rep = report(P(0, 2, 1))
    assert rep.ok and any(c.name == "riemann_hurwitz_oracle" for c in rep.checks)
    rep = report(P(0, 3, 1))
    assert (rep.punctures, rep.genus, rep.free_rank) == (1, 0, 0)


def test_report_json_fields():
    d = report(P(0, 2, 2), seed=3).to_dict()
    assert set(d) >= {"k", "l", "r", "genus", "punctures", "free_rank", "bezout", "multidegree", "pi1", "checks"}
    assert all(set(c) == {"name", "pass", "detail"} for c in d["checks"])
    assert "-1" in d["notes"][0]
    assert json.dumps(d) == json.dumps(report(P(0, 2, 2), seed=3).to_dict())


def test_report_records_failures_instead_of_raising(monkeypatch):
    import mirrorcell.topology as topo

    def broken(*args, **kwargs):
        raise topo.VerificationError("synthetic failure")

    monkeypatch.setattr(topo, "enumerate_infinity_points", broken)
    rep = topo.report(P(1, 3, 2), seed=0)
    assert not rep.ok
    failed = [c for c in rep.checks if not c.passed]
    assert [c.name for c in failed] == ["infinity_count"]
    assert "synthetic failure" in failed[0].detail
