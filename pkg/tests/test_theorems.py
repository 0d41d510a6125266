import json
import math

import pytest

from handlecalc import replay
from handlecalc.braids import BridgePresentation, parse_braid, torus_bridge_number
from handlecalc.theorems import (CITES, NOT_GUARANTEED, YES, budget_ledger_rows, check_knot_surgery,
                                 check_log_transform, general_log_gluing, knot_surgery_gluing,
                                 log_transform_gluing, seifert_coefficients)
from oracles import bezout, det_cofactor


def assert_certified(rep):
    assert rep.script is not None
    final = replay(rep.initial, rep.script, certify=False).link
    assert final.dotted_indices() == []
    assert final.same_matrix(rep.final)


class TestGluing:
    def test_log_entry(self):
        g = log_transform_gluing(2, 3)
        assert g.matrix[0][1] == -6 and g.det() == 1

    def test_knot_surgery_is_permutation(self):
        g = knot_surgery_gluing()
        assert sorted(map(sorted, g.matrix)) == [[0, 0, 1]] * 3
        assert abs(det_cofactor([list(r) for r in g.matrix])) == 1
        # m -> lambda1, l -> d, s -> lambda2
        assert g.image(0) == (0, 1, 0) and g.image(1) == (1, 0, 0) and g.image(2) == (0, 0, 1)

    def test_non_coprime_rejected(self):
        with pytest.raises(ValueError):
            log_transform_gluing(4, 6)

    @pytest.mark.parametrize("p,pp,b,c", [(3, 2, 1, 1), (1, 1, 0, 1), (5, 3, 2, -7), (7, 4, -3, 5), (2, 1, 1, 0)])
    def test_general_log_completion(self, p, pp, b, c):
        g = general_log_gluing(p, pp, b, c)
        assert g.image(0) == (p, pp * b, pp * c)
        assert abs(det_cofactor([list(r) for r in g.matrix])) == 1

    def test_general_log_rejects_imprimitive(self):
        with pytest.raises(ValueError):
            general_log_gluing(2, 1, 2, 4)


class TestSeifert:
    @pytest.mark.parametrize("p,q,uv", [(2, 3, (1, -1)), (3, 4, (1, -1)), (1, 5, (0, 1))])
    def test_examples(self, p, q, uv):
        assert seifert_coefficients(p, q) == uv

    def test_against_extended_euclid(self):
        for p in range(1, 30):
            for q in range(1, 30):
                if math.gcd(p, q) != 1:
                    continue
                u, v = seifert_coefficients(p, q)
                g, x, y = bezout(p, q)
                assert p * v + q * u == 1 == g
                # solutions differ from Euclid's by a multiple of (q, -p)
                assert (v - x) % q == 0 and (u - y) % p == 0 if p > 1 and q > 1 else True
                assert abs(u) < p or p == 1
                assert abs(v) < q or q == 1


class TestKnotSurgery:
    @pytest.mark.parametrize("n,b", [(1, 9), (2, 18), (1, 1), (3, 5)])
    def test_yes(self, n, b):
        rep = check_knot_surgery(n, b)
        assert rep.feasible == YES
        assert rep.row("aCycleSlots") == 9 * n and rep.row("oneHandlesToCancel") == b + 1
        assert_certified(rep)

    def test_boundary_miss(self):
        rep = check_knot_surgery(1, 10)
        assert rep.feasible == NOT_GUARANTEED and rep.script is None

    def test_with_braid(self):
        pres = BridgePresentation(3, parse_braid("T(2,5)^2 T(1,4)^-1", 6))
        rep = check_knot_surgery(1, 3, pres)
        assert rep.yes
        assert_certified(rep)

    def test_invalid(self):
        with pytest.raises(ValueError):
            check_knot_surgery(0, 3)
        with pytest.raises(ValueError):
            check_knot_surgery(1, 2, BridgePresentation.trivial(3))


class TestLogTransform:
    def test_budget_equality_n2(self):
        rep = check_log_transform(2, 3, 4)
        assert rep.yes and rep.row("stage2Need") == rep.row("remainder") == 13
        assert rep.framing_tuple == (-8, -10, -12, -14)
        assert_certified(rep)

    def test_n3_odd_tuple(self):
        rep = check_log_transform(3, 4, 5)
        assert rep.framing_tuple == (-15,) * 4
        assert_certified(rep)

    def test_five_six(self):
        rep = check_log_transform(5, 5, 6)
        assert rep.feasible == NOT_GUARANTEED
        assert any("5,6" in n for n in rep.notes)

    def test_stage_one_path(self):
        rep = check_log_transform(7, 2, 9)
        assert rep.yes and rep.framing_tuple == (-15, -15)
        assert "stage2Framings" not in [r.name for r in rep.ledger]
        assert_certified(rep)

    def test_trivial_knot_case(self):
        rep = check_log_transform(4, 1, 11)
        assert rep.yes
        assert_certified(rep)

    def test_n1_reduces_to_knot_surgery(self):
        for p in range(1, 31):
            for q in range(1, 31):
                if math.gcd(p, q) != 1:
                    continue
                a = check_log_transform(1, p, q).feasible
                b = check_knot_surgery(1, torus_bridge_number(p, q)).feasible
                assert a == b

    def test_open_case_note(self):
        rep = check_log_transform(1, 10, 11)
        assert rep.feasible == NOT_GUARANTEED
        assert CITES["open-10-11"] in rep.notes

    def test_non_coprime(self):
        with pytest.raises(ValueError):
            check_log_transform(2, 4, 6)

    def test_every_row_is_cited(self):
        rep = check_log_transform(2, 3, 4)
        for row in rep.to_dict()["ledger"]:
            assert row["cite"] in CITES or row["cite"] == "plumbing"

    def test_report_json(self):
        rep = check_log_transform(2, 2, 5)
        data = json.loads(rep.to_json(include_script=True))
        assert data["schema"] == "rpt-1" and data["script"]["final_dotted"] == 0
        assert len(data["script"]["moves"]) == data["script"]["length"]
        assert rep.to_json() == check_log_transform(2, 2, 5).to_json()

    def test_text(self):
        text = check_log_transform(2, 3, 4).to_text()
        assert "verdict: yes" in text and "stage2Need" in text


def test_budget_rows_cited():
    rows = budget_ledger_rows(2)
    assert [r.name for r in rows][:2] == ["totalChain", "stage1Active"]
    assert all(r.cite in CITES for r in rows)
