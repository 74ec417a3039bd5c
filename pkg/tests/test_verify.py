import cmath
import json
import math

import pytest

from qconnect import (
    EmptyGrid,
    IDENTITY_IDS,
    IdentityCheck,
    SpiralProximity,
    check,
    default_grid,
    default_suite,
    run_suite,
)


class TestDefaultGrid:
    def test_shape(self):
        grid = default_grid()
        assert len(grid) == 24
        moduli = sorted({round(abs(x), 9) for x in grid})
        assert len(moduli) == 3
        assert moduli[0] == pytest.approx(0.15)
        assert moduli[-1] == pytest.approx(8.0)
        # log-spaced middle ring
        assert moduli[1] == pytest.approx(math.sqrt(0.15 * 8.0))

    def test_angles_avoid_real_axis(self):
        for x in default_grid():
            ang = abs(cmath.phase(x))
            assert min(ang, math.pi - ang) >= math.pi / 16 - 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            default_grid(n_moduli=0)


class TestIdentityCheckConstruction:
    def test_unknown_identity(self):
        with pytest.raises(ValueError):
            IdentityCheck("watson-2", 0.5)

    def test_bad_tolerance(self):
        with pytest.raises(ValueError):
            IdentityCheck("watson", 0.5, tol=0.0)

    def test_all_ids_constructible(self):
        for ident in IDENTITY_IDS:
            IdentityCheck(ident, 0.5, lam=0.7, abc=(-4, 3, 0.5))


class TestCheckBehavior:
    def test_missing_lambda(self):
        with pytest.raises(ValueError):
            check(IdentityCheck("thm-2f0", 0.5))

    def test_missing_abc(self):
        with pytest.raises(ValueError):
            check(IdentityCheck("watson", 0.5))

    def test_lambda_on_base_spiral_raises(self):
        with pytest.raises(SpiralProximity):
            check(IdentityCheck("thm-2f0", 0.5, lam=1.0))

    def test_empty_grid_raises(self):
        grid = (2.0 + 1.0j, 3.0)  # all outside |x| < 1
        with pytest.raises(EmptyGrid):
            check(IdentityCheck("thm-eq-Eq", 0.5, grid=grid))

    def test_prefiltered_points_are_recorded(self):
        grid = (0.4 + 0.2j, 2.0 + 1.0j)
        rep = check(IdentityCheck("thm-eq-Eq", 0.5, grid=grid))
        assert rep.passed
        assert rep.n_evaluated == 1
        assert rep.n_skipped == 1
        skipped = [p for p in rep.points if p.skipped][0]
        assert "|x|" in skipped.reason

    def test_runtime_domain_errors_become_skips_and_block_pass(self):
        # aq/b = q^-1 makes a lower parameter of the connection side land in
        # q^(-N); every point dies at evaluation time, none silently passes
        rep = check(
            IdentityCheck("watson", 0.5, abc=(2.0, 2.0 * 0.5**2, 0.5))
        )
        assert rep.n_evaluated == 0
        assert not rep.passed
        assert all(p.skipped for p in rep.points)
        assert any("q^(-N)" in (p.reason or "") for p in rep.points)

    def test_exclusion_spiral_points_skipped(self):
        lam = 0.7
        grid = (1.3 + 0.2j, -lam * 0.5**2)
        rep = check(IdentityCheck("thm-2f0", 0.5, lam=lam, grid=grid))
        assert rep.n_evaluated == 1
        assert rep.n_skipped == 1

    def test_mutation_is_detected(self):
        rep = check(
            IdentityCheck("thm-2f0", 0.5, lam=0.7),
            mutations=frozenset({"drop-one-minus-q"}),
        )
        assert not rep.passed
        assert rep.max_rel_err > 1e-3

    def test_condition_recorded(self):
        rep = check(IdentityCheck("thm-ramanujan-qairy", 0.5))
        assert all(p.condition >= 1.0 for p in rep.points if not p.skipped)

    def test_custom_tolerance_can_fail(self):
        rep = check(IdentityCheck("qde-ramanujan", 0.5, tol=1e-30))
        assert not rep.passed


class TestSuite:
    def test_empty_config(self):
        assert run_suite([]) == []

    def test_default_suite_composition(self):
        checks = default_suite()
        assert len(checks) == 3 * len(IDENTITY_IDS)
        assert {c.q for c in checks} == {0.3 + 0j, 0.5 + 0j, 0.8 + 0j}

    def test_default_suite_passes_at_half(self):
        reports = run_suite(default_suite(qs=(0.5,)))
        assert all(r.passed for r in reports)
        assert {r.identity for r in reports} == set(IDENTITY_IDS)


@pytest.fixture(scope="module")
def report():
    return check(IdentityCheck("thm-eq-Eq", 0.5))


class TestReportSerialization:
    def test_json_schema_keys(self, report):
        d = report.to_json_dict()
        assert list(d.keys()) == [
            "identity",
            "q",
            "lambda",
            "points",
            "max_rel_err",
            "pass",
            "trunc",
        ]
        assert d["q"] == {"re": 0.5, "im": 0.0}
        assert d["lambda"] is None
        assert d["trunc"] == {"eps": 1e-15, "n_max": 10000}
        point = d["points"][0]
        assert list(point.keys()) == [
            "x",
            "lhs",
            "rhs",
            "abs_err",
            "rel_err",
            "condition",
            "skipped",
            "reason",
        ]

    def test_json_round_trip_is_byte_identical(self, report):
        text = report.to_json()
        again = json.dumps(json.loads(text), separators=(",", ":"))
        assert again == text

    def test_csv_columns(self, report):
        lines = report.to_csv().splitlines()
        assert lines[0] == (
            "x_re,x_im,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,"
            "condition,skipped,reason"
        )
        assert len(lines) == 1 + len(report.points)

    def test_deterministic(self):
        a = check(IdentityCheck("ismail-zhang", 0.5)).to_json()
        b = check(IdentityCheck("ismail-zhang", 0.5)).to_json()
        assert a == b

    def test_pass_iff_max_under_tol(self, report):
        assert report.passed == (
            report.max_rel_err <= report.tol and report.n_evaluated >= 1
        )


class TestPerIdentitySpotChecks:
    def test_thm_ramanujan_qairy_single_point(self):
        rep = check(IdentityCheck("thm-ramanujan-qairy", 0.5, grid=(1.0,)))
        assert rep.passed
        p = rep.points[0]
        assert p.rel_err < 1e-10
        # lhs is the entire series at -q^3
        from qconnect import ramanujan_Aq

        assert abs(p.lhs - ramanujan_Aq(0.25, -0.125)) < 1e-14

    def test_watson_reference_point(self):
        rep = check(
            IdentityCheck("watson", 0.5, abc=(-4, 3, 0.5), grid=(0.8 + 0j,))
        )
        assert rep.passed
        assert rep.points[0].rel_err < 1e-9

    def test_qde_theta_uses_disjoint_paths(self):
        rep = check(IdentityCheck("qde-theta", 0.5))
        assert rep.passed

    def test_residue_lemma_point_count(self):
        rep = check(IdentityCheck("residue-lemma", 0.5))
        # two anchors, k = 0..5 by quadrature plus k = 0..8 by products
        assert len(rep.points) == 2 * (6 + 9)

    def test_operational_lemma_runs_all_pairs(self):
        rep = check(IdentityCheck("operational-lemma", 0.5))
        assert len(rep.points) == 36
        assert rep.passed
