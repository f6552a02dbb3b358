import json

import pytest

from pg3 import audit
from pg3.audit import NotAFailure, REGISTRY, all_passed, default_families, replay, run_audit
from pg3.family import LineFamily, perturb

from conftest import geometry, secants

REGISTRY_NAMES = [
    "P1", "P2", "P2a", "P2b", "lem-plane-point", "both-plane-types-exist", "cor-plane", "cor-plane-1",
    "size-a_pi", "cor-pole", "points-l", "cor-arc", "recall", "lem-oval", "size-alpha-beta", "lem-black",
    "coro-lem-black", "coro-black", "lem-black-secant", "eq-4", "lem-black-tangent", "eq-5", "eq-6",
    "0-1-2-q+1", "lem-size-H", "bose-burton-plane", "exis-line", "to-use", "pole-inters", "black-line-3",
    "black-line-2", "size-S-H", "GQ-axioms", "two-rulings", "hyperbolic", "final-lemma",
]


@pytest.fixture(scope="module")
def audit3():
    return run_audit(3)


def test_registry_order():
    assert [l.name for l in REGISTRY] == REGISTRY_NAMES
    assert len(set(REGISTRY_NAMES)) == len(REGISTRY_NAMES)


def test_q3_all_pass(audit3):
    assert all_passed(audit3)
    assert all(c.cases_checked > 0 for c in audit3)
    assert [c.name for c in audit3] == REGISTRY_NAMES


def test_q3_case_counts(audit3):
    by = {c.name: c for c in audit3}
    families = 11
    # one case per tangent plane: 16 tangent planes per family
    assert by["size-a_pi"].cases_checked == 16 * families
    assert by["P1"].cases_checked == 40 * families
    assert by["P2"].cases_checked == 40 * families


def test_scope_and_json(audit3):
    c = audit3[0]
    assert c.scope == "q=3 families=11 exhaustive"
    js = c.to_json()
    assert js["name"] == "P1" and js["status"] == "pass" and js["counterexample"] == {}
    json.dumps([x.to_json() for x in audit3], sort_keys=True)


def test_q5_all_pass():
    checks = run_audit(5, seeds=2)
    assert all_passed(checks)


def test_perturbed_family_fails_with_replay(s3):
    fam = perturb(s3, 1, 7)
    checks = run_audit(geometry(3), [fam])
    failed = [c for c in checks if c.status == "fail"]
    assert failed and failed[0].name == "P1"
    text = replay(failed[0], fam)
    assert "point 7" in text and "violated:" in text


def test_replay_lem_plane_point(s3):
    fam = perturb(s3, 1, 7)
    c = next(c for c in run_audit(geometry(3), [fam]) if c.name == "lem-plane-point")
    assert c.status == "fail"
    text = replay(c, fam)
    assert "line 7 = points" in text
    assert "tangent planes vs black points" in text
    assert "2 == 1 is False" in text


def test_replay_points_l(s3):
    fam = perturb(s3, 1, 5)
    c = next(c for c in run_audit(geometry(3), [fam]) if c.name == "points-l")
    assert c.status == "fail"
    text = replay(c, fam)
    assert "line 2 = points" in text
    assert "[1, 1, 1] in [(2, 2, 0), (3, 0, 1)] is False" in text


def test_replay_passing_check(audit3, s3):
    with pytest.raises(NotAFailure):
        replay(audit3[0], s3)


def test_vacuous_check_fails(g3):
    # the empty family has no tangent planes, so tangent-plane lemmas see zero cases
    checks = run_audit(g3, [LineFamily.empty(g3)])
    c = next(c for c in checks if c.name == "size-a_pi")
    assert (c.status, c.cases_checked) == ("fail", 0)
    assert c.counterexample["message"] == "vacuous: no cases checked"


def test_threads_do_not_change_result(g3):
    fams = default_families(g3, 3) + [perturb(secants(3), 2, 1)]
    a = [c.to_json() for c in run_audit(g3, fams, threads=1)]
    b = [c.to_json() for c in run_audit(g3, fams, threads=4)]
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_geometry_mismatch(g3):
    with pytest.raises(audit.GeometryMissing):
        run_audit(g3, [secants(5)])


def test_sampling_threshold():
    assert audit.sampled_planes(geometry(9)) is None
    assert audit.SAMPLE_FROM_Q == 11


def test_format_checks(audit3):
    first = audit.format_checks(audit3).splitlines()[0]
    assert first.startswith("PASS P1") and "cases=440" in first
