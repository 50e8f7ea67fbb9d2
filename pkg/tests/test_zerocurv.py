import pytest

from lagrax.jetalg import I, Poly, jet
from lagrax.zerocurv import (
    CORRECTIONS,
    InconsistentRulesError,
    MissingRuleError,
    SpectralMatrix,
    constraint_probe,
    curvature,
    ds_instantiate,
    ds_rules_t,
    ds_rules_y,
    ds_verify,
    graded_residuals,
    lam,
    mutation_suite,
    perturb_u_t,
    printed_matrices,
    prolong,
    run_mutations,
)

L = lam()
Z = Poly()


def test_translation_rule_prolongs():
    # [DERIVED] chain rule by hand
    # variables x=0, t=1
    R = prolong({(0, 1): jet(0, 1)})
    assert R.reduce(jet(0, 2, 1)) == jet(0, 3)
    assert R.reduce(jet(0, 0, 2)) == jet(0, 2)


def test_empty_rules_leave_expressions_alone():
    # [TRIVIAL]
    p = jet(0, 1, 1) * jet(1)
    assert prolong({}).reduce(p) == p


def test_ds_rules_prolong_consistently():
    # [DERIVED] mixed partials commute
    R = prolong(ds_rules_t().merged(ds_rules_y()))
    assert len(R) == 12


def test_inconsistent_rules_are_reported():
    # [DERIVED] mixed partials differ
    u, ux = jet(0), jet(0, 1)
    with pytest.raises(InconsistentRulesError) as exc:
        prolong({(0, 1): u, (0, 2): u * ux})
    assert exc.value.mismatches[0][:3] == (0, 1, 2)


def test_constant_diagonal_pair():
    # [DERIVED] commuting constants
    U = SpectralMatrix([[L, Z], [Z, -L]])
    W = SpectralMatrix([[Z, Z], [Z, Z]])
    assert curvature(U, W, 0, 1, {}) == W


def test_translation_flow_is_flat():
    # [DERIVED] translation pair
    u, v = jet(0), jet(1)
    U = SpectralMatrix([[L, u], [v, -L]])
    rules = {(0, 1): jet(0, 1), (1, 1): jet(1, 1)}
    M = curvature(U, U, 0, 1, rules)
    assert graded_residuals(M) == []


def test_missing_rule_is_an_error():
    # [TRIVIAL]
    U = SpectralMatrix([[L, jet(0)], [jet(1), -L]])
    W = SpectralMatrix([[Z, Z], [Z, Z]])
    with pytest.raises(MissingRuleError, match="ub"):
        curvature(U, W, 0, 1, {(0, 1): jet(0, 1)}, ["u", "ub"])


def test_printed_entries():
    # [PAPER] printed matrices
    U, V, W = printed_matrices()
    f1, g1 = jet(2), jet(4)
    assert W[0, 0] == I * (L**2 + f1 * g1)
    assert V[2, 2] == Z
    assert U[0, 1] == jet(0)


def test_x_y_pair_is_flat_under_y_rules():
    # [PAPER] Davey-Stewartson x-y pair
    d = ds_instantiate()
    M = curvature(d.U, d.V, 0, 1, d.rules_y)
    assert graded_residuals(M) == []


def test_ds_certificate():
    # [PAPER] Davey-Stewartson
    rep = ds_verify()
    assert rep.ok and rep.residuals == []
    assert list(rep.notes) == list(CORRECTIONS)


def test_printed_data_fails():
    # [PAPER] printed matrices with known misprints
    rep = ds_verify(ds_instantiate(printed=True))
    assert not rep.ok
    assert any(r.pair == "x-t" for r in rep.residuals)


def test_mutations_are_all_detected():
    # [DERIVED] single edit faults
    assert len(mutation_suite()) >= 10
    results = run_mutations()
    assert len({name for name, _ in results}) == len(results)
    assert all(detected for _, detected in results)


def test_perturbed_u_t_is_localized_in_first_row():
    # [DERIVED] where u_t enters
    rep = ds_verify(perturb_u_t())
    assert rep.residuals
    assert {r.row for r in rep.residuals} == {1}


def test_constraints_are_needed():
    # [DERIVED] constraint probe
    probe = constraint_probe()
    assert [(row, name) for row, name, _ in probe] == [(1, "i*C1"), (2, "i*C2"), (3, "-i*(C1+C2)")]
    assert all(value for _, _, value in probe)


def test_lambda_degree():
    # [TRIVIAL]
    d = ds_instantiate()
    assert d.U.lam_degree() == 1 and d.W.lam_degree() == 2
