from fractions import Fraction

import numpy as np
import pytest

from src.errors import InvalidParametersError, NoRealSolutionError
from src.restricted_solver import (RestrictedSolver, attribute, family_table_values, scale_tuple,
                                   solve_many, solve_restricted, solve_restricted_exact)
from src.riccati_calculus import PRESETS, FkdvParams


def find(tuples, expected, tol=1e-12):
    for t in tuples:
        if np.allclose(t.as_floats(), [float(v) for v in expected], rtol=tol, atol=tol):
            return t
    return None


def test_sk_contains_the_tanh_soliton(sk):
    tuples = solve_restricted(sk, -1)
    found = find(tuples, (8, -12, 0, -16))
    assert found is not None
    assert found.exact
    assert (found.a0, found.a2, found.b2, found.lam) == (8, -12, 0, -16)
    assert (3, 'principal') in found.families
    assert found.residual_norm == 0.0


def test_sk_keeps_the_conjugate_root_families(sk):
    tuples = solve_restricted(sk, -1)
    found = find(tuples, (4, -6, 0, 4))
    assert found is not None
    assert found.exact
    assert {(4, 'principal'), (3, 'conjugate')} <= set(found.families)
    assert len(tuples) == len(family_table_values(sk, -1))


def test_completion_survives_a_vanishing_a0_slope(sk):
    solver = RestrictedSolver(sk)
    k, a2, b2 = Fraction(-1), Fraction(-6), Fraction(0)
    # the next-highest equation carries no a0 at this a2 root
    rows = solver._rows(k, a2, b2)
    row = rows[solver.restricted.powers().index(5)]
    assert all(c == 0 for c in row[1:-1])
    candidates = solver._complete(k, a2, b2, exact=True)
    assert (4, -6, 0, 4) in candidates


def test_free_a0_curve_at_sk(sk):
    solver = RestrictedSolver(sk)
    k = Fraction(-1)
    # λ = −5a0² + 40a0 − 76 along the whole line a2 = −6, b2 = 0
    for a0 in (4, 8, Fraction(1, 2)):
        lam = -5 * Fraction(a0) ** 2 + 40 * a0 - 76
        assert solver._residual_norm(k, Fraction(a0), Fraction(-6), Fraction(0), lam, True) == 0
    assert solver._residual_norm(k, Fraction(8), Fraction(-6), Fraction(0), Fraction(4), True) > 0


@pytest.mark.parametrize('name', ['sk', 'lax', 'cdg'])
def test_second_a2_root_is_solved(name):
    params = FkdvParams.from_preset(name)
    tuples = solve_restricted(params, -1)
    assert len(tuples) >= 6
    for row in family_table_values(params, -1):
        assert find(tuples, row, tol=1e-10) is not None


def test_float_path_agrees_with_exact(sk):
    exact = solve_restricted(sk, -1)
    floating = solve_restricted(sk, -1.0)
    assert len(exact) == len(floating)
    for t in floating:
        assert not t.exact
        assert t.residual_norm <= 1e-9
        assert find(exact, t.as_floats(), tol=1e-10) is not None


def test_scaling_law(sk):
    scaled = scale_tuple((8, -12, 0, -16), 2)
    assert scaled == (32, -12, 0, -256)
    assert find(solve_restricted(sk, -4), scaled) is not None


def test_every_tuple_is_a_family(kk):
    tuples = solve_restricted(kk, -1)
    assert len(tuples) >= 6
    table = family_table_values(kk, -1)
    for t in tuples:
        assert t.families
        assert any(np.allclose(t.as_floats(), row, rtol=1e-12, atol=1e-12) for row in table)


def test_solver_rejects_bad_inputs(sk):
    with pytest.raises(InvalidParametersError):
        solve_restricted(sk, 0)
    with pytest.raises(InvalidParametersError):
        RestrictedSolver(FkdvParams.symbolic())
    with pytest.raises(InvalidParametersError):
        solve_restricted_exact(sk, -1.0)


def test_exact_cascade_needs_a_square_discriminant():
    with pytest.raises(InvalidParametersError):
        solve_restricted_exact(FkdvParams.custom(2, 1, 1, '1/10'), -1)


def test_irrational_A_falls_back_to_floats():
    params = FkdvParams.custom(2, 1, 1, '1/10')
    tuples = solve_restricted(params, -1)
    assert tuples
    assert not any(t.exact for t in tuples)
    assert all(t.families for t in tuples)


def test_negative_discriminant_has_no_real_solution():
    params = FkdvParams.custom(1, 1, 1, 1)
    with pytest.raises(NoRealSolutionError):
        solve_restricted(params, 1)
    with pytest.raises(NoRealSolutionError):
        solve_restricted(params, 1.0)


def test_attribute_is_idempotent(sk):
    untagged = solve_restricted_exact(sk, Fraction(-1, 4))[0]
    tagged = attribute(untagged, sk, Fraction(-1, 4))
    assert tagged.families == untagged.families


def test_to_dict_carries_exact_text(sk):
    found = find(solve_restricted(sk, -1), (8, -12, 0, -16))
    record = found.to_dict()
    assert record['exact_values']['lambda'] == '-16'
    assert record['families'][0]['family'] in (3, 4)


def test_solve_many_keeps_job_order(sk, ito):
    results = solve_many([(sk, -1), (ito, 1)], n_jobs=1)
    assert [(label, k) for label, k, _ in results] == [('sk', -1), ('ito', 1)]
    assert find(results[1][2], (-20, -30, 0, -96)) is not None


@pytest.mark.slow
@pytest.mark.parametrize('name', sorted(PRESETS))
@pytest.mark.parametrize('k', [-2, -1, Fraction(-1, 4), Fraction(1, 4), 1])
def test_cascade_matches_family_table(name, k):
    params = FkdvParams.from_preset(name)
    tuples = solve_restricted(params, k)
    expected = family_table_values(params, k)
    assert len(tuples) == len(expected)
    for row in expected:
        assert find(tuples, row) is not None
