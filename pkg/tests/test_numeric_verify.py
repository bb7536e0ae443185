import math
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

from src.errors import BranchError, InvalidParametersError
from src.families import PRINTED_SOLUTIONS, Branch, closed_form, printed_solution
from src.numeric_verify import (EPSILON_RATIO, GridSpec, ResidualChecker, branch_check_points,
                                branch_function, chain_derivatives, compare_methods,
                                constant_solution, eval_solution, fornberg_weights,
                                pde_residual_fd, pde_residual_riccati, perturb_speed,
                                riccati_branch_check, sample_points, stencil_half_width,
                                stencil_weights, traveling_wave_check, traveling_wave_report)
from src.riccati_calculus import PRESETS, FkdvParams


@pytest.fixture
def u6(sk):
    return printed_solution('u6', sk, -1)


@pytest.fixture
def small_grid():
    return GridSpec(t_values=(0.0, 1.0), nx=401)


def test_grid_validation():
    with pytest.raises(InvalidParametersError):
        GridSpec(nx=1)
    with pytest.raises(InvalidParametersError):
        GridSpec(x_min=1.0, x_max=1.0)
    with pytest.raises(InvalidParametersError):
        GridSpec(epsilon=0.0)
    assert GridSpec(t_values=[0, 1]).t_values == (0.0, 1.0)


def test_eval_u6_values(u6):
    field = eval_solution(u6, GridSpec(x_min=-1.0, x_max=1.0, nx=3))
    np.testing.assert_allclose(field.u[0], 8.0 - 12.0 * np.tanh([-1.0, 0.0, 1.0]) ** 2)
    assert field.masked_fraction == 0.0


def test_eval_masks_poles(sk):
    u1 = printed_solution('u1', sk, 1)
    field = eval_solution(u1, GridSpec(x_min=-1.0, x_max=1.0, nx=3))
    assert list(np.ma.getmaskarray(field.u)[0]) == [False, True, False]
    frame = field.to_frame()
    assert list(frame.columns) == ['x', 't', 'u', 'mask']
    assert frame['u'].isna().sum() == 1


def test_field_csv(u6, tmp_path):
    path = tmp_path / 'u6.csv'
    eval_solution(u6, GridSpec(nx=11, t_values=(0.0, 0.5))).to_csv(path)
    frame = pd.read_csv(path)
    assert len(frame) == 22
    assert frame['u'].max() <= 8.0


def test_chain_derivatives_match_the_profile(u6):
    xi = np.linspace(-2.0, 2.0, 5)
    v0, v1 = chain_derivatives(u6, xi)[:2]
    np.testing.assert_allclose(v0, u6.profile(xi))
    sech2 = 1.0 / np.cosh(xi) ** 2
    np.testing.assert_allclose(v1, -24.0 * np.tanh(xi) * sech2, atol=1e-12)


def test_riccati_residual_vanishes(u6, small_grid):
    report = pde_residual_riccati(u6, small_grid)
    assert report.method == 'riccati-chain'
    assert report.max_abs_residual < 1e-8
    assert report.passes()
    assert report.n_points == 802


def test_constant_solution_has_zero_residual(sk):
    report = pde_residual_riccati(constant_solution(3.0, sk), GridSpec(nx=51))
    assert report.max_abs_residual == 0.0
    fd = pde_residual_fd(constant_solution(0.0, sk), GridSpec(nx=51))
    assert fd.max_abs_residual <= 1e-12


def test_wrong_speed_is_detected(u6, small_grid):
    report = pde_residual_riccati(perturb_speed(u6, 1.0), small_grid)
    assert report.max_abs_residual >= 1.0
    assert not report.passes()


def test_finite_differences_agree_with_the_chain(u6, small_grid):
    fd = pde_residual_fd(u6, small_grid)
    assert fd.method == 'finite-difference'
    assert fd.max_abs_residual < 1e-2
    comparison = compare_methods(u6, small_grid)
    assert comparison.max_difference <= 1e-2
    assert comparison.within_envelope


def test_finite_difference_error_shrinks_with_h(u6):
    grid = GridSpec(x_min=-3.0, x_max=3.0, nx=121)
    coarse = compare_methods(u6, grid, h=0.1).max_difference
    fine = compare_methods(u6, grid, h=0.05).max_difference
    assert coarse / fine > 2 ** 6


def test_fd_masks_stencils_near_poles(sk):
    u9 = printed_solution('u9', sk, 1)
    fd = pde_residual_fd(u9, GridSpec(nx=401))
    chain = pde_residual_riccati(u9, GridSpec(nx=401))
    assert fd.masked_fraction > chain.masked_fraction
    assert chain.masked_fraction < 0.5


def test_traveling_wave_identity(u6):
    points = sample_points(u6, n=50, delta=0.3)
    assert points.shape == (50, 2)
    assert traveling_wave_check(u6, 0.0, points) == 0.0
    assert traveling_wave_check(u6, 0.3, points) <= 1e-10


def test_sample_points_avoid_poles(sk):
    u9 = printed_solution('u9', sk, 1)
    points = sample_points(u9, n=200, delta=0.3, clearance=0.3 * u9.pole_spacing, seed=7)
    xi = u9.xi(points[:, 0], points[:, 1])
    assert np.all(u9.pole_distance(xi) >= 0.3 * u9.pole_spacing)


def test_sample_clearance_shrinks_when_the_shift_leaves_no_room(sk):
    u1 = printed_solution('u1', sk, 1)
    # λδ = −4.8: no ξ keeps 0.3π from the poles at both times
    with pytest.raises(InvalidParametersError):
        sample_points(u1, n=100, delta=0.3, clearance=0.3 * u1.pole_spacing)
    points = sample_points(u1, n=100, delta=0.3)
    assert points.shape == (100, 2)
    floor = EPSILON_RATIO * u1.pole_spacing
    for t in (points[:, 1], points[:, 1] + 0.3):
        assert np.all(u1.pole_distance(u1.xi(points[:, 0], t)) >= floor)


def test_traveling_wave_scales_by_the_profile(ito):
    u9 = printed_solution('u9', ito, 1)
    report = traveling_wave_report(u9, 0.3, sample_points(u9, n=100, delta=0.3))
    assert report.scaled_deviation <= report.max_deviation
    assert report.passes()
    assert report.to_dict()['n_points'] == 100


def test_vanished_coefficient_never_meets_an_infinite_phi(sk):
    sol = closed_form(1, 'coth', -1, sk)
    assert sol.poles.offsets == ()
    field = eval_solution(sol, GridSpec(x_min=-1.0, x_max=1.0, nx=3))
    assert np.all(np.isfinite(field.u[0]))
    assert field.u[0][1] == pytest.approx(sol.a0)
    comparison = compare_methods(sol, GridSpec(x_min=-1.0, x_max=1.0, nx=21))
    assert np.isfinite(comparison.max_difference)
    assert comparison.within_envelope


def test_absolute_gap_is_reported_for_pole_free_solutions(sk, u6, small_grid):
    comparison = compare_methods(u6, small_grid)
    assert comparison.pole_free
    assert comparison.absolute_within_envelope is True
    u9 = compare_methods(printed_solution('u9', sk, 1), GridSpec(nx=401))
    assert not u9.pole_free
    assert u9.absolute_within_envelope is None
    assert u9.to_dict()['absolute_within_envelope'] is None


def test_fornberg_weights():
    assert fornberg_weights(1, (-1, 0, 1)) == (Fraction(-1, 2), 0, Fraction(1, 2))
    assert fornberg_weights(2, (-1, 0, 1)) == (1, -2, 1)
    assert fornberg_weights(1, (0, 1)) == (-1, 1)
    with pytest.raises(InvalidParametersError):
        fornberg_weights(3, (-1, 0, 1))


def test_eighth_order_first_derivative():
    offsets, weights = stencil_weights(1, 8)
    assert offsets == (-4, -3, -2, -1, 0, 1, 2, 3, 4)
    assert weights[5:] == (Fraction(4, 5), Fraction(-1, 5), Fraction(4, 105), Fraction(-1, 280))


@pytest.mark.parametrize('derivative', [1, 2, 3, 4, 5])
def test_stencil_moments(derivative):
    offsets, weights = stencil_weights(derivative, 8)
    for power in range(derivative + 8):
        moment = sum(w * Fraction(o) ** power for o, w in zip(offsets, weights))
        expected = math.factorial(derivative) if power == derivative else 0
        assert moment == expected


def test_stencil_half_widths():
    assert [stencil_half_width(d, 8) for d in range(1, 6)] == [4, 4, 5, 5, 6]
    with pytest.raises(InvalidParametersError):
        stencil_half_width(1, 3)


@pytest.mark.parametrize('branch, k', [
    ('tan', 1.0), ('cot', 1.0), ('tanh', -1.0), ('coth', -1.0), ('rational', 0.0), ('tan', 0.25),
])
def test_branches_solve_the_riccati_equation(branch, k):
    xi = branch_check_points(branch, k)
    assert riccati_branch_check(branch, k, xi) <= 1e-10


def test_branch_function_singular_sets():
    phi, blow_up, vanish = branch_function('cot', 1.0)
    assert blow_up.offsets == (0.0,)
    assert vanish.offsets == (pytest.approx(np.pi / 2),)
    assert phi(np.array([np.pi / 2]))[0] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(BranchError):
        branch_function(Branch.TANH, 1.0)


def test_checker_report(u6):
    result = ResidualChecker(grid=GridSpec(t_values=(0.0, 1.0), nx=201), verbose=True).check(u6)
    assert result['passed']
    assert set(result) == {'solution', 'riccati_chain', 'finite_difference', 'comparison',
                           'traveling_wave', 'passed'}
    assert result['solution']['label'] == 'u6'


def test_checker_flags_wrong_speed(u6):
    result = ResidualChecker(grid=GridSpec(nx=201)).check(perturb_speed(u6, 0.5))
    assert not result['passed']


@pytest.mark.slow
@pytest.mark.parametrize('name', sorted(PRESETS))
def test_all_printed_solutions_pass(name):
    params = FkdvParams.from_preset(name)
    checker = ResidualChecker()
    for printed in PRINTED_SOLUTIONS:
        k = -1 if printed.branch.kind == 'hyperbolic' else 1
        result = checker.check(printed_solution(printed.label, params, k))
        assert result['passed'], (printed.label, result)


@pytest.mark.slow
def test_coth_branch_family(kk):
    sol = closed_form(1, 'coth', -1, kk)
    assert ResidualChecker(grid=GridSpec(nx=801)).check(sol)['passed']
