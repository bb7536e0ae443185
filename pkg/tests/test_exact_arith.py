import pickle
import random
from fractions import Fraction

import pytest
import sympy

from src.errors import InvalidParametersError
from src.exact_arith import (ExtScalar, MultiPoly, Symbol, ext_arith, parse_rational,
                             rational_sqrt, reduce_A, substitute)


alpha, beta, gamma, omega = (MultiPoly.symbol(s) for s in ('alpha', 'beta', 'gamma', 'omega'))
a2 = MultiPoly.symbol('a2')
A = ExtScalar.symbol(Symbol.A)


def test_zero_coefficients_are_pruned():
    p = alpha * 3 + beta
    assert (p - p).is_zero()
    assert len(p + (-beta)) == 1


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        MultiPoly.constant(0.5)


def test_symbol_parse_accepts_greek_and_ascii():
    assert Symbol.parse('γ') is Symbol.GAMMA
    assert Symbol.parse('lambda') is Symbol.LAMBDA
    with pytest.raises(InvalidParametersError):
        Symbol.parse('delta')


def test_canonical_text_order():
    p = gamma * a2 ** 3 * 2 + alpha * a2 ** 2 * 24 + beta * a2 ** 2 * 12 + omega * a2 * 720
    assert p.to_text() == '2*gamma*a2^3 + 24*alpha*a2^2 + 12*beta*a2^2 + 720*omega*a2'
    assert (a2 * Fraction(-1, 3) + 1).to_text() == '-1/3*a2 + 1'


def test_degree_and_coefficient_extraction():
    p = gamma * a2 ** 3 * 2 + alpha * a2 ** 2 * 24 + omega * a2 * 720
    assert p.degree_in('a2') == 3
    assert p.coefficient_in('a2', 2) == alpha * 24
    assert p.coefficient_in('a2', 0).is_zero()


def test_from_terms_sums_repeats():
    p = MultiPoly.from_terms([({Symbol.ALPHA: 1}, 2), ({Symbol.ALPHA: 1}, 3), ({}, 1)])
    assert p == alpha * 5 + 1


def test_products_match_sympy():
    a, b, g, w = sympy.symbols('alpha beta gamma omega')
    ours = (alpha + beta * 2 - gamma * omega * Fraction(3, 7)) ** 3 * (alpha - omega)
    expected = sympy.expand((a + 2 * b - sympy.Rational(3, 7) * g * w) ** 3 * (a - w))
    point = {Symbol.ALPHA: Fraction(2, 3), Symbol.BETA: Fraction(-5), Symbol.GAMMA: Fraction(7, 2),
             Symbol.OMEGA: Fraction(1, 9)}
    value = expected.subs({a: sympy.Rational(2, 3), b: -5, g: sympy.Rational(7, 2),
                           w: sympy.Rational(1, 9)})
    assert ours.evaluate(point) == Fraction(str(value))


def test_A_satisfies_its_relation():
    relation = A * (ExtScalar(alpha) * 4 + ExtScalar(beta) * 2) - ExtScalar(gamma * omega * 40)
    assert A * A == relation
    assert reduce_A(MultiPoly.symbol('A') ** 2).degree_in('A') == 1


def test_inverse_and_division():
    x = A + ExtScalar(alpha)
    assert x * x.inverse() == 1
    assert (x / x) == 1
    with pytest.raises(ZeroDivisionError):
        ExtScalar(1) / ExtScalar(0)


def test_ext_arith_by_name():
    g, w = ExtScalar(gamma), ExtScalar(omega)
    expected = (ExtScalar(alpha) * 4 + ExtScalar(beta) * 2 - A) / (g * w * 40)
    assert ext_arith(1, A, 'div') == expected
    assert ext_arith(A, 0, 'add') == A
    assert ext_arith(A * -3 / g, w * -120 / A, 'mul') == w * 360 / g
    assert ext_arith(A, A, 'sub').is_zero()
    with pytest.raises(ZeroDivisionError):
        ext_arith(A, 0, 'div')
    with pytest.raises(InvalidParametersError):
        ext_arith(A, A, 'pow')


def test_conjugate_is_the_other_root():
    other = A.conjugate()
    assert other == ExtScalar(alpha) * 4 + ExtScalar(beta) * 2 - A
    assert A * other == ExtScalar(gamma * omega * 40)
    assert other.conjugate() == A


def test_substitute_binds_A_at_a_root():
    # sk: alpha = beta = gamma = 5, omega = 1, A = 20
    bindings = {'alpha': 5, 'beta': 5, 'gamma': 5, 'omega': 1, 'A': 20}
    value = (A * A - A * 3).substitute(bindings)
    assert value.is_constant()
    assert value.to_fraction() == 340


def test_substitute_rejects_non_root():
    with pytest.raises(InvalidParametersError):
        A.substitute({'alpha': 5, 'beta': 5, 'gamma': 5, 'omega': 1, 'A': 21})


def test_substitute_rejects_parameters_with_free_A():
    with pytest.raises(InvalidParametersError):
        substitute(MultiPoly.symbol('A') * alpha, {'alpha': 2})


def test_substitute_with_rational_functions():
    k = ExtScalar.symbol(Symbol.K)
    value = substitute(a2 * a2 + a2, {'a2': k / 2})
    assert value == k * k / 4 + k / 2


def test_evaluate_is_exact_for_fractions():
    p = alpha * Fraction(1, 3) + beta
    assert p.evaluate({'alpha': 1, 'beta': Fraction(1, 6)}) == Fraction(1, 2)
    assert isinstance(p.evaluate({'alpha': 1.0, 'beta': 0.5}), float)


def test_ext_scalar_pickles():
    x = (A + 3) / ExtScalar(gamma)
    assert pickle.loads(pickle.dumps(x)) == x


def test_ext_scalar_is_immutable():
    with pytest.raises(AttributeError):
        A.num = MultiPoly.zero()


@pytest.mark.parametrize('text, expected', [
    ('3/4', Fraction(3, 4)),
    ('-2', Fraction(-2)),
    (' 10 / 4 ', Fraction(5, 2)),
])
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize('text', ['0.5', '1/0', 'abc', ''])
def test_parse_rational_rejects(text):
    with pytest.raises(InvalidParametersError):
        parse_rational(text)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(2) is None
    assert rational_sqrt(-1) is None


def test_reduce_A_cube():
    A_poly = MultiPoly.symbol('A')
    trace = alpha * 2 + beta
    cube = reduce_A(A_poly ** 3)
    assert cube == (trace * trace * 4 - gamma * omega * 40) * A_poly - gamma * omega * trace * 80
    assert reduce_A(cube) == cube


def random_root_point(rng):
    """Rational (α, β, γ, ω, A) with A a root of its own relation"""
    while True:
        a, b, g, r = (Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(4))
        s = 2 * a + b
        if g == 0 or s * s == r * r:
            continue
        return {'alpha': a, 'beta': b, 'gamma': g,
                'omega': (s * s - r * r) / (40 * g), 'A': s + r}


def random_element(rng):
    A_poly = MultiPoly.symbol('A')
    c = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(4)]
    return ExtScalar(alpha * c[0] + A_poly * c[1] + omega * c[2] + c[3], gamma)


@pytest.mark.parametrize('seed', range(100))
def test_extension_arithmetic_commutes_with_evaluation(seed):
    rng = random.Random(seed)
    point = random_root_point(rng)
    x, y = random_element(rng), random_element(rng)
    xv, yv = (v.substitute(point).to_fraction() for v in (x, y))
    assert (x + y).substitute(point).to_fraction() == xv + yv
    assert (x - y).substitute(point).to_fraction() == xv - yv
    assert (x * y).substitute(point).to_fraction() == xv * yv
    if yv != 0 and y.conjugate().substitute(point).to_fraction() != 0:
        assert (x / y).substitute(point).to_fraction() == xv / yv
