"""
Exact Arithmetic
Multivariate polynomials over the rationals and the quadratic extension adjoining A
"""

from __future__ import annotations

import operator
import re
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from sympy import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring

from src.errors import InvalidParametersError


SYMBOL_NAMES = ('alpha', 'beta', 'gamma', 'omega', 'k', 'lambda',
                'a0', 'a1', 'a2', 'b1', 'b2', 'A')


class Symbol(IntEnum):
    """The closed symbol universe; each value is a slot in an exponent vector"""

    ALPHA = 0
    BETA = 1
    GAMMA = 2
    OMEGA = 3
    K = 4
    LAMBDA = 5
    A0 = 6
    A1 = 7
    A2 = 8
    B1 = 9
    B2 = 10
    A = 11

    @property
    def text(self):
        return SYMBOL_NAMES[self]

    @classmethod
    def parse(cls, value):
        """Accept a Symbol, its ASCII name or its Greek letter"""
        if isinstance(value, Symbol):
            return value
        try:
            return _NAME_TO_SYMBOL[value]
        except KeyError:
            raise InvalidParametersError(f"Unknown symbol: {value!r}") from None


_NAME_TO_SYMBOL = {name: Symbol(i) for i, name in enumerate(SYMBOL_NAMES)}
_NAME_TO_SYMBOL.update({'α': Symbol.ALPHA, 'β': Symbol.BETA, 'γ': Symbol.GAMMA,
                        'ω': Symbol.OMEGA, 'λ': Symbol.LAMBDA})

NVARS = len(SYMBOL_NAMES)
ZERO_EXPONENTS = (0,) * NVARS
PARAMETERS = (Symbol.ALPHA, Symbol.BETA, Symbol.GAMMA, Symbol.OMEGA)
UNKNOWNS = (Symbol.K, Symbol.LAMBDA, Symbol.A0, Symbol.A1, Symbol.A2, Symbol.B1, Symbol.B2)


def _unit_exponents(symbol, power=1):
    exps = [0] * NVARS
    exps[symbol] = power
    return tuple(exps)


def _as_exponents(exps):
    """Normalize an exponent vector given as a tuple or a {Symbol: power} dict"""
    if isinstance(exps, dict):
        vector = [0] * NVARS
        for symbol, power in exps.items():
            vector[Symbol.parse(symbol)] += int(power)
        exps = vector
    exps = tuple(int(e) for e in exps)
    if len(exps) != NVARS or any(e < 0 for e in exps):
        raise ValueError(f"Invalid exponent vector: {exps}")
    return exps


def _as_fraction(value):
    if isinstance(value, float):
        raise TypeError("Floats are not exact; pass an int, Fraction or 'p/q' text")
    return Fraction(value)


def _fraction_text(value):
    return str(value)


RING = ring(','.join(SYMBOL_NAMES), QQ, grlex)[0]


def _qq(value):
    value = _as_fraction(value)
    return QQ(value.numerator, value.denominator)


def _fraction(coeff):
    return Fraction(int(coeff.numerator), int(coeff.denominator))


class MultiPoly:
    """
    Polynomial in the fixed symbols with exact rational coefficients

    Backed by an element of the sympy polynomial ring QQ[alpha, ..., A] in
    graded lexicographic order; coefficients cross the boundary as Fractions.
    """

    __slots__ = ('_poly',)

    def __init__(self, terms=None):
        """
        Build a polynomial, pruning zero coefficients

        Args:
            terms: mapping of exponent vectors (tuples or {Symbol: power} dicts)
                to int/Fraction coefficients
        """
        clean = {}
        for exps, coeff in dict(terms or {}).items():
            exps = _as_exponents(exps)
            clean[exps] = clean.get(exps, 0) + _as_fraction(coeff)
        self._poly = RING.from_dict({exps: _qq(c) for exps, c in clean.items() if c})

    @classmethod
    def _wrap(cls, poly):
        out = cls.__new__(cls)
        out._poly = poly
        return out

    @classmethod
    def _raw(cls, terms):
        return cls._wrap(RING.from_dict({exps: _qq(c) for exps, c in terms.items() if c}))

    @classmethod
    def zero(cls):
        return cls._wrap(RING.zero)

    @classmethod
    def constant(cls, value):
        return cls._wrap(RING.ground_new(_qq(value)))

    @classmethod
    def symbol(cls, symbol, power=1):
        return cls._wrap(RING.gens[Symbol.parse(symbol)] ** power)

    @classmethod
    def from_terms(cls, pairs):
        """Polynomial from (exponents, coefficient) pairs, repeats summed"""
        out = cls.zero()
        for exps, coeff in pairs:
            out = out + cls({_as_exponents(exps): coeff})
        return out

    def __reduce__(self):
        return (_rebuild_poly, (tuple(self._items()),))

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------

    def _items(self):
        """(exponents, Fraction) pairs in no particular order"""
        return ((tuple(exps), _fraction(c)) for exps, c in self._poly.items())

    def terms(self):
        """(exponents, coefficient) pairs in graded lexicographic order, highest first"""
        if not self._poly:
            return []
        return [(tuple(exps), _fraction(c)) for exps, c in self._poly.terms()]

    def __iter__(self):
        return iter(self.terms())

    def __len__(self):
        return len(self._poly)

    def is_zero(self):
        return not self._poly

    def is_constant(self):
        return self._poly.is_ground

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"Not a constant polynomial: {self.to_text()}")
        return _fraction(self._poly.get(ZERO_EXPONENTS, QQ.zero))

    def total_degree(self):
        return max((sum(exps) for exps in self._poly), default=0)

    def degree_in(self, symbol):
        symbol = Symbol.parse(symbol)
        return max((exps[symbol] for exps in self._poly), default=0)

    def symbols(self):
        return {Symbol(i) for exps in self._poly for i, e in enumerate(exps) if e}

    def coefficient_in(self, symbol, degree):
        """Coefficient polynomial of symbol**degree"""
        symbol = Symbol.parse(symbol)
        return MultiPoly._wrap(RING.from_dict({
            exps[:symbol] + (0,) + exps[symbol + 1:]: coeff
            for exps, coeff in self._poly.items() if exps[symbol] == degree}))

    def leading_coefficient(self):
        if not self._poly:
            return Fraction(0)
        return _fraction(self._poly.LC)

    def monomial_gcd(self):
        """Componentwise minimum exponent over all terms"""
        if not self._poly:
            return ZERO_EXPONENTS
        return tuple(min(column) for column in zip(*self._poly.keys()))

    def content(self):
        """Positive rational content: gcd of numerators over lcm of denominators"""
        coeffs = [_fraction(c) for c in self._poly.values()]
        if not coeffs:
            return Fraction(0)
        num_gcd = 0
        den_lcm = 1
        for c in coeffs:
            num_gcd = gcd(num_gcd, abs(c.numerator))
            den_lcm = den_lcm * c.denominator // gcd(den_lcm, c.denominator)
        return Fraction(num_gcd, den_lcm)

    def divide_monomial(self, exps):
        exps = tuple(exps)
        if any(min(a - b for a, b in zip(term, exps)) < 0 for term in self._poly):
            raise ValueError("Monomial does not divide every term")
        return MultiPoly._wrap(RING.from_dict({
            tuple(a - b for a, b in zip(term, exps)): coeff for term, coeff in self._poly.items()}))

    def scale(self, factor):
        return MultiPoly._wrap(self._poly.mul_ground(_qq(factor)))

    # ------------------------------------------------------------------
    # Ring operations
    # ------------------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(other)
        if isinstance(other, Symbol):
            return MultiPoly.symbol(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return MultiPoly._wrap(self._poly + other._poly)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._wrap(-self._poly)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return MultiPoly._wrap(self._poly - other._poly)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return MultiPoly._wrap(other._poly - self._poly)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return MultiPoly._wrap(self._poly * other._poly)

    __rmul__ = __mul__

    def __pow__(self, power):
        if not isinstance(power, int) or power < 0:
            raise ValueError("MultiPoly powers must be non-negative integers")
        return MultiPoly._wrap(self._poly ** power)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._poly == other._poly

    def __hash__(self):
        return hash(frozenset(self._poly.items()))

    # ------------------------------------------------------------------
    # Evaluation and display
    # ------------------------------------------------------------------

    def term_values(self, values):
        """
        Value of every term at the given symbol values

        Args:
            values: mapping Symbol (or name) -> number or numpy array; every
                symbol occurring in the polynomial must be present

        Returns:
            List of term values in canonical term order
        """
        values = {Symbol.parse(s): v for s, v in values.items()}
        exact = all(isinstance(v, (int, Fraction)) for v in values.values())
        cast = Fraction if exact else float
        out = []
        for exps, coeff in self.terms():
            term = cast(coeff)
            for i, e in enumerate(exps):
                if e:
                    try:
                        term = term * values[Symbol(i)] ** e
                    except KeyError:
                        raise InvalidParametersError(
                            f"No value supplied for symbol {SYMBOL_NAMES[i]}") from None
            out.append(term)
        return out

    def evaluate(self, values):
        terms = self.term_values(values)
        total = terms[0] if terms else 0
        for term in terms[1:]:
            total = total + term
        return total

    def to_text(self):
        """Canonical text, e.g. '2*gamma*a2^3 + 24*alpha*a2^2'"""
        if not self._poly:
            return '0'
        text = ''
        for index, (exps, coeff) in enumerate(self.terms()):
            factors = [name if e == 1 else f'{name}^{e}'
                       for name, e in zip(SYMBOL_NAMES, exps) if e]
            magnitude = abs(coeff)
            if not factors:
                body = _fraction_text(magnitude)
            elif magnitude == 1:
                body = '*'.join(factors)
            else:
                body = '*'.join([_fraction_text(magnitude)] + factors)
            if index == 0:
                text = ('-' if coeff < 0 else '') + body
            else:
                text += (' - ' if coeff < 0 else ' + ') + body
        return text

    __str__ = to_text

    def __repr__(self):
        return f"MultiPoly({self.to_text()!r})"


def _rebuild_poly(items):
    return MultiPoly._raw(dict(items))


def _as_poly(value):
    if isinstance(value, MultiPoly):
        return value
    if isinstance(value, Symbol):
        return MultiPoly.symbol(value)
    return MultiPoly.constant(value)


ONE_POLY = MultiPoly.constant(1)
A_POLY = MultiPoly.symbol(Symbol.A)
# A + A' and A·A' for the two roots of the minimal polynomial
TRACE_A = MultiPoly({_unit_exponents(Symbol.ALPHA): 4, _unit_exponents(Symbol.BETA): 2})
NORM_A = MultiPoly({_as_exponents({Symbol.GAMMA: 1, Symbol.OMEGA: 1}): 40})


@lru_cache(maxsize=None)
def _a_power(power):
    """(c, d) with A**power = c + d·A modulo the minimal polynomial"""
    low, high = ONE_POLY, MultiPoly.zero()
    for _ in range(power):
        low, high = -(NORM_A * high), low + TRACE_A * high
    return low, high


def reduce_A(p):
    """Rewrite A² = 2(2α+β)A − 40γω until the A-degree is at most one"""
    if p.degree_in(Symbol.A) <= 1:
        return p
    kept = {exps: c for exps, c in p._items() if exps[Symbol.A] <= 1}
    result = MultiPoly._raw(kept)
    for exps, coeff in p._items():
        power = exps[Symbol.A]
        if power <= 1:
            continue
        base = MultiPoly._raw({exps[:Symbol.A] + (0,): coeff})
        low, high = _a_power(power)
        result = result + base * (low + high * A_POLY)
    return result


def _conjugate_poly(p):
    """Apply A ↦ 2(2α+β) − A to a reduced polynomial"""
    p = reduce_A(p)
    low = p.coefficient_in(Symbol.A, 0)
    high = p.coefficient_in(Symbol.A, 1)
    return low + TRACE_A * high - high * A_POLY


def _normalize(num, den):
    """Divide out the common monomial and make den monic"""
    if num.is_zero():
        return MultiPoly.zero(), ONE_POLY
    if den == ONE_POLY:
        return num, den
    common = tuple(min(a, b) for a, b in zip(num.monomial_gcd(), den.monomial_gcd()))
    if any(common):
        num = num.divide_monomial(common)
        den = den.divide_monomial(common)
    lead = den.leading_coefficient()
    if lead != 1:
        num = num.scale(1 / lead)
        den = den.scale(1 / lead)
    return num, den


class ExtScalar:
    """Element num/den of the coefficient field Q(α, β, γ, ω, k, ...)(A)"""

    __slots__ = ('num', 'den')
    __hash__ = None

    def __init__(self, num=0, den=1):
        """
        Args:
            num: numerator (MultiPoly, Symbol, int or Fraction)
            den: denominator; any A it contains is rationalized away
        """
        num = reduce_A(_as_poly(num))
        den = reduce_A(_as_poly(den))
        if den.is_zero():
            raise ZeroDivisionError("ExtScalar denominator is zero")
        if den.degree_in(Symbol.A):
            conj = _conjugate_poly(den)
            num = reduce_A(num * conj)
            den = reduce_A(den * conj)
            if den.is_zero():
                raise ZeroDivisionError("Denominator is a zero divisor of the extension")
        num, den = _normalize(num, den)
        object.__setattr__(self, 'num', num)
        object.__setattr__(self, 'den', den)

    def __setattr__(self, name, value):
        raise AttributeError("ExtScalar is immutable")

    def __reduce__(self):
        return (_rebuild_ext, (self.num, self.den))

    @classmethod
    def _from_parts(cls, num, den):
        scalar = cls.__new__(cls)
        object.__setattr__(scalar, 'num', num)
        object.__setattr__(scalar, 'den', den)
        return scalar

    @classmethod
    def symbol(cls, symbol):
        return cls._from_parts(MultiPoly.symbol(symbol), ONE_POLY)

    @classmethod
    def constant(cls, value):
        return cls(MultiPoly.constant(value))

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExtScalar):
            return other
        if isinstance(other, (MultiPoly, Symbol, int, Fraction)):
            return ExtScalar(other)
        return NotImplemented

    # ------------------------------------------------------------------
    # Field operations
    # ------------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return ExtScalar(self.num + other.num, self.den)
        if len(self.den) == 1 and len(other.den) == 1:
            # monic monomial denominators: combine over their lcm
            (d1, _), = self.den._items()
            (d2, _), = other.den._items()
            lcm = tuple(max(a, b) for a, b in zip(d1, d2))
            lift1 = MultiPoly._raw({tuple(a - b for a, b in zip(lcm, d1)): Fraction(1)})
            lift2 = MultiPoly._raw({tuple(a - b for a, b in zip(lcm, d2)): Fraction(1)})
            return ExtScalar(self.num * lift1 + other.num * lift2,
                             MultiPoly._raw({lcm: Fraction(1)}))
        return ExtScalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return ExtScalar._from_parts(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ExtScalar()
        return ExtScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse; the conjugate keeps the denominator A-free"""
        if self.num.is_zero():
            raise ZeroDivisionError("Division by a zero ExtScalar")
        conj = _conjugate_poly(self.num)
        norm = reduce_A(self.num * conj)
        if norm.is_zero():
            raise ZeroDivisionError("Divisor is a zero divisor of the extension")
        return ExtScalar(self.den * conj, norm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, power):
        if not isinstance(power, int):
            raise ValueError("ExtScalar powers must be integers")
        if power < 0:
            return self.inverse() ** (-power)
        result = ExtScalar(1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num == other.num and self.den == other.den:
            return True
        return reduce_A(self.num * other.den - other.num * self.den).is_zero()

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------

    def is_zero(self):
        return self.num.is_zero()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def symbols(self):
        return self.num.symbols() | self.den.symbols()

    def to_fraction(self):
        if not self.is_constant():
            raise ValueError(f"Not a rational constant: {self.to_text()}")
        return self.num.constant_value() / self.den.constant_value()

    def conjugate(self):
        """The image under A ↦ 2(2α+β) − A (the other root)"""
        return ExtScalar(_conjugate_poly(self.num), self.den)

    def substitute(self, bindings):
        return substitute(self.num, bindings) / substitute(self.den, bindings)

    def evaluate(self, values):
        return self.num.evaluate(values) / self.den.evaluate(values)

    def to_float(self, values):
        return float(self.evaluate(values))

    def to_text(self):
        if self.den == ONE_POLY:
            return self.num.to_text()
        num_text = self.num.to_text()
        den_text = self.den.to_text()
        if len(self.num) > 1:
            num_text = f'({num_text})'
        if len(self.den) > 1:
            den_text = f'({den_text})'
        return f'{num_text}/{den_text}'

    __str__ = to_text

    def __repr__(self):
        return f"ExtScalar({self.to_text()!r})"


def _rebuild_ext(num, den):
    return ExtScalar._from_parts(num, den)


_EXT_OPERATIONS = {
    'add': operator.add,
    'sub': operator.sub,
    'mul': operator.mul,
    'div': operator.truediv,
}


def ext_arith(lhs, rhs, kind):
    """
    Field operation on two extension scalars by name

    Args:
        lhs, rhs: ExtScalar (or values ExtScalar accepts)
        kind: 'add', 'sub', 'mul' or 'div'

    Returns:
        Canonical ExtScalar with an A-free denominator
    """
    try:
        op = _EXT_OPERATIONS[kind]
    except KeyError:
        raise InvalidParametersError(f"Unknown operation {kind!r}; use add, sub, mul or div") from None
    lhs, rhs = (x if isinstance(x, ExtScalar) else ExtScalar(x) for x in (lhs, rhs))
    return op(lhs, rhs)


def _check_bindings(p, bound):
    """Reject bindings under which reduction by the A relation would be unsound"""
    params_bound = [s for s in PARAMETERS if s in bound]
    if Symbol.A in bound:
        missing = [s.text for s in PARAMETERS if s not in bound]
        if missing:
            raise InvalidParametersError(
                f"Binding A also requires binding {', '.join(missing)}")
        relation = {s: bound[s] for s in PARAMETERS + (Symbol.A,)}
        if not all(v.is_constant() for v in relation.values()):
            raise InvalidParametersError("A and alpha, beta, gamma, omega must be bound to constants")
        alpha, beta, gamma, omega, a = (relation[s].to_fraction()
                                        for s in PARAMETERS + (Symbol.A,))
        if a * a != 2 * (2 * alpha + beta) * a - 40 * gamma * omega:
            raise InvalidParametersError(
                f"A = {a} is not a root of A² = 2(2α+β)A − 40γω at these parameters")
        locked = set(PARAMETERS) | {Symbol.A}
        for symbol, value in bound.items():
            if symbol not in locked and value.symbols() & locked:
                raise InvalidParametersError(
                    f"Value bound to {symbol.text} still mentions A or the equation coefficients")
    elif params_bound:
        if p.degree_in(Symbol.A) or any(v.num.degree_in(Symbol.A) for v in bound.values()):
            raise InvalidParametersError(
                "Binding alpha, beta, gamma or omega while A stays free breaks the A relation")


def _powers(poly, top):
    out = [ONE_POLY]
    for _ in range(top):
        out.append(reduce_A(out[-1] * poly))
    return out


def substitute(p, bindings):
    """
    Homomorphic evaluation of p with some symbols replaced

    Args:
        p: MultiPoly
        bindings: mapping Symbol (or name) -> ExtScalar / MultiPoly / int / Fraction;
            unbound symbols stay symbolic

    Returns:
        Canonical ExtScalar
    """
    p = _as_poly(p)
    bound = {}
    for symbol, value in bindings.items():
        value = ExtScalar._coerce(value)
        if value is NotImplemented:
            raise InvalidParametersError(f"Cannot bind {symbol} to {value!r}")
        bound[Symbol.parse(symbol)] = value
    _check_bindings(p, bound)
    if not bound or p.is_zero():
        return ExtScalar(p)

    top = {s: p.degree_in(s) for s in bound}
    num_powers = {s: _powers(v.num, top[s]) for s, v in bound.items()}
    den_powers = {s: _powers(v.den, top[s]) for s, v in bound.items()}

    total = MultiPoly.zero()
    for exps, coeff in p._items():
        free = tuple(0 if i in bound else e for i, e in enumerate(exps))
        term = MultiPoly._raw({free: coeff})
        for s in bound:
            e = exps[s]
            if e:
                term = term * num_powers[s][e]
            if top[s] - e and bound[s].den != ONE_POLY:
                term = term * den_powers[s][top[s] - e]
        total = total + term

    den = ONE_POLY
    for s in bound:
        if top[s] and bound[s].den != ONE_POLY:
            den = den * den_powers[s][top[s]]
    return ExtScalar(total, den)


_RATIONAL_PATTERN = re.compile(r'^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$')


def parse_rational(text):
    """Parse an integer or 'p/q' string into a Fraction; floats are rejected"""
    if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        return Fraction(text)
    match = _RATIONAL_PATTERN.match(str(text))
    if not match:
        raise InvalidParametersError(f"Expected an integer or 'p/q' rational, got {text!r}")
    denominator = int(match.group(2) or 1)
    if denominator == 0:
        raise InvalidParametersError(f"Zero denominator in {text!r}")
    return Fraction(int(match.group(1)), denominator)


def rational_sqrt(value):
    """Exact square root of a non-negative rational, or None when it is irrational"""
    value = Fraction(value)
    if value < 0:
        return None
    num = isqrt(value.numerator)
    den = isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None
