"""
Riccati Calculus
Laurent polynomials in φ under the closure rule φ' = k + φ², the ansatz and the fifth-order ODE residual
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import InvalidParametersError
from src.exact_arith import ExtScalar, Symbol, parse_rational


K = ExtScalar.symbol(Symbol.K)
LAMBDA = ExtScalar.symbol(Symbol.LAMBDA)

# (alpha, beta, gamma, omega) for the named special cases
PRESETS = {
    'kk': (10, 25, 20, 1),
    'sk': (5, 5, 5, 1),
    'cdg': (30, 30, 180, 1),
    'lax': (10, 20, 30, 1),
    'ito': (3, 6, 2, 1),
}

PRESET_TITLES = {
    'kk': 'Kaup-Kupershmidt',
    'sk': 'Sawada-Kotera',
    'cdg': 'Caudrey-Dodd-Gibbon',
    'lax': 'Lax',
    'ito': 'Ito',
}


def _as_ext(value):
    scalar = ExtScalar._coerce(value)
    if scalar is NotImplemented:
        raise TypeError(f"Cannot use {value!r} as an exact coefficient")
    return scalar


class PhiPoly:
    """Laurent polynomial in φ with ExtScalar coefficients"""

    __slots__ = ('_terms',)

    def __init__(self, terms=None):
        clean = {}
        for power, coeff in dict(terms or {}).items():
            coeff = _as_ext(coeff)
            if not coeff.is_zero():
                clean[int(power)] = coeff
        self._terms = clean

    @classmethod
    def _raw(cls, terms):
        poly = cls.__new__(cls)
        poly._terms = terms
        return poly

    @classmethod
    def zero(cls):
        return cls._raw({})

    @classmethod
    def constant(cls, value):
        return cls({0: value})

    @classmethod
    def monomial(cls, power, coeff=1):
        return cls({power: coeff})

    def terms(self):
        """(power, coefficient) pairs, highest power first"""
        return sorted(self._terms.items(), reverse=True)

    def exponents(self):
        return sorted(self._terms, reverse=True)

    def coefficient(self, power):
        return self._terms.get(power, ExtScalar())

    def is_zero(self):
        return not self._terms

    def __len__(self):
        return len(self._terms)

    @staticmethod
    def _accumulate(out, power, value):
        total = out[power] + value if power in out else value
        if total.is_zero():
            out.pop(power, None)
        else:
            out[power] = total

    def __add__(self, other):
        if not isinstance(other, PhiPoly):
            other = PhiPoly.constant(other)
        out = dict(self._terms)
        for power, coeff in other._terms.items():
            self._accumulate(out, power, coeff)
        return PhiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return PhiPoly._raw({n: -c for n, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, PhiPoly):
            other = PhiPoly.constant(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PhiPoly):
            return self.scale(other)
        out = {}
        for n1, c1 in self._terms.items():
            for n2, c2 in other._terms.items():
                self._accumulate(out, n1 + n2, c1 * c2)
        return PhiPoly._raw(out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, factor):
        factor = _as_ext(factor)
        if factor.is_zero():
            return PhiPoly.zero()
        return PhiPoly({n: c * factor for n, c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, PhiPoly):
            other = PhiPoly.constant(other)
        if set(self._terms) != set(other._terms):
            return False
        return all(c == other._terms[n] for n, c in self._terms.items())

    __hash__ = None

    def map_coefficients(self, fn):
        return PhiPoly({n: fn(c) for n, c in self._terms.items()})

    def substitute(self, bindings):
        """Bind symbols inside every coefficient"""
        return self.map_coefficients(lambda c: c.substitute(bindings))

    def evaluate(self, phi, values):
        """
        Numeric value at φ

        Args:
            phi: float or numpy array of φ values
            values: symbol values for the coefficients (k, a0, a2, ... as needed)

        Returns:
            float or numpy array
        """
        phi = np.asarray(phi, dtype=float)
        total = np.zeros_like(phi)
        for power, coeff in self._terms.items():
            value = float(coeff.evaluate(values))
            # skip vanished coefficients so φ = 0 never meets a negative power
            if value == 0.0:
                continue
            with np.errstate(divide='ignore', invalid='ignore'):
                total = total + value * phi ** power
        return total

    def to_text(self):
        if not self._terms:
            return '0'
        pieces = []
        for power, coeff in self.terms():
            if power == 0:
                pieces.append(f'({coeff.to_text()})')
            else:
                pieces.append(f'({coeff.to_text()})*phi^{power}')
        return ' + '.join(pieces)

    __str__ = to_text

    def __repr__(self):
        return f"PhiPoly({self.to_text()!r})"


@dataclass(frozen=True, eq=False)
class FkdvParams:
    """Coefficients (α, β, γ, ω) of u_t + ωu_xxxxx + αuu_xxx + βu_xu_xx + γu²u_x = 0"""

    alpha: ExtScalar
    beta: ExtScalar
    gamma: ExtScalar
    omega: ExtScalar
    preset: Optional[str] = None

    def __post_init__(self):
        for name in ('alpha', 'beta', 'gamma', 'omega'):
            object.__setattr__(self, name, _as_ext(getattr(self, name)))
        if self.gamma.is_zero() or self.omega.is_zero():
            raise InvalidParametersError("The equation needs omega != 0 and gamma != 0")
        if self.preset is not None and self.preset not in set(PRESETS) | {'custom'}:
            raise InvalidParametersError(f"Unknown preset tag: {self.preset!r}")

    @classmethod
    def symbolic(cls):
        """Fully symbolic α, β, γ, ω"""
        return cls(*(ExtScalar.symbol(s) for s in
                     (Symbol.ALPHA, Symbol.BETA, Symbol.GAMMA, Symbol.OMEGA)))

    @classmethod
    def from_preset(cls, name):
        key = str(name).lower()
        if key not in PRESETS:
            raise InvalidParametersError(
                f"Unknown preset {name!r}; choose from {', '.join(PRESETS)}")
        return cls(*PRESETS[key], preset=key)

    @classmethod
    def custom(cls, alpha, beta, gamma, omega):
        """Explicit rational coefficients given as ints, Fractions or 'p/q' text"""
        return cls(*(parse_rational(v) for v in (alpha, beta, gamma, omega)), preset='custom')

    @property
    def label(self):
        if self.preset:
            return self.preset
        return 'symbolic' if self.is_symbolic() else 'custom'

    def is_symbolic(self):
        return not all(v.is_constant() for v in self.coefficients())

    def coefficients(self):
        return (self.alpha, self.beta, self.gamma, self.omega)

    def values(self):
        """Exact rational coefficients keyed by Symbol"""
        if self.is_symbolic():
            raise InvalidParametersError("Parameters are symbolic")
        return {s: v.to_fraction() for s, v in
                zip((Symbol.ALPHA, Symbol.BETA, Symbol.GAMMA, Symbol.OMEGA), self.coefficients())}

    def float_values(self):
        return {s: float(v) for s, v in self.values().items()}

    def discriminant(self):
        """(2α+β)² − 40γω"""
        trace = self.alpha * 2 + self.beta
        return trace * trace - self.gamma * self.omega * 40

    def key(self):
        return tuple(v.to_text() for v in self.coefficients())

    def __eq__(self, other):
        if not isinstance(other, FkdvParams):
            return NotImplemented
        return all(a == b for a, b in zip(self.coefficients(), other.coefficients()))

    __hash__ = None


def riccati_derive(p):
    """d/dξ term by term with d(φⁿ)/dξ = n·k·φⁿ⁻¹ + n·φⁿ⁺¹"""
    out = {}
    for power, coeff in p._terms.items():
        if power == 0:
            continue
        PhiPoly._accumulate(out, power - 1, coeff * K * power)
        PhiPoly._accumulate(out, power + 1, coeff * power)
    return PhiPoly._raw(out)


def derivatives(p, order=5):
    """[p, p', p'', ...] up to the given order by iterating riccati_derive"""
    out = [p]
    for _ in range(order):
        out.append(riccati_derive(out[-1]))
    return out


def build_ansatz(m=2, general=True):
    """
    Ansatz a₀ + Σ (aᵢφⁱ + bᵢφ⁻ⁱ)

    Args:
        m: order of the ansatz (1 or 2)
        general: when False, the restricted form a₀ + a₂φ² + b₂φ⁻² (m must be 2)

    Returns:
        PhiPoly with symbolic coefficients
    """
    if not isinstance(m, int) or m < 1:
        raise InvalidParametersError("m must be a positive integer")
    if m > 2:
        raise InvalidParametersError(f"m = {m} is outside the symbol universe (m <= 2)")
    if not general and m != 2:
        raise InvalidParametersError("The restricted ansatz is defined for m = 2")
    pairs = {1: (Symbol.A1, Symbol.B1), 2: (Symbol.A2, Symbol.B2)}
    terms = {0: ExtScalar.symbol(Symbol.A0)}
    for i in range(1, m + 1):
        if not general and i == 1:
            continue
        upper, lower = pairs[i]
        terms[i] = ExtScalar.symbol(upper)
        terms[-i] = ExtScalar.symbol(lower)
    return PhiPoly(terms)


def ode_residual(v, params):
    """γ·v²·v' + α·v·v''' + λ·v' + β·v'·v'' + ω·v⁽⁵⁾ with λ left symbolic"""
    v0, v1, v2, v3, _, v5 = derivatives(v, 5)
    return ((v0 * v0 * v1).scale(params.gamma)
            + (v0 * v3).scale(params.alpha)
            + v1.scale(LAMBDA)
            + (v1 * v2).scale(params.beta)
            + v5.scale(params.omega))


def invert_phi(p):
    """The substitution φ ↦ k/φ"""
    return PhiPoly({-n: c * K ** n for n, c in p._terms.items()})
