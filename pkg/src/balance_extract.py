"""
Balance and Extraction
Fixes the ansatz order m and turns the φ-residual into its coefficient equations
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Tuple

from src.exact_arith import MultiPoly, reduce_A
from src.riccati_calculus import FkdvParams, PhiPoly, build_ansatz, ode_residual


@dataclass(frozen=True)
class BalanceReport:
    """Result of balancing the highest linear term against the nonlinear terms"""

    m: int
    degrees: Tuple[int, int, int]
    trace: Tuple[Tuple[int, Tuple[int, int, int], bool], ...] = field(default=())


def balance_degrees(m):
    """Leading φ-degrees (3m+1, 2m+3, m+5) of γv²v', βv'v'' / αvv''' and ωv⁽⁵⁾"""
    return (3 * m + 1, 2 * m + 3, m + 5)


def balance(max_m=10):
    """
    Search m = 1, 2, ... for the order at which two leading degrees coincide

    Args:
        max_m: last order inspected

    Returns:
        BalanceReport for the unique matching m
    """
    trace = []
    matches = []
    for m in range(1, max_m + 1):
        a, b, c = balance_degrees(m)
        hit = a == b or a == c or b == c
        trace.append((m, (a, b, c), hit))
        if hit:
            matches.append(m)
    if len(matches) != 1:
        raise ValueError(f"Balancing is not unique in 1..{max_m}: {matches}")
    m = matches[0]
    return BalanceReport(m=m, degrees=balance_degrees(m), trace=tuple(trace))


def _clear_denominator(scalar):
    """Equation scalar = 0 as a polynomial equation"""
    num = scalar.num
    if scalar.den.is_constant():
        return num.scale(1 / scalar.den.constant_value())
    return num


@dataclass(frozen=True)
class EquationSystem:
    """Coefficient equations (power, polynomial) ordered by descending power"""

    entries: Tuple[Tuple[int, MultiPoly], ...]

    def __post_init__(self):
        powers = [p for p, _ in self.entries]
        if len(set(powers)) != len(powers):
            raise ValueError("Powers in an EquationSystem must be distinct")
        if any(eq.is_zero() for _, eq in self.entries):
            raise ValueError("EquationSystem entries must be nonzero")
        object.__setattr__(self, 'entries',
                           tuple(sorted(self.entries, key=lambda e: e[0], reverse=True)))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def powers(self):
        return [p for p, _ in self.entries]

    def equation(self, power):
        for p, eq in self.entries:
            if p == power:
                return eq
        return MultiPoly.zero()

    def to_records(self) -> List[dict]:
        return [{'power': p, 'equation': eq.to_text()} for p, eq in self.entries]

    def to_text(self):
        width = max((len(str(p)) for p in self.powers()), default=1)
        lines = [f"phi^{p:>{width}}:  {eq.to_text()} = 0" for p, eq in self.entries]
        return '\n'.join(lines)


def extract_system(residual):
    """One equation per nonzero φ-power coefficient of the residual"""
    entries = []
    for power, coeff in residual.terms():
        equation = reduce_A(_clear_denominator(coeff))
        if not equation.is_zero():
            entries.append((power, equation))
    return EquationSystem(tuple(entries))


def reassemble(system):
    """Σ equation·φ^power, the inverse of extract_system"""
    return PhiPoly({p: eq for p, eq in system.entries})


@lru_cache(maxsize=32)
def _derive_cached(key, m, general):
    if key is None:
        params = FkdvParams.symbolic()
    else:
        params = FkdvParams.custom(*key)
    return extract_system(ode_residual(build_ansatz(m, general), params))


def derive_system(params=None, m=2, general=True):
    """
    Ansatz -> residual -> coefficient equations

    Args:
        params: FkdvParams, or None for fully symbolic α, β, γ, ω
        m: ansatz order
        general: False for the a₁ = b₁ = 0 ansatz

    Returns:
        EquationSystem
    """
    if params is None or params.is_symbolic():
        if params is not None and params != FkdvParams.symbolic():
            return extract_system(ode_residual(build_ansatz(m, general), params))
        return _derive_cached(None, m, general)
    return _derive_cached(params.key(), m, general)
