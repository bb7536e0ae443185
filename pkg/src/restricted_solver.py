"""
Restricted Solver
Cascade solution of the a1 = b1 = 0 coefficient system at concrete parameters
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.balance_extract import derive_system
from src.errors import InvalidParametersError, NoRealSolutionError
from src.exact_arith import Symbol, rational_sqrt
from src.families import exact_bindings, family_table, family_values
from src.riccati_calculus import FkdvParams


RESIDUAL_THRESHOLD = 1e-9
DEDUP_TOLERANCE = 1e-10
ATTRIBUTION_TOLERANCE = 1e-9
EPS = 1e-12
PIVOT_TOLERANCE = 1e-10


class _IrrationalRoot(Exception):
    """An exact cascade step left the rationals"""


@dataclass(frozen=True)
class SolutionTuple:
    """One surviving (a0, a2, b2, λ) with its residual over the full system"""

    a0: object
    a2: object
    b2: object
    lam: object
    residual_norm: float
    exact: bool = False
    degenerate: bool = False
    families: Tuple[Tuple[int, str], ...] = field(default=())

    def as_floats(self):
        return (float(self.a0), float(self.a2), float(self.b2), float(self.lam))

    def to_dict(self):
        out = {
            'a0': float(self.a0), 'a2': float(self.a2),
            'b2': float(self.b2), 'lambda': float(self.lam),
            'residual_norm': self.residual_norm,
            'exact': self.exact,
            'degenerate': self.degenerate,
            'families': [{'family': f, 'root': r} for f, r in self.families],
        }
        if self.exact:
            out['exact_values'] = {'a0': str(self.a0), 'a2': str(self.a2),
                                   'b2': str(self.b2), 'lambda': str(self.lam)}
        return out


def scale_tuple(values, s):
    """Image of (a0, a2, b2, λ) under k ↦ s²k"""
    a0, a2, b2, lam = values
    return (s ** 2 * a0, a2, s ** 4 * b2, s ** 4 * lam)


def _value(poly, values):
    if poly.is_zero():
        return 0
    return poly.evaluate(values)


def _coefficients(equation, symbol, values):
    """[c0, c1, ...] of the equation as a polynomial in symbol, the rest evaluated"""
    return [_value(equation.coefficient_in(symbol, d), values)
            for d in range(equation.degree_in(symbol) + 1)]


def _quadratic_roots(a, b, c, exact):
    """Real roots of a·x² + b·x + c; exact Fractions when the discriminant allows"""
    disc = b * b - 4 * a * c
    if disc < 0:
        raise NoRealSolutionError(f"Leading cascade equation has negative discriminant {disc}")
    if exact:
        root = rational_sqrt(disc)
        if root is None:
            raise _IrrationalRoot()
        return sorted({(-b + root) / (2 * a), (-b - root) / (2 * a)}), disc == 0
    sqrt_disc = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sqrt_disc, b))
    if abs(q) < EPS:
        return [0.0], True
    return sorted({q / a, c / q}), abs(disc) < EPS * max(1.0, b * b)


def _eliminate(rows, column, is_zero):
    """Clear one column with the largest pivot; the pivot row is dropped"""
    live = [row for row in rows if not is_zero(row[column])]
    if not live:
        return rows, None
    pivot = max(live, key=lambda row: abs(row[column]))
    out = []
    for row in rows:
        if row is pivot:
            continue
        factor = row[column] / pivot[column]
        out.append([x - factor * p for x, p in zip(row, pivot)])
    return out, pivot


def _degree(coeffs, is_zero):
    """Degree of a coefficient list ordered from the highest power down"""
    for index, c in enumerate(coeffs[:-1]):
        if not is_zero(c):
            return len(coeffs) - 1 - index
    return 0


def _a0_roots(rows, is_zero, exact):
    """Real a0 values consistent with rows of [a0^D, ..., a0, 1] coefficients"""
    if not rows:
        return []
    top = len(rows[0]) - 1
    lowest = None
    for column in range(top):
        nonconstant = [row for row in rows if _degree(row, is_zero) > 0]
        if not nonconstant:
            break
        lowest = min(nonconstant, key=lambda row: _degree(row, is_zero))
        if _degree(lowest, is_zero) == 1:
            return [-lowest[-1] / lowest[-2]]
        if column == top - 1:
            break
        rows, _ = _eliminate(rows, column, is_zero)
    if lowest is None:
        return []

    degree = _degree(lowest, is_zero)
    coeffs = lowest[len(lowest) - 1 - degree:]
    if degree == 2:
        try:
            roots, _ = _quadratic_roots(coeffs[0], coeffs[1], coeffs[2], exact)
        except NoRealSolutionError:
            return []
        return roots
    if exact:
        raise _IrrationalRoot()
    roots = np.roots(np.array(coeffs, dtype=float))
    return [float(r.real) for r in roots if abs(r.imag) <= PIVOT_TOLERANCE * max(1.0, abs(r))]


class RestrictedSolver:
    """Cascade solver for the a1 = b1 = 0 system at fixed (α, β, γ, ω)"""

    def __init__(self, params, verbose=False):
        """
        Args:
            params: concrete FkdvParams
            verbose: print cascade progress
        """
        if params.is_symbolic():
            raise InvalidParametersError("The cascade solver needs concrete parameters")
        self.params = params
        self.verbose = verbose
        self.restricted = derive_system(params, m=2, general=False)
        self.general = derive_system(params, m=2, general=True)
        self.top_power = self.restricted.powers()[0]
        self.bottom_power = self.restricted.powers()[-1]
        self.a0_degree = max(equation.degree_in(Symbol.A0) for _, equation in self.restricted)

    def solve(self, k):
        """
        Run the cascade at wavenumber k

        Args:
            k: nonzero int, Fraction or float

        Returns:
            list of SolutionTuple, deduplicated; empty when nothing survives
        """
        if k == 0:
            raise InvalidParametersError("The cascade needs k != 0")
        exact = (isinstance(k, (int, Fraction)) and not isinstance(k, bool)
                 and exact_bindings(self.params) is not None)
        if exact:
            try:
                return self._solve(Fraction(k), exact=True)
            except _IrrationalRoot:
                pass
        return self._solve(float(k), exact=False)

    def _solve(self, k, exact):
        values = {Symbol.K: k}
        if self.verbose:
            mode = 'exact' if exact else 'floating'
            print(f"🔍 Cascade for {self.params.label} at k = {k} ({mode})")

        # (i) highest power: a2·(c1 + c2·a2 + c3·a2²) = 0
        c = _coefficients(self.restricted.equation(self.top_power), Symbol.A2, values)
        a2_roots, degenerate = _quadratic_roots(c[3], c[2], c[1], exact)
        # (iv) lowest power: the mirror equation in b2
        c = _coefficients(self.restricted.equation(self.bottom_power), Symbol.B2, values)
        b2_roots, b2_degenerate = _quadratic_roots(c[3], c[2], c[1], exact)
        degenerate = degenerate or b2_degenerate

        zero = Fraction(0) if exact else 0.0
        candidates = []
        for a2 in [zero] + list(a2_roots):
            for b2 in [zero] + list(b2_roots):
                if a2 == 0 and b2 == 0:
                    continue
                candidates.extend(self._complete(k, a2, b2, exact))

        survivors = []
        for a0, a2, b2, lam in candidates:
            norm = self._residual_norm(k, a0, a2, b2, lam, exact)
            if norm <= RESIDUAL_THRESHOLD:
                survivors.append(SolutionTuple(a0=a0, a2=a2, b2=b2, lam=lam, residual_norm=norm,
                                               exact=exact, degenerate=degenerate))
        survivors = self._deduplicate(survivors)
        survivors = [self._attribute(t, k) for t in survivors]
        if self.verbose:
            print(f"  ✅ {len(candidates)} candidates, {len(survivors)} survive the full system")
        return survivors

    def _rows(self, k, a2, b2):
        """Each restricted equation at (k, a2, b2) as [λ, a0^D, ..., a0, 1] coefficients"""
        values = {Symbol.K: k, Symbol.A2: a2, Symbol.B2: b2}
        rows = []
        for _, equation in self.restricted:
            constant = equation.coefficient_in(Symbol.LAMBDA, 0)
            row = [_value(equation.coefficient_in(Symbol.LAMBDA, 1), values)]
            row += [_value(constant.coefficient_in(Symbol.A0, d), values)
                    for d in range(self.a0_degree, -1, -1)]
            rows.append(row)
        return rows

    def _complete(self, k, a2, b2, exact):
        """
        (ii) a0 and (iii) λ for one (a2, b2) pair

        λ enters linearly and a0 polynomially, so the equations are rows over
        the monomials λ, a0^D, ..., a0, 1. Eliminating λ and then the powers
        of a0 above one leaves a linear equation for a0 even where the
        next-highest power carries no a0 at this root.

        At some roots eliminating λ clears every row (b2 = 0, a2 = −6α/γ
        with 10γω = α(α+β) is one): a0 is free and λ is quadratic in it.
        The closed-form points sharing (a2, b2) are then taken from that curve.

        Returns:
            list of (a0, a2, b2, λ) candidates, empty when λ stays free
        """
        rows = self._rows(k, a2, b2)
        if exact:
            def is_zero(x):
                return x == 0
        else:
            scale = max((abs(x) for row in rows for x in row), default=0.0) or 1.0

            def is_zero(x):
                return abs(x) <= PIVOT_TOLERANCE * scale

        lam_rows = [row for row in rows if not is_zero(row[0])]
        if not lam_rows:
            return []
        reduced, _ = _eliminate(rows, 0, is_zero)
        lam_row = max(lam_rows, key=lambda row: abs(row[0]))
        a0_rows = [row[1:] for row in reduced]
        if all(is_zero(x) for row in a0_rows for x in row):
            a0_values = self._curve_points(k, a2, b2, exact)
            if self.verbose:
                print(f"  ⚠️ a0 is free at a2 = {a2}, b2 = {b2}: "
                      f"{len(a0_values)} closed-form points on the curve")
        else:
            a0_values = _a0_roots(a0_rows, is_zero, exact)
        candidates = []
        for a0 in a0_values:
            offset = sum(c * a0 ** d for c, d in zip(lam_row[1:], range(self.a0_degree, -1, -1)))
            candidates.append((a0, a2, b2, -offset / lam_row[0]))
        return candidates

    def _curve_points(self, k, a2, b2, exact):
        """a0 of every family-table evaluation with this (a2, b2)"""
        if exact:
            def same(x, y):
                return x == y
        else:
            def same(x, y):
                return math.isclose(float(x), float(y), rel_tol=ATTRIBUTION_TOLERANCE,
                                    abs_tol=ATTRIBUTION_TOLERANCE)
        seeds = []
        for family in family_table():
            for root in ('principal', 'conjugate'):
                values = family_values(family, self.params, k, root)
                if not (same(values.a2, a2) and same(values.b2, b2)):
                    continue
                a0 = values.a0 if exact else float(values.a0)
                if not any(same(a0, seed) for seed in seeds):
                    seeds.append(a0)
        return seeds

    def _residual_norm(self, k, a0, a2, b2, lam, exact):
        """(v) max over the full system of |equation| / largest monomial"""
        values = {Symbol.K: k, Symbol.A0: a0, Symbol.A1: 0, Symbol.A2: a2,
                  Symbol.B1: 0, Symbol.B2: b2, Symbol.LAMBDA: lam}
        worst = 0.0
        for _, equation in self.general:
            terms = equation.term_values(values)
            total = sum(terms)
            if exact:
                if total != 0:
                    return math.inf
                continue
            scale = max(abs(float(t)) for t in terms)
            if scale > 0:
                worst = max(worst, abs(float(total)) / scale)
        return worst

    @staticmethod
    def _deduplicate(tuples):
        kept = []
        for candidate in tuples:
            values = candidate.as_floats()
            duplicate = any(
                all(abs(x - y) <= DEDUP_TOLERANCE * max(1.0, abs(x)) for x, y in
                    zip(values, other.as_floats()))
                for other in kept)
            if not duplicate:
                kept.append(candidate)
        return kept

    def _attribute(self, solution, k):
        """Family ids whose evaluation (either A-root) matches the tuple"""
        matches = []
        values = solution.as_floats()
        for family in family_table():
            for root in ('principal', 'conjugate'):
                expected = family_values(family, self.params, k, root).as_floats()
                if all(math.isclose(x, y, rel_tol=ATTRIBUTION_TOLERANCE,
                                    abs_tol=ATTRIBUTION_TOLERANCE)
                       for x, y in zip(values, expected)):
                    matches.append((family.id, root))
        return SolutionTuple(a0=solution.a0, a2=solution.a2, b2=solution.b2, lam=solution.lam,
                             residual_norm=solution.residual_norm, exact=solution.exact,
                             degenerate=solution.degenerate, families=tuple(matches))


def solve_restricted(params, k, verbose=False) -> List[SolutionTuple]:
    """Cascade solve of the a1 = b1 = 0 system at (params, k)"""
    return RestrictedSolver(params, verbose=verbose).solve(k)


def solve_restricted_exact(params, k, verbose=False) -> List[SolutionTuple]:
    """
    Exact Fraction cascade

    Raises:
        InvalidParametersError: k is not rational or the discriminant of the
            parameters is not a rational square
        ValueError: a cascade root left the rationals
    """
    if isinstance(k, bool) or not isinstance(k, (int, Fraction)):
        raise InvalidParametersError(f"The exact cascade needs a rational k, got {k!r}")
    if k == 0:
        raise InvalidParametersError("The cascade needs k != 0")
    if exact_bindings(params) is None:
        raise InvalidParametersError(
            f"The discriminant for {params.label} is not a rational square")
    solver = RestrictedSolver(params, verbose=verbose)
    try:
        return solver._solve(Fraction(k), exact=True)
    except _IrrationalRoot:
        raise ValueError(f"An exact cascade root is irrational at k = {k}") from None


def attribute(solution, params, k):
    """Copy of the tuple tagged with every matching (family id, A-root)"""
    return RestrictedSolver(params)._attribute(solution, k)


def _solve_job(params, k):
    return params.label, k, solve_restricted(params, k)


def solve_many(jobs, n_jobs=1):
    """
    Independent (params, k) solves, optionally in parallel

    Args:
        jobs: iterable of (FkdvParams, k)
        n_jobs: joblib worker count

    Returns:
        list of (label, k, tuples) in job order
    """
    return Parallel(n_jobs=n_jobs)(delayed(_solve_job)(params, k) for params, k in jobs)


def family_table_values(params, k):
    """Family-table evaluations under both A-roots, deduplicated"""
    rows = []
    for family in family_table():
        for root in ('principal', 'conjugate'):
            values = family_values(family, params, k, root).as_floats()
            if not any(all(abs(x - y) <= DEDUP_TOLERANCE * max(1.0, abs(x))
                           for x, y in zip(values, row)) for row in rows):
                rows.append(values)
    return rows
