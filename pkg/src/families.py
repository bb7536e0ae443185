"""
Solution Families
The constants A, B, C, the six (a0, a2, b2, lambda) families, their certificates and the closed forms u1..u12
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from src.balance_extract import derive_system
from src.errors import BranchError, InvalidParametersError, NoRealSolutionError
from src.exact_arith import ExtScalar, PARAMETERS, Symbol, rational_sqrt, substitute
from src.riccati_calculus import K, FkdvParams


ALPHA, BETA, GAMMA, OMEGA = (ExtScalar.symbol(s) for s in PARAMETERS)
A = ExtScalar.symbol(Symbol.A)

# family id -> family id reached by A -> conjugate root / by phi -> k/phi
CONJUGATE_PARTNER = {1: 2, 2: 1, 3: 4, 4: 3, 5: 6, 6: 5}
MIRROR_PARTNER = {1: 3, 3: 1, 2: 4, 4: 2, 5: 5, 6: 6}

# certified wave speed as factor * (B or C) * k^2
LAMBDA_FORMULAS = {1: (16, 'B'), 2: (16, 'C'), 3: (16, 'B'), 4: (16, 'C'),
                   5: (256, 'B'), 6: (256, 'C')}


# ----------------------------------------------------------------------
# Constants A, B, C
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AbcConstants:
    """A, B and C; `bound` is True when they are exact values at concrete parameters"""

    A: ExtScalar
    B: ExtScalar
    C: ExtScalar
    bound: bool = False

    def as_dict(self):
        out = {name: value.to_text() for name, value in
               (('A', self.A), ('B', self.B), ('C', self.C))}
        out['bound'] = self.bound
        return out


def _generic_constants():
    b = (GAMMA * OMEGA * 12 - A * BETA) / (GAMMA * 8)
    c = (A * 3 - BETA * 10) * OMEGA / (A * 2)
    return AbcConstants(A=A, B=b, C=c)


def exact_bindings(params, root='principal'):
    """
    Exact values for α, β, γ, ω and A

    Returns:
        dict Symbol -> Fraction, or None when the parameters are symbolic or
        the discriminant is not the square of a rational
    """
    if params.is_symbolic():
        return None
    disc = params.discriminant().to_fraction()
    if disc < 0:
        raise NoRealSolutionError(
            f"(2α+β)² − 40γω = {disc} < 0 for {params.label}: A is not real")
    sqrt_disc = rational_sqrt(disc)
    if sqrt_disc is None:
        return None
    values = params.values()
    trace = 2 * values[Symbol.ALPHA] + values[Symbol.BETA]
    values[Symbol.A] = trace + sqrt_disc if root == 'principal' else trace - sqrt_disc
    return values


def numeric_A(params, root='principal'):
    """Floating value of A (principal root by default)"""
    if params.is_symbolic():
        raise InvalidParametersError("Numeric A needs concrete parameters")
    disc = params.discriminant().to_fraction()
    if disc < 0:
        raise NoRealSolutionError(
            f"(2α+β)² − 40γω = {disc} < 0 for {params.label}: A is not real")
    values = params.values()
    trace = float(2 * values[Symbol.ALPHA] + values[Symbol.BETA])
    root_value = math.sqrt(float(disc))
    return trace + root_value if root == 'principal' else trace - root_value


def abc_constants(params=None):
    """
    The constants A, B, C

    Args:
        params: FkdvParams, or None for the symbolic constants

    Returns:
        AbcConstants, exact values when the discriminant is a rational square,
        otherwise the symbolic expressions
    """
    generic = _generic_constants()
    if params is None or params.is_symbolic():
        return generic
    bindings = exact_bindings(params)
    if bindings is None:
        return generic
    return AbcConstants(*(c.substitute(bindings) for c in (generic.A, generic.B, generic.C)),
                        bound=True)


def numeric_abc(params, root='principal'):
    """(A, B, C) as floats; NoRealSolutionError for a negative discriminant"""
    a = numeric_A(params, root)
    values = params.float_values()
    beta, gamma, omega = values[Symbol.BETA], values[Symbol.GAMMA], values[Symbol.OMEGA]
    return a, (12 * gamma * omega - a * beta) / (8 * gamma), (3 * a - 10 * beta) * omega / (2 * a)


# ----------------------------------------------------------------------
# Families
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SolutionFamily:
    """One (a0, a2, b2, lambda) tuple with a1 = b1 = 0"""

    id: int
    a0: ExtScalar
    a2: ExtScalar
    b2: ExtScalar
    lam: ExtScalar
    root: str = 'principal'

    def fields(self):
        return (self.a0, self.a2, self.b2, self.lam)

    def bindings(self):
        return {Symbol.A0: self.a0, Symbol.A1: 0, Symbol.A2: self.a2,
                Symbol.B1: 0, Symbol.B2: self.b2, Symbol.LAMBDA: self.lam}

    def same_values(self, other):
        return all(a == b for a, b in zip(self.fields(), other.fields()))

    def as_dict(self):
        return {'id': self.id, 'root': self.root, 'a0': self.a0.to_text(),
                'a2': self.a2.to_text(), 'b2': self.b2.to_text(), 'lambda': self.lam.to_text()}


def _family_coefficients():
    """(a0, a2, b2) for families 1..6"""
    a0_b = -(A * K * 2) / GAMMA
    a0_c = -(K * OMEGA * 80) / A
    a2_b = -(A * 3) / GAMMA
    a2_c = -(OMEGA * 120) / A
    b2_b = -(A * K * K * 3) / GAMMA
    b2_c = -(K * K * OMEGA * 120) / A
    zero = ExtScalar()
    return {
        1: (a0_b, zero, b2_b),
        2: (a0_c, zero, b2_c),
        3: (a0_b, a2_b, zero),
        4: (a0_c, a2_c, zero),
        5: (a0_b, a2_b, b2_b),
        6: (a0_c, a2_c, b2_c),
    }


def solve_lambda(a0, a2, b2, system=None):
    """
    λ from the first equation (highest power first) whose λ-coefficient survives

    Args:
        a0, a2, b2: ExtScalar coefficient values
        system: restricted EquationSystem (default: symbolic a1 = b1 = 0 system)

    Returns:
        (λ, power of the equation used)
    """
    if system is None:
        system = derive_system(None, m=2, general=False)
    bindings = {Symbol.A0: a0, Symbol.A2: a2, Symbol.B2: b2}
    for power, equation in system:
        slope = substitute(equation.coefficient_in(Symbol.LAMBDA, 1), bindings)
        if slope.is_zero():
            continue
        offset = substitute(equation.coefficient_in(Symbol.LAMBDA, 0), bindings)
        return -offset / slope, power
    raise ValueError("No equation of the system determines lambda")


def lambda_formula(family_id, constants=None):
    """The closed expression factor·(B or C)·k² for a family"""
    constants = constants or _generic_constants()
    factor, name = LAMBDA_FORMULAS[family_id]
    base = constants.B if name == 'B' else constants.C
    return base * K * K * factor


def certified_lambda(family):
    """
    λ of a family written through B and C, checked against the derived value

    Returns:
        (text such as '16*B*k^2', agrees)
    """
    family = get_family(family)
    factor, name = LAMBDA_FORMULAS[family.id]
    expression = lambda_formula(family.id)
    if family.root == 'conjugate':
        expression = expression.conjugate()
    return f'{factor}*{name}*k^2', expression == family.lam


@lru_cache(maxsize=1)
def family_table():
    """The six families with λ derived from the system (not from printed text)"""
    families = []
    for family_id, (a0, a2, b2) in _family_coefficients().items():
        lam, _ = solve_lambda(a0, a2, b2)
        families.append(SolutionFamily(id=family_id, a0=a0, a2=a2, b2=b2, lam=lam))
    return tuple(families)


def get_family(family_id):
    if isinstance(family_id, SolutionFamily):
        return family_id
    try:
        family_id = int(family_id)
    except (TypeError, ValueError):
        raise InvalidParametersError(f"Family id must be 1..6, got {family_id!r}") from None
    if family_id not in range(1, 7):
        raise InvalidParametersError(f"Family id must be 1..6, got {family_id}")
    return family_table()[family_id - 1]


def conjugate_family(family):
    """Replace A by the other root 2(2α+β) − A in every field"""
    return SolutionFamily(id=family.id, a0=family.a0.conjugate(), a2=family.a2.conjugate(),
                          b2=family.b2.conjugate(), lam=family.lam.conjugate(),
                          root='conjugate' if family.root == 'principal' else 'principal')


def mirror_family(family):
    """Image under φ ↦ k/φ: (a2, b2) ↦ (b2/k², a2·k²)"""
    return SolutionFamily(id=MIRROR_PARTNER[family.id], a0=family.a0,
                          a2=family.b2 / (K * K), b2=family.a2 * K * K, lam=family.lam,
                          root=family.root)


# ----------------------------------------------------------------------
# Certificates
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyCertificate:
    """Per-power zero/nonzero status of a family substituted into the system"""

    family_id: int
    mode: str
    lam: str
    statuses: Tuple[Tuple[int, bool, str], ...]

    @property
    def verified(self):
        return all(is_zero for _, is_zero, _ in self.statuses)

    def failing_powers(self):
        return [power for power, is_zero, _ in self.statuses if not is_zero]

    def to_dict(self):
        return {
            'family': self.family_id,
            'mode': self.mode,
            'lambda': self.lam,
            'verified': self.verified,
            'equations': [{'power': p, 'zero': z, 'residual': r} for p, z, r in self.statuses],
        }


def verify_family(family, params=None, system=None):
    """
    Substitute a family (with a1 = b1 = 0) into every equation of the m = 2 system

    Args:
        family: SolutionFamily
        params: None for fully symbolic α, β, γ, ω; concrete parameters whose
            discriminant is a rational square are checked exactly at that point
        system: general EquationSystem (default: symbolic m = 2 system)

    Returns:
        FamilyCertificate; a nonzero entry is a finding, not an error
    """
    if system is None:
        system = derive_system(None, m=2, general=True)
    bindings = family.bindings()
    mode = 'symbolic'
    exact = exact_bindings(params, family.root) if params is not None else None
    if exact is not None:
        bindings = {s: ExtScalar._coerce(v).substitute(exact) for s, v in bindings.items()}
        bindings.update(exact)
        mode = f'exact@{params.label}'
    statuses = []
    for power, equation in system:
        value = substitute(equation, bindings)
        statuses.append((power, value.is_zero(), '0' if value.is_zero() else value.to_text()))
    lam = family.lam if exact is None else family.lam.substitute(exact)
    return FamilyCertificate(family_id=family.id, mode=mode, lam=lam.to_text(),
                             statuses=tuple(statuses))


class FamilyVerifier:
    """Certificates for a set of families, symbolic and at concrete parameters"""

    def __init__(self, families=None, verbose=False):
        """
        Args:
            families: family ids or SolutionFamily objects (default: all six)
            verbose: print one status line per certificate
        """
        ids = families if families is not None else range(1, 7)
        self.families = [get_family(f) for f in ids]
        self.verbose = verbose

    def verify(self, params=None):
        """
        Args:
            params: None for the fully symbolic check, else concrete FkdvParams

        Returns:
            list of FamilyCertificate
        """
        if self.verbose:
            target = 'symbolic α, β, γ, ω, k' if params is None else params.label
            print(f"\n🔍 Verifying {len(self.families)} families ({target})...")
        certificates = []
        for family in self.families:
            certificate = verify_family(family, params)
            certificates.append(certificate)
            if self.verbose:
                mark = '✅' if certificate.verified else '❌'
                print(f"  {mark} family {family.id}: λ = {certificate.lam}")
                for power in certificate.failing_powers():
                    print(f"     ⚠️ nonzero at φ^{power}")
        return certificates


# ----------------------------------------------------------------------
# Numeric family values
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyValues:
    a0: object
    a2: object
    b2: object
    lam: object
    exact: bool = False

    def as_floats(self):
        return (float(self.a0), float(self.a2), float(self.b2), float(self.lam))


def family_values(family, params, k, root='principal'):
    """
    Family coefficients at concrete parameters and k

    Exact Fractions when the discriminant is a rational square and k is
    rational; floats otherwise.
    """
    family = get_family(family)
    if params.is_symbolic():
        raise InvalidParametersError("Family values need concrete parameters")
    exact = exact_bindings(params, root)
    if exact is not None and isinstance(k, (int, Fraction)) and not isinstance(k, bool):
        exact[Symbol.K] = Fraction(k)
        values = [v.substitute(exact).to_fraction() for v in family.fields()]
        return FamilyValues(*values, exact=True)
    numbers = dict(params.float_values())
    numbers[Symbol.A] = numeric_A(params, root)
    numbers[Symbol.K] = float(k)
    return FamilyValues(*(float(v.evaluate(numbers)) for v in family.fields()))


# ----------------------------------------------------------------------
# Riccati branches and closed forms
# ----------------------------------------------------------------------

class Branch(str, Enum):
    """Real solutions of φ' = k + φ²"""

    TAN = 'tan'
    COT = 'cot'
    TANH = 'tanh'
    COTH = 'coth'
    RATIONAL = 'rational'

    @classmethod
    def parse(cls, value):
        if isinstance(value, Branch):
            return value
        text = str(value).lower()
        # u2/u4 print the tanh branch through coth² = 1 + csch²
        if text in ('csch', 'csch-form'):
            return cls.TANH
        try:
            return cls(text)
        except ValueError:
            raise BranchError(f"Unknown branch {value!r}") from None

    @property
    def kind(self):
        if self in (Branch.TAN, Branch.COT):
            return 'trigonometric'
        if self in (Branch.TANH, Branch.COTH):
            return 'hyperbolic'
        return 'rational'


def check_branch(branch, k, allow_rational=False):
    """Raise BranchError unless the branch matches the sign of k"""
    branch = Branch.parse(branch)
    if branch.kind == 'trigonometric' and not k > 0:
        raise BranchError(f"The {branch.value} branch needs k > 0, got k = {k}")
    if branch.kind == 'hyperbolic' and not k < 0:
        raise BranchError(f"The {branch.value} branch needs k < 0, got k = {k}")
    if branch is Branch.RATIONAL:
        if k != 0:
            raise BranchError(f"The rational branch needs k = 0, got k = {k}")
        if not allow_rational:
            raise BranchError("The k = 0 rational branch is a limiting case; pass allow_rational")
    return branch


def riccati_phi(branch, k, xi):
    """φ(ξ) for the chosen branch; tan, -cot, -tanh, -coth or -1/ξ"""
    branch = Branch.parse(branch)
    xi = np.asarray(xi, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        if branch is Branch.TAN:
            s = math.sqrt(k)
            return s * np.tan(s * xi)
        if branch is Branch.COT:
            s = math.sqrt(k)
            return -s / np.tan(s * xi)
        if branch is Branch.TANH:
            s = math.sqrt(-k)
            return -s * np.tanh(s * xi)
        if branch is Branch.COTH:
            s = math.sqrt(-k)
            return -s / np.tanh(s * xi)
        return -1.0 / xi


@dataclass(frozen=True)
class PoleSet:
    """Singularities of v in the shifted variable ζ = ξ + ξ0"""

    period: Optional[float]
    offsets: Tuple[float, ...]

    @property
    def spacing(self):
        if self.period is None or not self.offsets:
            return None
        return self.period / len(self.offsets)

    def distance(self, zeta):
        """Distance from each ζ to the nearest singularity (inf when there is none)"""
        zeta = np.asarray(zeta, dtype=float)
        if not self.offsets:
            return np.full(zeta.shape, np.inf)
        distances = []
        for offset in self.offsets:
            delta = zeta - offset
            if self.period is not None:
                delta = np.mod(delta + self.period / 2, self.period) - self.period / 2
            distances.append(np.abs(delta))
        return np.min(distances, axis=0)


def pole_set(branch, k, a2, b2):
    """Poles of a0 + a2φ² + b2/φ²: where φ blows up (a2 ≠ 0) or vanishes (b2 ≠ 0)"""
    branch = Branch.parse(branch)
    blow_up, vanish = [], []
    period = None
    if branch.kind == 'trigonometric':
        s = math.sqrt(k)
        period = math.pi / s
        quarter = math.pi / (2 * s)
        blow_up, vanish = ([quarter], [0.0]) if branch is Branch.TAN else ([0.0], [quarter])
    elif branch is Branch.TANH:
        vanish = [0.0]
    else:
        blow_up = [0.0]
    offsets = []
    if a2 != 0:
        offsets += blow_up
    if b2 != 0:
        offsets += vanish
    return PoleSet(period=period, offsets=tuple(sorted(offsets)))


@dataclass(frozen=True, eq=False)
class ClosedFormSolution:
    """u(x, t) = v(x + λt) = a0 + a2φ² + b2φ⁻² on one Riccati branch"""

    family_id: int
    branch: Branch
    k: float
    params: FkdvParams
    a0: float
    a2: float
    b2: float
    lam: float
    poles: PoleSet
    xi0: float = 0.0
    label: Optional[str] = None
    root: str = 'principal'
    exact_values: Optional[FamilyValues] = field(default=None, repr=False)

    @property
    def length_scale(self):
        return math.pi / math.sqrt(abs(self.k)) if self.k else 1.0

    @property
    def pole_spacing(self):
        return self.poles.spacing

    def default_epsilon(self, ratio=1e-2):
        """Pole-exclusion radius: ratio × pole spacing (length scale when isolated)"""
        return ratio * (self.pole_spacing or self.length_scale)

    def xi(self, x, t):
        return np.asarray(x, dtype=float) + self.lam * np.asarray(t, dtype=float)

    def phi(self, xi):
        return riccati_phi(self.branch, self.k, np.asarray(xi, dtype=float) + self.xi0)

    def profile(self, xi):
        phi = self.phi(xi)
        # a vanished coefficient drops its term, so φ = ∞ never meets 0·∞
        out = np.full(phi.shape, self.a0, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            if self.a2 != 0:
                out = out + self.a2 * phi ** 2
            if self.b2 != 0:
                out = out + self.b2 / phi ** 2
        return out

    def __call__(self, x, t):
        return self.profile(self.xi(x, t))

    def pole_distance(self, xi):
        return self.poles.distance(np.asarray(xi, dtype=float) + self.xi0)

    def describe(self):
        return {
            'label': self.label,
            'family': self.family_id,
            'branch': self.branch.value,
            'root': self.root,
            'k': self.k,
            'xi0': self.xi0,
            'a0': self.a0,
            'a2': self.a2,
            'b2': self.b2,
            'lambda': self.lam,
            'pole_period': self.poles.period,
            'pole_offsets': list(self.poles.offsets),
            'pole_spacing': self.pole_spacing,
        }


def closed_form(family, branch, k, params, xi0=0.0, allow_rational=False, root='principal'):
    """
    Compose a family with a Riccati branch

    Args:
        family: SolutionFamily or id 1..6
        branch: Branch or its name ('csch' selects the tanh branch)
        k: wavenumber parameter, sign must match the branch
        params: concrete FkdvParams
        xi0: Riccati integration constant (phase shift)
        allow_rational: admit the k = 0 limiting case φ = −1/ξ
        root: 'principal' or 'conjugate' root for A

    Returns:
        ClosedFormSolution
    """
    family = get_family(family)
    branch = check_branch(branch, k, allow_rational)
    values = family_values(family, params, k, root)
    a0, a2, b2, lam = values.as_floats()
    label = PRINTED_BY_PAIR.get((family.id, branch)) if root == 'principal' else None
    return ClosedFormSolution(family_id=family.id, branch=branch, k=float(k), params=params,
                              a0=a0, a2=a2, b2=b2, lam=lam, poles=pole_set(branch, k, a2, b2),
                              xi0=float(xi0), label=label, root=root,
                              exact_values=values if values.exact else None)


# ----------------------------------------------------------------------
# Printed solutions u1..u12
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PrintedSolution:
    label: str
    family_id: int
    branch: Branch
    speed_factor: int
    speed_constant: str
    shape: str

    @property
    def speed_text(self):
        return f'{self.speed_factor}{self.speed_constant}k^2'


def _shape(name, z):
    with np.errstate(divide='ignore', invalid='ignore'):
        if name == 'cot':
            return -(2 + 3 / np.tan(z) ** 2)
        if name == 'csch':
            return 1 + 3 / np.sinh(z) ** 2
        if name == 'tan':
            return -(2 + 3 * np.tan(z) ** 2)
        if name == 'tanh':
            return -(2 - 3 * np.tanh(z) ** 2)
        if name == 'tan+cot':
            return -(2 + 3 * np.tan(z) ** 2 + 3 / np.tan(z) ** 2)
        if name == 'tanh+coth':
            return -(2 - 3 * np.tanh(z) ** 2 - 3 / np.tanh(z) ** 2)
    raise ValueError(f"Unknown printed shape {name!r}")


PRINTED_SOLUTIONS = (
    PrintedSolution('u1', 1, Branch.TAN, 16, 'B', 'cot'),
    PrintedSolution('u2', 1, Branch.TANH, 16, 'B', 'csch'),
    PrintedSolution('u3', 2, Branch.TAN, 256, 'C', 'cot'),
    PrintedSolution('u4', 2, Branch.TANH, 256, 'C', 'csch'),
    PrintedSolution('u5', 3, Branch.TAN, 16, 'B', 'tan'),
    PrintedSolution('u6', 3, Branch.TANH, 16, 'B', 'tanh'),
    PrintedSolution('u7', 4, Branch.TAN, 256, 'C', 'tan'),
    PrintedSolution('u8', 4, Branch.TANH, 256, 'C', 'tanh'),
    PrintedSolution('u9', 5, Branch.TAN, 256, 'B', 'tan+cot'),
    PrintedSolution('u10', 5, Branch.TANH, 256, 'B', 'tanh+coth'),
    PrintedSolution('u11', 6, Branch.TAN, 256, 'C', 'tan+cot'),
    PrintedSolution('u12', 6, Branch.TANH, 256, 'C', 'tanh+coth'),
)

PRINTED_BY_LABEL = {p.label: p for p in PRINTED_SOLUTIONS}
PRINTED_BY_PAIR = {(p.family_id, p.branch): p.label for p in PRINTED_SOLUTIONS}


def printed_solutions():
    return list(PRINTED_SOLUTIONS)


def get_printed(label):
    try:
        return PRINTED_BY_LABEL[str(label).lower()]
    except KeyError:
        raise InvalidParametersError(f"Unknown solution label {label!r}; use u1..u12") from None


def printed_profile(label, params, k, xi):
    """The printed closed form P·shape(√|k|·ξ), P = Ak/γ or 40kω/A"""
    printed = get_printed(label)
    a = numeric_A(params)
    values = params.float_values()
    if printed.family_id % 2:
        prefactor = a * k / values[Symbol.GAMMA]
    else:
        prefactor = 40 * k * values[Symbol.OMEGA] / a
    z = math.sqrt(abs(k)) * np.asarray(xi, dtype=float)
    return prefactor * _shape(printed.shape, z)


def printed_solution(label, params, k, xi0=0.0):
    """ClosedFormSolution for u1..u12 with the certified λ"""
    printed = get_printed(label)
    return closed_form(printed.family_id, printed.branch, k, params, xi0=xi0)


def printed_lambda_check(params):
    """
    Compare every printed wave speed with the certified λ

    Returns:
        list of dicts (label, family, printed, certified, agrees); exact when the
        discriminant is a rational square (k stays symbolic), otherwise at k = 1
    """
    constants = _generic_constants()
    exact = exact_bindings(params) if params is not None else None
    rows = []
    for printed in PRINTED_SOLUTIONS:
        family = get_family(printed.family_id)
        base = constants.B if printed.speed_constant == 'B' else constants.C
        printed_lam = base * K * K * printed.speed_factor
        if params is None:
            agrees = printed_lam == family.lam
            printed_text, certified_text = printed_lam.to_text(), family.lam.to_text()
        elif exact is not None:
            p_value, c_value = printed_lam.substitute(exact), family.lam.substitute(exact)
            agrees = p_value == c_value
            printed_text, certified_text = p_value.to_text(), c_value.to_text()
        else:
            numbers = dict(params.float_values())
            numbers[Symbol.A] = numeric_A(params)
            numbers[Symbol.K] = 1.0
            p_value = float(printed_lam.evaluate(numbers))
            c_value = float(family.lam.evaluate(numbers))
            agrees = math.isclose(p_value, c_value, rel_tol=1e-12, abs_tol=1e-12)
            printed_text, certified_text = repr(p_value), repr(c_value)
        rows.append({'label': printed.label, 'family': printed.family_id,
                     'printed_speed': printed.speed_text, 'printed': printed_text,
                     'certified': certified_text, 'agrees': bool(agrees)})
    return rows
