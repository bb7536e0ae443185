"""
Numeric Verification
Grid evaluation of closed forms, PDE residuals by the Riccati chain and by finite differences
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from src.errors import InvalidParametersError
from src.exact_arith import Symbol
from src.families import Branch, ClosedFormSolution, check_branch, pole_set, riccati_phi
from src.riccati_calculus import build_ansatz, derivatives


EPSILON_RATIO = 1e-2
FD_ACCURACY = 8
FD_STEP = 0.05
FD_ENVELOPE = 1e-2
FD_GUARD_STEPS = 6
RESIDUAL_TOLERANCE = 1e-8
TRAVELING_WAVE_TOLERANCE = 1e-10
RICCATI_BRANCH_TOLERANCE = 1e-10
BRANCH_CHECK_STEP = 1e-2
BRANCH_CHECK_ACCURACY = 6
# traveling-wave samples keep these fractions of the pole spacing from any pole, widest first
SAMPLE_CLEARANCE = 0.3
SAMPLE_CLEARANCE_LADDER = (SAMPLE_CLEARANCE, 0.1, 0.03, EPSILON_RATIO)


# ----------------------------------------------------------------------
# Grids and fields
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Uniform x samples on [x_min, x_max] at each of the listed times"""

    x_min: float = -10.0
    x_max: float = 10.0
    t_values: Tuple[float, ...] = (0.0,)
    nx: int = 2001
    epsilon: Optional[float] = None

    def __post_init__(self):
        if self.nx < 2:
            raise InvalidParametersError(f"nx must be at least 2, got {self.nx}")
        if not self.x_max > self.x_min:
            raise InvalidParametersError(f"Empty x range [{self.x_min}, {self.x_max}]")
        if not self.t_values:
            raise InvalidParametersError("At least one t value is needed")
        if self.epsilon is not None and not self.epsilon > 0:
            raise InvalidParametersError(f"The pole-exclusion radius must be positive, got {self.epsilon}")
        object.__setattr__(self, 't_values', tuple(float(t) for t in self.t_values))

    def x(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    def t(self):
        return np.array(self.t_values, dtype=float)

    def mesh(self):
        """(X, T) arrays of shape (len(t_values), nx)"""
        return np.meshgrid(self.x(), self.t())

    def radius(self, sol, ratio=EPSILON_RATIO):
        return self.epsilon if self.epsilon is not None else sol.default_epsilon(ratio)


@dataclass
class SolutionField:
    """u on a grid; masked entries sit within the exclusion radius of a pole"""

    x: np.ndarray
    t: np.ndarray
    u: np.ma.MaskedArray

    @property
    def masked_fraction(self):
        return float(np.ma.getmaskarray(self.u).mean())

    def to_frame(self):
        X, T = np.meshgrid(self.x, self.t)
        mask = np.ma.getmaskarray(self.u)
        return pd.DataFrame({
            'x': X.ravel(),
            't': T.ravel(),
            'u': np.ma.filled(self.u.astype(float), np.nan).ravel(),
            'mask': mask.ravel(),
        })

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format='%.17g')


def pole_mask(sol, xi, radius):
    """True where ξ lies within radius of a singularity of v"""
    return sol.pole_distance(xi) < radius


def eval_solution(sol, grid):
    """
    u(x, t) = v(x + λt) on the grid

    Args:
        sol: ClosedFormSolution
        grid: GridSpec

    Returns:
        SolutionField, masked near poles
    """
    X, T = grid.mesh()
    xi = sol.xi(X, T)
    mask = pole_mask(sol, xi, grid.radius(sol))
    values = np.full(xi.shape, np.nan)
    values[~mask] = sol.profile(xi[~mask])
    return SolutionField(x=grid.x(), t=grid.t(), u=np.ma.masked_array(values, mask=mask))


# ----------------------------------------------------------------------
# Residual reports
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    method: str
    max_abs_residual: float
    masked_fraction: float
    max_term_magnitude: float
    scaled_residual: float
    n_points: int

    def passes(self, tolerance=RESIDUAL_TOLERANCE):
        return self.scaled_residual <= tolerance and self.masked_fraction < 0.5

    def to_dict(self):
        return {
            'method': self.method,
            'max_abs_residual': self.max_abs_residual,
            'masked_fraction': self.masked_fraction,
            'max_term_magnitude': self.max_term_magnitude,
            'scaled_residual': self.scaled_residual,
            'n_points': self.n_points,
        }


def _pde_terms(sol, v0, v1, v2, v3, v5, u_t):
    """The five terms of u_t + ωu⁽⁵⁾ + αuu''' + βu'u'' + γu²u'"""
    values = sol.params.float_values()
    return (u_t,
            values[Symbol.OMEGA] * v5,
            values[Symbol.ALPHA] * v0 * v3,
            values[Symbol.BETA] * v1 * v2,
            values[Symbol.GAMMA] * v0 * v0 * v1)


def _summarize(method, terms, mask):
    """ResidualReport over the unmasked points from the per-point PDE terms"""
    total_points = mask.size
    n_points = int(np.count_nonzero(~mask))
    masked_fraction = 1.0 - n_points / total_points if total_points else 0.0
    if n_points == 0:
        return ResidualReport(method=method, max_abs_residual=0.0, masked_fraction=masked_fraction,
                              max_term_magnitude=0.0, scaled_residual=0.0, n_points=0)
    residual = np.abs(sum(terms))
    magnitude = np.max(np.abs(np.vstack(terms)), axis=0)
    return ResidualReport(
        method=method,
        max_abs_residual=float(np.max(residual)),
        masked_fraction=masked_fraction,
        max_term_magnitude=float(np.max(magnitude)),
        scaled_residual=float(np.max(residual / np.maximum(1.0, magnitude))),
        n_points=n_points,
    )


@lru_cache(maxsize=1)
def _profile_derivatives():
    """v, v', ..., v⁽⁵⁾ of a0 + a2φ² + b2φ⁻²"""
    return tuple(derivatives(build_ansatz(2, general=False), 5))


def chain_derivatives(sol, xi):
    """v and its first five ξ-derivatives from the Riccati chain, no numerical differencing"""
    phi = sol.phi(xi)
    values = {Symbol.K: sol.k, Symbol.A0: sol.a0, Symbol.A2: sol.a2, Symbol.B2: sol.b2}
    return [d.evaluate(phi, values) for d in _profile_derivatives()]


def _riccati_terms(sol, xi):
    v0, v1, v2, v3, _, v5 = chain_derivatives(sol, xi)
    return _pde_terms(sol, v0, v1, v2, v3, v5, sol.lam * v1)


def pde_residual_riccati(sol, grid):
    """
    PDE residual with u_x.. and u_t = λv' from riccati_derive iterates evaluated at φ(ξ)

    Args:
        sol: ClosedFormSolution
        grid: GridSpec

    Returns:
        ResidualReport with method 'riccati-chain'
    """
    X, T = grid.mesh()
    xi = sol.xi(X, T).ravel()
    mask = pole_mask(sol, xi, grid.radius(sol))
    terms = _riccati_terms(sol, xi[~mask])
    return _summarize('riccati-chain', terms, mask)


# ----------------------------------------------------------------------
# Finite differences
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def fornberg_weights(derivative, offsets):
    """
    Exact weights of the derivative at 0 on the given integer nodes

    Args:
        derivative: order of the derivative
        offsets: tuple of node positions in units of the step

    Returns:
        tuple of Fractions, one per node
    """
    nodes = [Fraction(o) for o in offsets]
    n = len(nodes)
    if derivative >= n:
        raise InvalidParametersError(
            f"{n} nodes cannot resolve a derivative of order {derivative}")
    weights = [[Fraction(0)] * (derivative + 1) for _ in range(n)]
    weights[0][0] = Fraction(1)
    c1 = Fraction(1)
    c4 = nodes[0]
    for i in range(1, n):
        top = min(i, derivative)
        c2 = Fraction(1)
        c5 = c4
        c4 = nodes[i]
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for d in range(top, 0, -1):
                    weights[i][d] = c1 * (d * weights[i - 1][d - 1] - c5 * weights[i - 1][d]) / c2
                weights[i][0] = -c1 * c5 * weights[i - 1][0] / c2
            for d in range(top, 0, -1):
                weights[j][d] = (c4 * weights[j][d] - d * weights[j][d - 1]) / c3
            weights[j][0] = c4 * weights[j][0] / c3
        c1 = c2
    return tuple(row[derivative] for row in weights)


def stencil_half_width(derivative, accuracy):
    """Nodes on each side of a central stencil of the given even accuracy order"""
    if accuracy < 2 or accuracy % 2:
        raise InvalidParametersError(f"Central stencils need an even accuracy order, got {accuracy}")
    return (derivative + 1) // 2 + accuracy // 2 - 1


@lru_cache(maxsize=None)
def stencil_weights(derivative, accuracy=FD_ACCURACY):
    """
    Central stencil for a derivative

    Returns:
        (offsets, weights) with integer offsets and exact Fraction weights
    """
    half = stencil_half_width(derivative, accuracy)
    offsets = tuple(range(-half, half + 1))
    return offsets, fornberg_weights(derivative, offsets)


def _apply_stencil(samples, center, derivative, accuracy, h):
    """Derivative along the last axis of samples taken at offsets -center..center"""
    offsets, weights = stencil_weights(derivative, accuracy)
    columns = [center + o for o in offsets]
    w = np.array([float(c) for c in weights])
    return samples[..., columns] @ w / h ** derivative


def fd_exclusion_radius(radius, h):
    """Exclusion radius for finite-difference samples: max(ε, FD_GUARD_STEPS·h)"""
    return max(radius, FD_GUARD_STEPS * h)


def _fd_terms(sol, x, t, h, radius, accuracy):
    """Per-point PDE terms from finite differences of u(x, t), and the stencil mask"""
    half = max(stencil_half_width(d, accuracy) for d in range(1, 6))
    offsets = np.arange(-half, half + 1)
    # the time step moves ξ by λ·ht, keep that at h
    ht = h / max(1.0, abs(sol.lam))
    radius = fd_exclusion_radius(radius, h)
    xi_center = sol.xi(x, t)
    xi_space = sol.xi(x[:, None] + offsets[None, :] * h, t[:, None])
    xi_time = sol.xi(x[:, None], t[:, None] + offsets[None, :] * ht)
    mask = pole_mask(sol, xi_center, radius)
    mask |= np.any(pole_mask(sol, xi_space, radius), axis=1)
    mask |= np.any(pole_mask(sol, xi_time, radius), axis=1)
    valid = ~mask
    u_space = sol.profile(xi_space[valid])
    u_time = sol.profile(xi_time[valid])
    d = [u_space[:, half]] + [_apply_stencil(u_space, half, order, accuracy, h)
                              for order in range(1, 6)]
    u_t = _apply_stencil(u_time, half, 1, accuracy, ht)
    return _pde_terms(sol, d[0], d[1], d[2], d[3], d[5], u_t), mask


def _flat_points(grid):
    X, T = grid.mesh()
    return X.ravel(), T.ravel()


def pde_residual_fd(sol, grid, h=FD_STEP, accuracy=FD_ACCURACY):
    """
    PDE residual from central finite differences of u alone

    Args:
        sol: ClosedFormSolution
        grid: GridSpec
        h: step in x and in t
        accuracy: even accuracy order of the central stencils

    Returns:
        ResidualReport with method 'finite-difference'; a point whose stencil
        reaches into the exclusion zone of a pole is masked
    """
    x, t = _flat_points(grid)
    terms, mask = _fd_terms(sol, x, t, h, grid.radius(sol), accuracy)
    return _summarize('finite-difference', terms, mask)


@dataclass(frozen=True)
class MethodComparison:
    """Gap between the finite-difference and Riccati-chain residuals"""

    max_difference: float
    scaled_difference: float
    envelope: float
    n_points: int
    pole_free: bool = False

    @property
    def within_envelope(self):
        return self.scaled_difference <= self.envelope

    @property
    def absolute_within_envelope(self):
        """The envelope as an absolute bound, only stated for pole-free solutions"""
        if not self.pole_free:
            return None
        return self.max_difference <= self.envelope

    def to_dict(self):
        return {'max_difference': self.max_difference,
                'scaled_difference': self.scaled_difference,
                'envelope': self.envelope,
                'n_points': self.n_points,
                'pole_free': self.pole_free,
                'within_envelope': self.within_envelope,
                'absolute_within_envelope': self.absolute_within_envelope}


def compare_methods(sol, grid, h=FD_STEP, accuracy=FD_ACCURACY, envelope=FD_ENVELOPE):
    """
    |R_fd − R_chain| over the points both methods evaluate

    The envelope applies to the difference divided by max(1, largest PDE term)
    at each point, so it is an absolute bound wherever the terms stay below 1.
    For pole-free solutions the absolute gap is also held against it.
    """
    x, t = _flat_points(grid)
    pole_free = not sol.poles.offsets
    fd_terms, mask = _fd_terms(sol, x, t, h, grid.radius(sol), accuracy)
    chain_terms = _riccati_terms(sol, sol.xi(x, t)[~mask])
    n_points = int(np.count_nonzero(~mask))
    if n_points == 0:
        return MethodComparison(max_difference=0.0, scaled_difference=0.0, envelope=envelope,
                                n_points=0, pole_free=pole_free)
    difference = np.abs(sum(fd_terms) - sum(chain_terms))
    magnitude = np.max(np.abs(np.vstack(chain_terms)), axis=0)
    return MethodComparison(max_difference=float(np.max(difference)),
                            scaled_difference=float(np.max(difference / np.maximum(1.0, magnitude))),
                            envelope=envelope, n_points=n_points, pole_free=pole_free)


# ----------------------------------------------------------------------
# Traveling-wave identity
# ----------------------------------------------------------------------

def sample_points(sol, n=100, x_range=(-10.0, 10.0), t_range=(0.0, 0.25), delta=0.0,
                  clearance=None, seed=0):
    """
    Random (x, t) samples kept away from poles, also after the shift by δ

    The clearance starts at SAMPLE_CLEARANCE × pole spacing (× length scale for
    an isolated pole) and shrinks along SAMPLE_CLEARANCE_LADDER down to the
    grid exclusion radius when the shift λδ leaves no room at the wider one.

    Args:
        sol: ClosedFormSolution
        n: number of samples
        clearance: fixed minimal distance to a pole, disables the ladder
        seed: numpy random seed

    Returns:
        array of shape (n, 2)
    """
    scale = sol.pole_spacing or sol.length_scale
    ladder = [clearance] if clearance is not None else [f * scale for f in SAMPLE_CLEARANCE_LADDER]
    for radius in ladder:
        points = _place_samples(sol, n, x_range, t_range, delta, radius, seed)
        if points is not None:
            return points
    raise InvalidParametersError(
        f"Could not place sample points {ladder[-1]:.3g} away from the poles")


def _place_samples(sol, n, x_range, t_range, delta, clearance, seed):
    rng = np.random.default_rng(seed)
    kept = np.empty((0, 2))
    for _ in range(100):
        x = rng.uniform(*x_range, size=4 * n)
        t = rng.uniform(*t_range, size=4 * n)
        ok = sol.pole_distance(sol.xi(x, t)) >= clearance
        ok &= sol.pole_distance(sol.xi(x, t + delta)) >= clearance
        kept = np.vstack([kept, np.column_stack([x[ok], t[ok]])])
        if len(kept) >= n:
            return kept[:n]
    return None


@dataclass(frozen=True)
class TravelingWaveReport:
    """Shift deviation of u(x, t+δ) against u(x + λδ, t) at the sample points"""

    delta: float
    max_deviation: float
    scaled_deviation: float
    n_points: int

    def passes(self, tolerance=TRAVELING_WAVE_TOLERANCE):
        return self.scaled_deviation <= tolerance

    def to_dict(self):
        return {'delta': self.delta, 'max_deviation': self.max_deviation,
                'scaled_deviation': self.scaled_deviation, 'n_points': self.n_points}


def traveling_wave_check(sol, delta, points):
    """max |u(x, t+δ) − u(x + λδ, t)| over the sample points"""
    return traveling_wave_report(sol, delta, points).max_deviation


def traveling_wave_report(sol, delta, points):
    """
    Absolute and scaled shift deviation

    The scaled deviation divides each difference by max(1, |u(x, t+δ)|), so
    large values close to a pole are held to a relative bound.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    x, t = points[:, 0], points[:, 1]
    if delta == 0 or not len(points):
        return TravelingWaveReport(delta=float(delta), max_deviation=0.0, scaled_deviation=0.0,
                                   n_points=len(points))
    shifted = sol(x, t + delta)
    deviation = np.abs(shifted - sol(x + sol.lam * delta, t))
    return TravelingWaveReport(
        delta=float(delta),
        max_deviation=float(np.max(deviation)),
        scaled_deviation=float(np.max(deviation / np.maximum(1.0, np.abs(shifted)))),
        n_points=len(points),
    )


# ----------------------------------------------------------------------
# Riccati branch functions
# ----------------------------------------------------------------------

def branch_function(branch, k, allow_rational=True):
    """
    Vectorized φ(ξ) of one branch with its singular sets

    Returns:
        (phi, blow_up, vanish): phi maps ξ arrays to φ; blow_up and vanish are
        PoleSets for φ = ∞ and φ = 0
    """
    branch = check_branch(branch, k, allow_rational)

    def phi(xi):
        return riccati_phi(branch, k, xi)

    blow_up = pole_set(branch, k, 1, 0)
    vanish = pole_set(branch, k, 0, 1)
    return phi, blow_up, vanish


def riccati_branch_check(branch, k, xi, h=BRANCH_CHECK_STEP, accuracy=BRANCH_CHECK_ACCURACY):
    """
    max |φ' − (k + φ²)| with φ' from a central stencil

    Args:
        branch: Branch or name
        k: wavenumber parameter matching the branch
        xi: sample points away from the poles
    """
    phi, _, _ = branch_function(branch, k)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    offsets, weights = stencil_weights(1, accuracy)
    samples = phi(xi[:, None] + np.array(offsets, dtype=float)[None, :] * h)
    derivative = samples @ np.array([float(w) for w in weights]) / h
    return float(np.max(np.abs(derivative - (k + phi(xi) ** 2))))


def branch_check_points(branch, k, n=41):
    """Points where φ of the branch is far from its poles (at least 1.2/√|k|, or 1.2 when k = 0)"""
    branch = Branch.parse(branch)
    scale = 1.0 / np.sqrt(abs(k)) if k else 1.0
    if branch is Branch.TAN:
        return np.linspace(-0.3, 0.3, n) * scale
    if branch is Branch.COT:
        return (np.pi / 2 + np.linspace(-0.3, 0.3, n)) * scale
    if branch is Branch.TANH:
        return np.linspace(-3.0, 3.0, n) * scale
    side = np.linspace(1.2, 3.0, n // 2 + 1) * scale
    return np.concatenate([-side[::-1], side])


# ----------------------------------------------------------------------
# Stage
# ----------------------------------------------------------------------

class ResidualChecker:
    """Residual, method comparison and traveling-wave checks for closed forms"""

    def __init__(self, grid=None, h=FD_STEP, accuracy=FD_ACCURACY, delta=0.3, n_samples=100,
                 tolerance=RESIDUAL_TOLERANCE, verbose=False):
        self.grid = grid or GridSpec(t_values=(0.0, 1.0))
        self.h = h
        self.accuracy = accuracy
        self.delta = delta
        self.n_samples = n_samples
        self.tolerance = tolerance
        self.verbose = verbose

    def check(self, sol):
        """
        Returns:
            dict with both ResidualReports, the method comparison, the
            traveling-wave deviation and an overall `passed` flag
        """
        chain = pde_residual_riccati(sol, self.grid)
        fd = pde_residual_fd(sol, self.grid, h=self.h, accuracy=self.accuracy)
        comparison = compare_methods(sol, self.grid, h=self.h, accuracy=self.accuracy)
        points = sample_points(sol, n=self.n_samples, x_range=(self.grid.x_min, self.grid.x_max),
                               delta=self.delta)
        shift = traveling_wave_report(sol, self.delta, points)
        passed = chain.passes(self.tolerance) and comparison.within_envelope and shift.passes()
        if self.verbose:
            name = sol.label or f'family {sol.family_id} ({sol.branch.value})'
            mark = '✅' if passed else '❌'
            print(f"  {mark} {name:<22} k={sol.k:>5g}  chain={chain.scaled_residual:.2e}  "
                  f"fd-diff={comparison.scaled_difference:.2e}  shift={shift.scaled_deviation:.2e}  "
                  f"masked={chain.masked_fraction:.1%}")
        return {
            'solution': sol.describe(),
            'riccati_chain': chain.to_dict(),
            'finite_difference': fd.to_dict(),
            'comparison': comparison.to_dict(),
            'traveling_wave': shift.to_dict(),
            'passed': bool(passed),
        }

    def check_many(self, solutions):
        return [self.check(sol) for sol in solutions]


def perturb_speed(sol, delta_lambda=1.0):
    """Copy of a closed form with λ shifted, which must fail the residual check"""
    return replace(sol, lam=sol.lam + delta_lambda, label=None)


def constant_solution(value, params, k=-1.0, lam=0.0):
    """u ≡ value written as a closed form with a2 = b2 = 0"""
    branch = Branch.TANH if k < 0 else Branch.TAN
    return ClosedFormSolution(family_id=0, branch=branch, k=float(k), params=params,
                              a0=float(value), a2=0.0, b2=0.0, lam=float(lam),
                              poles=pole_set(branch, k, 0, 0))
