"""
Command-Line Interface
derive, verify, solve, eval, residual and report for the fifth-order KdV toolkit
"""

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Tuple

import pandas as pd

from src.balance_extract import derive_system
from src.errors import (BranchError, FkdvError, InvalidParametersError, NoRealSolutionError,
                        VerificationFailedError)
from src.exact_arith import parse_rational
from src.families import (FamilyVerifier, abc_constants, closed_form, get_family, get_printed)
from src.numeric_verify import (FD_STEP, GridSpec, ResidualChecker, eval_solution)
from src.report import SCHEMA_VERSION, ReproducibilityReport, oracle_agreement, to_json, k_text
from src.restricted_solver import family_table_values, solve_restricted
from src.riccati_calculus import PRESETS, FkdvParams


EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NO_REAL_SOLUTION = 3
EXIT_VERIFICATION_FAILED = 4

COMMANDS = ('derive', 'verify', 'solve', 'eval', 'residual', 'report')
FORMATS = {
    'derive': ('json', 'text'),
    'verify': ('json', 'text'),
    'solve': ('json', 'csv', 'text'),
    'eval': ('csv', 'json'),
    'residual': ('json', 'text'),
    'report': ('json',),
}


@dataclass
class RunConfig:
    """One CLI invocation after parsing"""

    command: str
    preset: Optional[str] = None
    explicit: Optional[Tuple[str, str, str, str]] = None
    symbolic: bool = False
    k: Optional[str] = None
    family: Optional[int] = None
    branch: Optional[str] = None
    solution: Optional[str] = None
    xi0: float = 0.0
    allow_rational: bool = False
    x_min: float = -10.0
    x_max: float = 10.0
    nx: int = 2001
    t_values: Tuple[float, ...] = (0.0,)
    epsilon: Optional[float] = None
    h: float = FD_STEP
    m: int = 2
    restricted: bool = False
    symbolic_only: bool = False
    jobs: int = 1
    output_dir: str = field(default_factory=lambda: os.environ.get('FKDV_OUTPUT_DIR', 'output'))
    output: Optional[str] = None
    fmt: Optional[str] = None
    quiet: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidParametersError(f"Unknown command {self.command!r}")
        if self.preset is not None and self.explicit is not None:
            raise InvalidParametersError("Give either --preset or explicit coefficients, not both")
        if self.fmt is None:
            self.fmt = FORMATS[self.command][0]
        if self.fmt not in FORMATS[self.command]:
            raise InvalidParametersError(
                f"{self.command} writes {', '.join(FORMATS[self.command])}, not {self.fmt}")

    @property
    def verbose(self):
        return not self.quiet and self.output != '-'

    def params(self, required=True):
        """FkdvParams from the preset or the explicit coefficients"""
        if self.preset is not None:
            return FkdvParams.from_preset(self.preset)
        if self.explicit is not None:
            return FkdvParams.custom(*self.explicit)
        if self.symbolic or not required:
            return None
        raise InvalidParametersError(
            f"{self.command} needs --preset or --alpha/--beta/--gamma/--omega")

    def k_value(self, allow_float=True):
        """k as a Fraction when given as 'p/q' or an integer, else a float"""
        if self.k is None:
            raise InvalidParametersError(f"{self.command} needs --k")
        try:
            return parse_rational(self.k)
        except InvalidParametersError:
            if not allow_float:
                raise
        try:
            return float(self.k)
        except ValueError:
            raise InvalidParametersError(f"Cannot read k = {self.k!r}") from None

    def grid(self):
        return GridSpec(x_min=self.x_min, x_max=self.x_max, t_values=self.t_values,
                        nx=self.nx, epsilon=self.epsilon)


def params_record(params):
    if params is None:
        return {'label': 'symbolic', 'alpha': 'alpha', 'beta': 'beta',
                'gamma': 'gamma', 'omega': 'omega'}
    return {'label': params.label, 'alpha': params.alpha.to_text(),
            'beta': params.beta.to_text(), 'gamma': params.gamma.to_text(),
            'omega': params.omega.to_text()}


def emit(config, text, default_name):
    """Write output to --output, to stdout for '-', or to output_dir/default_name"""
    if config.output == '-':
        sys.stdout.write(text)
        return None
    path = config.output or os.path.join(config.output_dir, default_name)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    if config.verbose:
        print(f"💾 Saved: {path}")
    return path


def _document(command, params, **body):
    document = {'schema': SCHEMA_VERSION, 'command': command, 'params': params_record(params)}
    document.update(body)
    return document


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def run_derive(config):
    params = None if config.symbolic else config.params(required=False)
    system = derive_system(params, m=config.m, general=not config.restricted)
    if config.verbose:
        print(f"✅ {len(system)} coefficient equations for {params_record(params)['label']}")
    if config.fmt == 'text':
        return emit(config, system.to_text() + '\n', 'derive.txt')
    document = _document('derive', params, m=config.m, restricted=config.restricted,
                         count=len(system), equations=system.to_records())
    return emit(config, to_json(document), 'derive.json')


def run_verify(config):
    params = None if config.symbolic else config.params(required=False)
    families = [config.family] if config.family is not None else None
    verifier = FamilyVerifier(families, verbose=config.verbose)
    certificates = verifier.verify()
    if params is not None and not config.symbolic_only:
        certificates += verifier.verify(params)
    constants = abc_constants(params).as_dict()
    verified = all(c.verified for c in certificates)
    if config.fmt == 'text':
        lines = [f"A = {constants['A']}  B = {constants['B']}  C = {constants['C']}"]
        for c in certificates:
            status = 'verified' if c.verified else f"FAILED at {c.failing_powers()}"
            lines.append(f"family {c.family_id} [{c.mode}] lambda = {c.lam}: {status}")
        emit(config, '\n'.join(lines) + '\n', 'verify.txt')
    else:
        document = _document('verify', params, constants=constants, verified=verified,
                             certificates=[c.to_dict() for c in certificates])
        emit(config, to_json(document), 'verify.json')
    if not verified:
        failing = sorted({c.family_id for c in certificates if not c.verified})
        raise VerificationFailedError(f"Families {failing} did not verify")


def run_solve(config):
    params = config.params()
    k = config.k_value()
    tuples = solve_restricted(params, k, verbose=config.verbose)
    agrees = oracle_agreement(tuples, family_table_values(params, k))
    if config.verbose:
        mark = '✅' if agrees else '⚠️'
        print(f"{mark} {len(tuples)} solutions, family table {'agrees' if agrees else 'differs'}")
    records = [t.to_dict() for t in tuples]
    if config.fmt == 'csv':
        columns = ['a0', 'a2', 'b2', 'lambda', 'residual_norm', 'exact', 'degenerate']
        rows = []
        for r in records:
            row = {key: r[key] for key in columns}
            row['families'] = ' '.join(f"{f['family']}:{f['root']}" for f in r['families'])
            rows.append(row)
        frame = pd.DataFrame(rows, columns=columns + ['families'])
        return emit(config, frame.to_csv(index=False, float_format='%.17g'), 'solve.csv')
    if config.fmt == 'text':
        lines = [f"k = {k_text(k)}"]
        for r in records:
            families = ', '.join(f"{f['family']} ({f['root']})" for f in r['families']) or 'none'
            lines.append(f"a0={r['a0']!r} a2={r['a2']!r} b2={r['b2']!r} "
                         f"lambda={r['lambda']!r}  families: {families}")
        return emit(config, '\n'.join(lines) + '\n', 'solve.txt')
    document = _document('solve', params, k=k_text(k), oracle_agrees=agrees, solutions=records)
    return emit(config, to_json(document), 'solve.json')


def _solution(config):
    """ClosedFormSolution selected by --solution or by --family and --branch"""
    params = config.params()
    if config.solution is not None:
        printed = get_printed(config.solution)
        family, branch = printed.family_id, printed.branch
    else:
        if config.family is None or config.branch is None:
            raise InvalidParametersError("Give --solution, or --family with --branch")
        family, branch = get_family(config.family), config.branch
    return closed_form(family, branch, config.k_value(), params, xi0=config.xi0,
                       allow_rational=config.allow_rational)


def run_eval(config):
    sol = _solution(config)
    values = eval_solution(sol, config.grid())
    if config.verbose:
        print(f"✅ Evaluated {sol.label or 'family ' + str(sol.family_id)} "
              f"({values.u.size} points, {values.masked_fraction:.1%} masked)")
    frame = values.to_frame()
    if config.fmt == 'json':
        points = [{'x': float(x), 't': float(t), 'u': None if masked else float(u),
                   'mask': bool(masked)}
                  for x, t, u, masked in frame.itertuples(index=False, name=None)]
        document = _document('eval', sol.params, solution=sol.describe(), points=points)
        return emit(config, to_json(document), 'eval.json')
    return emit(config, frame.to_csv(index=False, float_format='%.17g'), 'eval.csv')


def run_residual(config):
    sol = _solution(config)
    checker = ResidualChecker(grid=config.grid(), h=config.h, verbose=config.verbose)
    result = checker.check(sol)
    if config.fmt == 'text':
        chain, fd = result['riccati_chain'], result['finite_difference']
        lines = [f"riccati-chain      max|R| = {chain['max_abs_residual']!r}  "
                 f"scaled = {chain['scaled_residual']!r}",
                 f"finite-difference  max|R| = {fd['max_abs_residual']!r}  "
                 f"scaled = {fd['scaled_residual']!r}",
                 f"method gap (scaled) = {result['comparison']['scaled_difference']!r}",
                 f"traveling wave      max = {result['traveling_wave']['max_deviation']!r}  "
                 f"scaled = {result['traveling_wave']['scaled_deviation']!r}",
                 f"passed = {result['passed']}"]
        emit(config, '\n'.join(lines) + '\n', 'residual.txt')
    else:
        emit(config, to_json(_document('residual', sol.params, **result)), 'residual.json')
    if not result['passed']:
        raise VerificationFailedError("Residual checks did not pass")


def run_report(config):
    report = ReproducibilityReport(output_dir=config.output_dir, n_jobs=config.jobs,
                                   grid=GridSpec(x_min=config.x_min, x_max=config.x_max,
                                                 t_values=config.t_values, nx=config.nx,
                                                 epsilon=config.epsilon),
                                   verbose=config.verbose)
    document = report.run()
    if config.output == '-':
        sys.stdout.write(to_json(document))
    else:
        report.write(document)
    if not document['summary']['passed']:
        raise VerificationFailedError("The reproducibility report has failing checks")


HANDLERS = {
    'derive': run_derive,
    'verify': run_verify,
    'solve': run_solve,
    'eval': run_eval,
    'residual': run_residual,
    'report': run_report,
}


def run(config):
    """
    Execute one configured command

    Returns:
        exit status 0; failures raise FkdvError subclasses
    """
    HANDLERS[config.command](config)
    return EXIT_OK


# ----------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--output-dir', default=None,
                        help='Directory for output files (default: $FKDV_OUTPUT_DIR or output)')
    common.add_argument('--output', default=None, help="Output file, or '-' for stdout")
    common.add_argument('--format', dest='fmt', default=None, choices=['json', 'csv', 'text'],
                        help='Output format')
    common.add_argument('--quiet', action='store_true', help='Suppress status lines')

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument('--preset', choices=sorted(PRESETS), help='Named special case')
    for name in ('alpha', 'beta', 'gamma', 'omega'):
        params.add_argument(f'--{name}', help=f"{name} as an integer or 'p/q'")

    solution = argparse.ArgumentParser(add_help=False)
    solution.add_argument('--k', help="Wavenumber parameter: integer, 'p/q' or decimal")
    solution.add_argument('--family', type=int, help='Family id 1..6')
    solution.add_argument('--branch', help='tan, cot, tanh, coth, rational (csch = tanh)')
    solution.add_argument('--solution', help='Printed solution u1..u12')
    solution.add_argument('--xi0', type=float, default=0.0, help='Phase shift')
    solution.add_argument('--allow-rational', action='store_true',
                          help='Admit the k = 0 branch phi = -1/xi')

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument('--x-min', type=float, default=-10.0)
    grid.add_argument('--x-max', type=float, default=10.0)
    grid.add_argument('--nx', type=int, default=2001)
    grid.add_argument('--t', dest='t_values', type=float, action='append',
                      help='Time value (repeatable)')
    grid.add_argument('--epsilon', type=float, help='Pole-exclusion radius')

    parser = argparse.ArgumentParser(
        prog='python -m src.cli',
        description='Extended tanh toolkit for u_t + w u_xxxxx + a u u_xxx + b u_x u_xx + g u^2 u_x = 0')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('derive', parents=[common, params], help='Coefficient equations')
    p.add_argument('--symbolic', action='store_true', help='Free alpha, beta, gamma, omega')
    p.add_argument('--m', type=int, default=2, help='Ansatz order (1 or 2)')
    p.add_argument('--restricted', action='store_true', help='Use the a1 = b1 = 0 ansatz')

    p = sub.add_parser('verify', parents=[common, params], help='Family certificates')
    p.add_argument('--family', type=int, help='Only this family')
    p.add_argument('--symbolic', action='store_true', help='Ignore concrete parameters')
    p.add_argument('--symbolic-only', action='store_true',
                   help='Skip the exact check at the given parameters')

    p = sub.add_parser('solve', parents=[common, params], help='Cascade solve at one k')
    p.add_argument('--k', required=True, help="Wavenumber parameter: integer, 'p/q' or decimal")

    sub.add_parser('eval', parents=[common, params, solution, grid], help='Closed form on a grid')

    p = sub.add_parser('residual', parents=[common, params, solution, grid],
                       help='PDE residual by both methods')
    p.add_argument('--h', type=float, default=FD_STEP, help='Finite-difference step')

    p = sub.add_parser('report', parents=[common, grid], help='Reproducibility report')
    p.add_argument('--jobs', type=int, default=1, help='Parallel solve workers')
    return parser


def config_from_args(args):
    """RunConfig from parsed arguments; parameter rules enforced here"""
    explicit = None
    given = [getattr(args, name, None) for name in ('alpha', 'beta', 'gamma', 'omega')]
    if any(v is not None for v in given):
        if not all(v is not None for v in given):
            raise InvalidParametersError("Explicit coefficients need all of --alpha --beta --gamma --omega")
        explicit = tuple(given)
    options = {
        'command': args.command,
        'preset': getattr(args, 'preset', None),
        'explicit': explicit,
        'output': args.output,
        'fmt': args.fmt,
        'quiet': args.quiet,
    }
    if args.output_dir is not None:
        options['output_dir'] = args.output_dir
    for name in ('symbolic', 'k', 'family', 'branch', 'solution', 'xi0', 'allow_rational',
                 'x_min', 'x_max', 'nx', 'epsilon', 'h', 'm', 'restricted', 'symbolic_only',
                 'jobs'):
        if getattr(args, name, None) is not None:
            options[name] = getattr(args, name)
    if getattr(args, 't_values', None):
        options['t_values'] = tuple(args.t_values)
    elif args.command in ('residual', 'report'):
        options['t_values'] = (0.0, 1.0)
    config = RunConfig(**options)
    # fail at parse time on γ = 0, ω = 0 or malformed rationals
    config.params(required=False)
    return config


def main(argv=None):
    """Parse arguments, run, and map errors to exit statuses"""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(config_from_args(args))
    except (InvalidParametersError, BranchError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except NoRealSolutionError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_NO_REAL_SOLUTION
    except VerificationFailedError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_VERIFICATION_FAILED
    except FkdvError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
