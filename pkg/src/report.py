"""
Reproducibility Report
Runs balance, derivation, certification, solving and residual checks over all presets
"""

import json
import math
import os
import re
from fractions import Fraction

import pandas as pd

from src.balance_extract import balance, derive_system
from src.families import (FamilyVerifier, abc_constants, certified_lambda, family_table,
                          printed_lambda_check, printed_solution, printed_solutions)
from src.numeric_verify import GridSpec, ResidualChecker
from src.restricted_solver import family_table_values, solve_many
from src.riccati_calculus import PRESET_TITLES, PRESETS, FkdvParams


SCHEMA_VERSION = 1
K_VALUES = (-2, -1, Fraction(-1, 4), Fraction(1, 4), 1)
ORACLE_TOLERANCE = 1e-12


FLOAT_MARK = '\x00'
_FLOAT_TOKEN = re.compile(r'"\\u0000([^"\\]*)\\u0000"')


def float_text(value):
    """Fixed 17-significant-digit text of a float, always with a decimal point or exponent"""
    if math.isnan(value):
        return 'NaN'
    if math.isinf(value):
        return 'Infinity' if value > 0 else '-Infinity'
    text = f'{value:.17g}'
    if not any(c in text for c in '.e'):
        text += '.0'
    return text


def _mark_floats(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return f'{FLOAT_MARK}{float_text(value)}{FLOAT_MARK}'
    if isinstance(value, dict):
        return {key: _mark_floats(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_mark_floats(item) for item in value]
    return value


def to_json(document):
    """Canonical JSON text: sorted keys, two-space indent, floats with 17 significant digits"""
    text = json.dumps(_mark_floats(document), indent=2, sort_keys=True, ensure_ascii=False)
    return _FLOAT_TOKEN.sub(r'\1', text) + '\n'


def k_text(k):
    return str(Fraction(k)) if isinstance(k, (int, Fraction)) else repr(float(k))


def _close(a, b, tolerance):
    return all(abs(x - y) <= tolerance * max(1.0, abs(x), abs(y)) for x, y in zip(a, b))


def oracle_agreement(solutions, expected, tolerance=ORACLE_TOLERANCE):
    """True when solver tuples and family evaluations coincide as sets"""
    found = [s.as_floats() for s in solutions]
    return (all(any(_close(f, e, tolerance) for e in expected) for f in found)
            and all(any(_close(e, f, tolerance) for f in found) for e in expected))


def residual_cases():
    """(label, k) for every printed solution: k = -1 on hyperbolic, +1 on trigonometric branches"""
    return [(p.label, -1 if p.branch.kind == 'hyperbolic' else 1) for p in printed_solutions()]


class ReproducibilityReport:
    """End-to-end run over every preset, written as report.json and report.txt"""

    def __init__(self, output_dir='output', presets=None, k_values=K_VALUES, n_jobs=1,
                 grid=None, verbose=True):
        """
        Args:
            output_dir: directory for report.json / report.txt
            presets: preset names (default: all five)
            k_values: wavenumbers for the cascade solves
            n_jobs: joblib workers for the solves
            grid: GridSpec for the residual checks
            verbose: print STEP banners and progress
        """
        self.output_dir = output_dir
        self.presets = list(presets or PRESETS)
        self.k_values = tuple(k_values)
        self.n_jobs = n_jobs
        self.grid = grid or GridSpec(t_values=(0.0, 1.0))
        self.verbose = verbose
        self.params = {name: FkdvParams.from_preset(name) for name in self.presets}

    def _step(self, number, title):
        if self.verbose:
            print("\n" + "=" * 70)
            print(f"STEP {number}: {title}")
            print("=" * 70)

    def balance_step(self):
        self._step(1, "BALANCING THE ANSATZ ORDER")
        report = balance()
        if self.verbose:
            for m, degrees, hit in report.trace[:4]:
                print(f"  m={m}: degrees {degrees} {'✅' if hit else ''}")
            print(f"📊 m = {report.m}, leading degrees {report.degrees}")
        return {'m': report.m, 'degrees': list(report.degrees),
                'trace': [{'m': m, 'degrees': list(d), 'match': hit} for m, d, hit in report.trace]}

    def derive_step(self):
        self._step(2, "DERIVING THE COEFFICIENT SYSTEM")
        symbolic = derive_system(None)
        out = {'symbolic': {'count': len(symbolic), 'equations': symbolic.to_records()},
               'presets': {}}
        for name, params in self.params.items():
            system = derive_system(params)
            out['presets'][name] = {'count': len(system),
                                    'top': {'power': system.powers()[0],
                                            'equation': system.entries[0][1].to_text()}}
            if self.verbose:
                print(f"  ✅ {name:<4} {len(system)} equations, top power {system.powers()[0]}")
        if self.verbose:
            print(f"📊 Symbolic system: {len(symbolic)} equations")
        return out

    def verify_step(self):
        self._step(3, "CERTIFYING THE SIX FAMILIES")
        verifier = FamilyVerifier(verbose=self.verbose)
        out = {'symbolic': [c.to_dict() for c in verifier.verify()], 'presets': {},
               'lambda_formulas': {}}
        for family in family_table():
            text, agrees = certified_lambda(family)
            out['lambda_formulas'][str(family.id)] = {'formula': text, 'agrees': agrees}
        for name, params in self.params.items():
            out['presets'][name] = [c.to_dict() for c in verifier.verify(params)]
        return out

    def constants_step(self):
        self._step(4, "CONSTANTS A, B, C")
        rows = []
        for name, params in self.params.items():
            constants = abc_constants(params)
            rows.append({'preset': name, 'equation': PRESET_TITLES[name],
                         'alpha': params.alpha.to_text(), 'beta': params.beta.to_text(),
                         'gamma': params.gamma.to_text(), 'omega': params.omega.to_text(),
                         'discriminant': params.discriminant().to_text(),
                         'A': constants.A.to_text(), 'B': constants.B.to_text(),
                         'C': constants.C.to_text()})
        if self.verbose:
            print(pd.DataFrame(rows).to_string(index=False))
        return rows

    def solve_step(self):
        self._step(5, "CASCADE SOLVES AGAINST THE FAMILY TABLE")
        jobs = [(params, k) for params in self.params.values() for k in self.k_values]
        if self.verbose:
            print(f"🔍 {len(jobs)} solves on {self.n_jobs} worker(s)...")
        results = solve_many(jobs, n_jobs=self.n_jobs)
        out = []
        for (params, k), (label, _, tuples) in zip(jobs, results):
            agrees = oracle_agreement(tuples, family_table_values(params, k))
            out.append({'preset': label, 'k': k_text(k), 'oracle_agrees': agrees,
                        'solutions': [t.to_dict() for t in tuples]})
            if self.verbose:
                mark = '✅' if agrees else '❌'
                print(f"  {mark} {label:<4} k={k_text(k):>5}: {len(tuples)} solutions")
        return out

    def residual_step(self):
        self._step(6, "PDE RESIDUALS OF u1..u12")
        checker = ResidualChecker(grid=self.grid, verbose=self.verbose)
        out = []
        for name, params in self.params.items():
            if self.verbose:
                print(f"\n🔍 {name} ({PRESET_TITLES[name]})")
            for label, k in residual_cases():
                result = checker.check(printed_solution(label, params, k))
                result['preset'] = name
                out.append(result)
        return out

    def speed_step(self):
        self._step(7, "PRINTED WAVE SPEEDS AGAINST CERTIFIED λ")
        out = {'symbolic': printed_lambda_check(None), 'presets': {}}
        for name, params in self.params.items():
            out['presets'][name] = printed_lambda_check(params)
        if self.verbose:
            for row in out['symbolic']:
                mark = '✅' if row['agrees'] else '⚠️'
                print(f"  {mark} {row['label']:<4} printed {row['printed_speed']:<10} "
                      f"certified family {row['family']}")
        return out

    def run(self):
        """
        Execute every step

        Returns:
            report document (dict) with a top-level "schema" field
        """
        if self.verbose:
            print("=" * 70)
            print(" FIFTH-ORDER KdV - EXTENDED TANH REPRODUCIBILITY RUN")
            print("=" * 70)
        document = {
            'schema': SCHEMA_VERSION,
            'presets': self.presets,
            'k_values': [k_text(k) for k in self.k_values],
            'balance': self.balance_step(),
            'derive': self.derive_step(),
            'verify': self.verify_step(),
            'constants': self.constants_step(),
            'solve': self.solve_step(),
            'residuals': self.residual_step(),
            'speeds': self.speed_step(),
        }
        document['summary'] = summarize(document)
        return document

    def write(self, document):
        """Write report.json and report.txt into output_dir"""
        os.makedirs(self.output_dir, exist_ok=True)
        json_path = os.path.join(self.output_dir, 'report.json')
        text_path = os.path.join(self.output_dir, 'report.txt')
        with open(json_path, 'w', encoding='utf-8') as f:
            f.write(to_json(document))
        with open(text_path, 'w', encoding='utf-8') as f:
            f.write(render_text(document))
        if self.verbose:
            print(f"\n💾 Report saved: {json_path}")
            print(f"💾 Report saved: {text_path}")
        return json_path, text_path


def summarize(document):
    """Pass/fail counts used by the CLI exit status"""
    symbolic_ok = all(c['verified'] for c in document['verify']['symbolic'])
    presets_ok = all(c['verified'] for certs in document['verify']['presets'].values()
                     for c in certs)
    oracle_ok = all(row['oracle_agrees'] for row in document['solve'])
    residuals_ok = all(row['passed'] for row in document['residuals'])
    return {
        'families_verified': symbolic_ok and presets_ok,
        'oracle_agrees': oracle_ok,
        'residuals_passed': residuals_ok,
        'speed_mismatches': sorted({row['label'] for row in document['speeds']['symbolic']
                                    if not row['agrees']}),
        'passed': symbolic_ok and presets_ok and oracle_ok and residuals_ok,
    }


def render_text(document):
    """Plain-text rendering of a report document"""
    lines = []

    def section(title):
        lines.extend(['', '=' * 70, title, '=' * 70])

    lines.append('FIFTH-ORDER KdV - EXTENDED TANH REPRODUCIBILITY REPORT')
    section('BALANCE')
    lines.append(f"m = {document['balance']['m']}, leading degrees {document['balance']['degrees']}")

    section('COEFFICIENT SYSTEM (symbolic)')
    for record in document['derive']['symbolic']['equations']:
        lines.append(f"phi^{record['power']:>3}: {record['equation']} = 0")

    section('CONSTANTS')
    lines.append(pd.DataFrame(document['constants']).to_string(index=False))

    section('FAMILY CERTIFICATES')
    rows = []
    for cert in document['verify']['symbolic']:
        rows.append({'family': cert['family'], 'mode': cert['mode'],
                     'verified': cert['verified'], 'lambda': cert['lambda']})
    for certs in document['verify']['presets'].values():
        for cert in certs:
            rows.append({'family': cert['family'], 'mode': cert['mode'],
                         'verified': cert['verified'], 'lambda': cert['lambda']})
    lines.append(pd.DataFrame(rows).to_string(index=False))

    section('CASCADE SOLVES')
    rows = [{'preset': r['preset'], 'k': r['k'], 'solutions': len(r['solutions']),
             'oracle_agrees': r['oracle_agrees']} for r in document['solve']]
    lines.append(pd.DataFrame(rows).to_string(index=False))

    section('PDE RESIDUALS')
    rows = []
    for r in document['residuals']:
        rows.append({'preset': r['preset'], 'label': r['solution']['label'],
                     'k': r['solution']['k'],
                     'chain_scaled': f"{r['riccati_chain']['scaled_residual']:.2e}",
                     'fd_gap': f"{r['comparison']['scaled_difference']:.2e}",
                     'shift': f"{r['traveling_wave']['scaled_deviation']:.2e}",
                     'masked': f"{r['riccati_chain']['masked_fraction']:.3f}",
                     'passed': r['passed']})
    lines.append(pd.DataFrame(rows).to_string(index=False))

    section('PRINTED WAVE SPEEDS')
    rows = [{'label': r['label'], 'family': r['family'], 'printed': r['printed_speed'],
             'agrees': r['agrees'], 'certified': r['certified']}
            for r in document['speeds']['symbolic']]
    lines.append(pd.DataFrame(rows).to_string(index=False))

    section('SUMMARY')
    for key, value in document['summary'].items():
        lines.append(f"{key:<20} {value}")
    return '\n'.join(lines) + '\n'


def main():
    output_dir = os.environ.get('FKDV_OUTPUT_DIR', 'output')
    report = ReproducibilityReport(output_dir=output_dir)
    report.write(report.run())


if __name__ == "__main__":
    main()
