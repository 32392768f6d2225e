#!/usr/bin/env python3
"""
WMHA Checker
Builds weak multiplier Hopf algebras from groupoid or separability files,
runs the law suites (axioms, integrals, transfer, duality, radford) and
prints or saves a deterministic report.
"""

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from datetime import datetime

from cg_algebra import CgAlgebra, build_cg, smallest_idempotent_check
from duality import (
    DualityError,
    bidual,
    biduality_iso,
    build_dual,
    check_dual,
    check_dual_integrals,
    dual_to_cg_witness,
    source_target_dualities,
)
from exact_linalg import LinMap, format_key, format_scalar
from groupoid import GroupoidError, load_groupoid
from integrals import (
    IntegralCertificate,
    IntegralError,
    InternalConsistencyError,
    check_invariance_oracles,
    check_transfer_relations,
    compose_antipode,
    enumerate_left_integrals,
    enumerate_right_integrals,
    faithful_set_check,
)
from kg_algebra import KgAlgebra, build_kg
from separability import (
    SeparabilityError,
    build_sep_dual,
    build_sep_wmha,
    check_identification,
    check_sep_properties,
    load_sep,
    sep_dual_integrals_and_radford,
)
from wmha_core import CheckSettings, LawReport, LawResult, WmhaError, check_axioms, check_isomorphism

logger = logging.getLogger("wmha")

SCHEMA = "wmha-report/1"
KINDS = ("kg", "cg", "sep", "dual-of", "bidual-of")
BASE_KINDS = ("kg", "cg", "sep")
SUITES = ("axioms", "integrals", "transfer", "duality", "radford")
FORMATS = ("text", "json")
COMMAND_SUITES = {
    "integrals": ("integrals",),
    "dual": ("duality",),
    "radford": ("radford",),
}

BUILT_IN_DEFAULTS = {
    "max_exhaustive_dim": 64,
    "sample_size": 200,
    "jobs": 1,
    "seed": 0,
    "format": "text",
    "suites": ["axioms"],
}


class InputError(ValueError):
    """Bad command line, configuration or input file."""


def load_config():
    """Load configuration from config.json
    Returns: dict with config values, or empty dict if file not found"""
    return _load_json_beside_script('config.json')


def load_profiles():
    """Load named presets from profiles.json"""
    return _load_json_beside_script('profiles.json').get('profiles', {})


def _load_json_beside_script(name):
    script_dir = os.path.dirname(os.path.abspath(__file__))
    path = os.path.join(script_dir, name)

    if os.path.exists(path):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except (json.JSONDecodeError, IOError) as e:
            print(f"⚠️  Warning: Could not load {name}: {e}")
            return {}
    return {}


def merge_profile(config, profile_name, profiles=None):
    """Overlay a profile's sections on the config; unknown profile names are input errors."""
    if not profile_name:
        return config
    profiles = load_profiles() if profiles is None else profiles
    if profile_name not in profiles:
        raise InputError(f"unknown profile: {profile_name!r} (known: {', '.join(sorted(profiles)) or 'none'})")
    merged = {k: dict(v) if isinstance(v, dict) else v for k, v in config.items()}
    for section, overrides in profiles[profile_name].items():
        if isinstance(overrides, dict):
            merged.setdefault(section, {})
            merged[section].update(overrides)
        else:
            merged[section] = overrides
    return merged


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str
    kind: str = "kg"
    base: str = "kg"
    suites: tuple = ("axioms",)
    output_format: str = "text"
    jobs: int = 1
    seed: int = 0
    max_exhaustive_dim: int = 64
    sample_size: int = 200
    log: bool = False
    log_dir: str | None = None
    output: str | None = None
    report_timing: bool = False

    def __post_init__(self):
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise InputError(f"unknown suite(s): {', '.join(unknown)} (known: {', '.join(SUITES)})")
        if self.kind not in KINDS:
            raise InputError(f"unknown kind: {self.kind!r}")
        if self.base not in BASE_KINDS:
            raise InputError(f"--base must be one of {', '.join(BASE_KINDS)}")
        if self.output_format not in FORMATS:
            raise InputError(f"unknown format: {self.output_format!r}")
        if self.jobs < 1 or self.max_exhaustive_dim < 0 or self.sample_size < 1:
            raise InputError("jobs and sample size must be positive")

    @property
    def primal_kind(self):
        return self.kind if self.kind in BASE_KINDS else self.base

    @property
    def settings(self):
        return CheckSettings(self.max_exhaustive_dim, self.sample_size, self.seed, self.jobs)


def build_run_config(args, config):
    """Flag > profile > config.json > built-in default."""
    defaults = dict(BUILT_IN_DEFAULTS)
    defaults.update(config.get('defaults', {}))
    output = config.get('output', {})

    def pick(flag, key):
        return flag if flag is not None else defaults[key]

    if args.command in COMMAND_SUITES and args.suites is None:
        suites = COMMAND_SUITES[args.command]
    elif args.suites is not None:
        suites = tuple(s.strip() for s in args.suites.split(',') if s.strip())
    else:
        suites = tuple(defaults['suites'])

    try:
        return RunConfig(
            command=args.command,
            input=args.input,
            kind=args.kind,
            base=args.base,
            suites=suites,
            output_format=pick(args.format, 'format'),
            jobs=int(pick(args.jobs, 'jobs')),
            seed=int(pick(args.seed, 'seed')),
            max_exhaustive_dim=int(pick(args.max_exhaustive_dim, 'max_exhaustive_dim')),
            sample_size=int(defaults['sample_size']),
            log=args.log,
            log_dir=output.get('log_dir'),
            output=args.output,
            report_timing=bool(output.get('report_timing', False)),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"bad configuration value: {e}") from e


# --- Building instances ---

def load_input(config):
    """Returns: the validated groupoid or separability data named by --input"""
    if not os.path.exists(config.input):
        raise InputError(f"file not found: {config.input}")
    if config.primal_kind == 'sep':
        return load_sep(config.input)
    return load_groupoid(config.input)


def build_primal(config, source):
    builders = {'kg': build_kg, 'cg': build_cg, 'sep': build_sep_wmha}
    return builders[config.primal_kind](source)


def build_instance(config, source):
    """Returns: (the instance under test, its primal)"""
    primal = build_primal(config, source)
    if config.kind == 'dual-of':
        return build_dual(primal), primal
    if config.kind == 'bidual-of':
        return bidual(primal), primal
    return primal, primal


# --- Suites ---

def _verdict(name, ok, detail=""):
    return LawResult(name, "ok" if ok else "fail", None if ok else (), "" if ok else detail, 1, True)


def _designated_or_enumerated(W):
    phi = W.designated_integral()
    if phi is not None:
        return phi
    left = enumerate_left_integrals(W)
    if not left:
        raise IntegralError(f"{W.name} has no left integral")
    return left[0]


def suite_axioms(W, primal, source, config):
    report = check_axioms(W, config.settings)
    if isinstance(W, CgAlgebra):
        report = report.merged(LawReport((_verdict("smallest idempotent", smallest_idempotent_check(W)),)))
    return report, {}


def suite_integrals(W, primal, source, config):
    left = enumerate_left_integrals(W)
    right = enumerate_right_integrals(W)
    results = []
    for side, family in (("left", left), ("right", right)):
        verdicts = [check_invariance_oracles(phi, W, side) for phi in family]
        results.append(_verdict(f"{side} invariance oracles agree", all(v.agree and v.invariant for v in verdicts),
                                "membership, Sweedler and F formulas disagree"))
    phi = _designated_or_enumerated(W)
    faithful = faithful_set_check([phi], W)
    results.append(_verdict("designated integral faithful", faithful, "kernel and E-span tests reject it"))
    extras = {"left_integrals": len(left), "right_integrals": len(right)}
    if faithful:
        certificate = IntegralCertificate.build(phi, W, "left")
        sigma = certificate.modular_automorphism
        if sigma is not None:
            extras["modular_automorphism_identity"] = sigma == LinMap.identity(W.basis)
    return LawReport(tuple(results), config.seed), extras


def suite_transfer(W, primal, source, config):
    phi = _designated_or_enumerated(W)
    psi = compose_antipode(phi, W)
    return check_transfer_relations(phi, psi, W, config.settings), {}


def suite_duality(W, primal, source, config):
    D = build_dual(W)
    report = check_axioms(D, config.settings).merged(check_dual(D, config.settings))
    report = report.merged(source_target_dualities(W, D, config.settings))
    integral_checks = check_dual_integrals(D)
    report = report.merged(LawReport(tuple(
        _verdict(f"dual integrals {name.replace('_', ' ')}", ok) for name, ok in sorted(integral_checks.items())
    )))
    extras = {
        "dual_dimension": D.dimension,
        "dual_E_support": len(D.idempotent_element()),
        "dual_left_integrals": len(enumerate_left_integrals(D)),
        "dual_right_integrals": len(enumerate_right_integrals(D)),
    }
    if isinstance(W, KgAlgebra):
        _, _, table, witness = dual_to_cg_witness(W.groupoid, config.settings)
        report = report.merged(witness)
        extras["cg_witness"] = {k: f"λ_{v}" for k, v in table.items()}
    if config.command == 'dual':
        extras["structure"] = structure_constants(D)
    return report, extras


def suite_radford(W, primal, source, config):
    if config.primal_kind != 'sep':
        raise InputError("the radford suite needs separability input (--kind sep or --base sep)")
    dual = build_sep_dual(source)
    result = sep_dual_integrals_and_radford(dual, config.settings)
    report = check_axioms(dual, config.settings).merged(result.report)
    report = report.merged(check_sep_properties(dual, config.settings))
    report = report.merged(check_identification(dual, build_dual(build_sep_wmha(source)), config.settings))
    return report, {"diamond_dimension": dual.dimension}


SUITE_RUNNERS = {
    "axioms": suite_axioms,
    "integrals": suite_integrals,
    "transfer": suite_transfer,
    "duality": suite_duality,
    "radford": suite_radford,
}


def structure_constants(W):
    """Product table, counit and antipode in report form."""
    return {
        "basis": [format_key(k) for k in W.basis],
        "product": [
            [format_key(a), format_key(b), {format_key(k): format_scalar(v) for k, v in W.product(a, b).items()}]
            for a in W.basis for b in W.basis if W.product(a, b)
        ],
        "counit": {format_key(k): format_scalar(W.counit_basis(k)) for k in W.basis},
        "antipode": {
            format_key(k): {format_key(t): format_scalar(v) for t, v in W.antipode_basis(k).items()}
            for k in W.basis
        },
    }


def run_bidual(primal, config):
    DD = bidual(primal)
    iso = check_isomorphism(primal, DD, biduality_iso(primal, DD), config.settings)
    return check_axioms(DD, config.settings).merged(iso), {"bidual_dimension": DD.dimension}


def run(config):
    """Returns: (exit status, report dict)"""
    source = load_input(config)
    report = {
        "schema": SCHEMA,
        "command": config.command,
        "input": os.path.basename(config.input),
        "kind": config.kind,
        "seed": config.seed,
        "suites": {},
    }
    if config.command == 'validate':
        report["ok"] = True
        report["instance"] = {"name": getattr(source, 'name', '')}
        return 0, report

    W, primal = build_instance(config, source)
    logger.info("running %s on %r with suites %s", config.command, W, ",".join(config.suites))
    report["instance"] = W.describe()
    timing = {}

    planned = [("bidual", None)] if config.command == 'bidual' else [(s, SUITE_RUNNERS[s]) for s in config.suites]
    for name, runner in planned:
        start = time.perf_counter()
        if runner is None:
            laws, extras = run_bidual(primal, config)
        else:
            laws, extras = runner(W, primal, source, config)
        timing[name] = round(time.perf_counter() - start, 3)
        entry = {"ok": laws.ok, "laws": laws.to_dict()["laws"]}
        entry.update(extras)
        report["suites"][name] = entry

    report["ok"] = all(entry["ok"] for entry in report["suites"].values())
    if config.report_timing:
        report["timing"] = timing
    return (0 if report["ok"] else 1), report


# --- Output ---

def print_report(report):
    """Operator-facing summary of a run"""
    print("\n" + "=" * 70)
    print(f"📄 {report['command']} {report['input']} ({report['kind']}, seed {report['seed']})")
    instance = report.get("instance", {})
    if "dimension" in instance:
        print(f"   {instance['name']}: dim {instance['dimension']}, "
              f"source {instance['source_dimension']}, target {instance['target_dimension']}")
    print("=" * 70)

    for suite, entry in report["suites"].items():
        marker = "✅" if entry["ok"] else "❌"
        print(f"\n{marker} {suite}")
        for law in entry["laws"]:
            if law["status"] == "ok":
                sampled = "" if law["exhaustive"] else f" (sampled {law['checked']})"
                print(f"   ✅ {law['name']}{sampled}")
            else:
                witness = ", ".join(law["witness"] or [])
                print(f"   ❌ {law['name']}: {law.get('detail', '')} at [{witness}]")
        for key, value in entry.items():
            if key not in ("ok", "laws", "structure"):
                print(f"   {key}: {value}")

    print("\n" + "=" * 70)
    if report["ok"]:
        print("✅ All requested laws hold exactly")
    else:
        failed = sum(1 for e in report["suites"].values() for law in e["laws"] if law["status"] != "ok")
        print(f"❌ {failed} law(s) failed")
    if "timing" in report:
        print(f"⏱️  {report['timing']}")


def render_json(report):
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)


def generate_log_filename(input_file, log_dir=None):
    """Generate matching log CSV filename from the input file"""
    if not input_file:
        return None

    base_name = os.path.splitext(os.path.basename(input_file))[0]
    logs_dir = os.path.expanduser(log_dir) if log_dir else os.path.join(os.path.dirname(input_file), 'logs')
    os.makedirs(logs_dir, exist_ok=True)
    return os.path.join(logs_dir, f"{base_name}_log.csv")


def write_log_csv(log_file, report, console=None):
    """Write one row per law to a CSV file"""
    try:
        timestamp = datetime.now().strftime('%Y-%m-%d %H:%M:%S')
        with open(log_file, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f)
            writer.writerow(['Status', 'Suite', 'Law', 'Checked', 'Exhaustive', 'Witness', 'Detail', 'Timestamp'])
            for suite, entry in report["suites"].items():
                for law in entry["laws"]:
                    writer.writerow([
                        "✅ Success" if law["status"] == "ok" else "❌ Failed",
                        suite,
                        law["name"],
                        law["checked"],
                        law["exhaustive"],
                        " ".join(law["witness"] or []),
                        law.get("detail", "")[:80],
                        timestamp,
                    ])
        print(f"\n📊 Law log saved to: {log_file}", file=console or sys.stdout)
        return True
    except OSError as e:
        print(f"⚠️  Warning: Could not write log file: {e}", file=console or sys.stdout)
        return False


def parse_arguments(argv=None):
    """Parse command line arguments"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--input', type=str, required=True, help='Groupoid or separability JSON file')
    common.add_argument('--kind', type=str, choices=KINDS, default='kg', help='Construction (default: kg)')
    common.add_argument('--base', type=str, choices=BASE_KINDS, default='kg',
                        help='Underlying construction for dual-of / bidual-of (default: kg)')
    common.add_argument('--suites', type=str, default=None,
                        help=f"Comma-separated suites: {','.join(SUITES)} (default: from config.json)")
    common.add_argument('--format', type=str, choices=FORMATS, default=None, help='Report format')
    common.add_argument('--jobs', type=int, default=None, help='Laws checked in parallel')
    common.add_argument('--seed', type=int, default=None, help='Seed for sampled law tuples')
    common.add_argument('--max-exhaustive-dim', type=int, default=None,
                        help='Check exhaustively up to this dimension, sample above it')
    common.add_argument('--profile', type=str, default=None, help='Preset from profiles.json')
    common.add_argument('--log', action='store_true', help='Write a per-law CSV into logs/ beside the input')
    common.add_argument('--output', type=str, default=None, help='Also write the report to this file')
    common.add_argument('--verbose', action='store_true', help='Debug logging')

    parser = argparse.ArgumentParser(
        description="Build and check weak multiplier Hopf algebras exactly",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python wmha.py validate --input corpus/groupoids/pair2.json
  python wmha.py check --kind kg --input corpus/groupoids/pair2.json --suites axioms,integrals,duality
  python wmha.py dual --kind kg --input corpus/groupoids/z2.json --format json
  python wmha.py bidual --kind cg --input corpus/groupoids/union_z2_z3.json
  python wmha.py radford --kind sep --input corpus/separability/matrix2.json --profile quick
        """
    )
    commands = parser.add_subparsers(dest='command', required=True)
    for name, help_text in (
        ('validate', 'Load and validate the input file'),
        ('check', 'Run the requested suites'),
        ('integrals', 'Enumerate integrals and check invariance and faithfulness'),
        ('dual', 'Build the dual and check it (emits its structure constants)'),
        ('bidual', 'Check the biduality isomorphism'),
        ('radford', 'Separability dual: integrals, modular element and S⁴'),
    ):
        commands.add_parser(name, parents=[common], help=help_text)
    return parser.parse_args(argv)


INPUT_ERRORS = (
    InputError,
    GroupoidError,
    SeparabilityError,
    DualityError,
    WmhaError,
    IntegralError,
)


def main(argv=None):
    args = parse_arguments(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = build_run_config(args, merge_profile(load_config(), args.profile))
        # JSON on stdout stays parseable; status lines move to stderr
        console = sys.stderr if config.output_format == 'json' else sys.stdout
        print(f"🚀 wmha {args.command}: {args.input}", file=console)
        status, report = run(config)
    except INPUT_ERRORS as e:
        module = type(e).__module__
        print(f"❌ {module}: {e}")
        for violation in getattr(e, 'violations', [])[:10]:
            print(f"   - {violation.axiom}: {', '.join(violation.witness)} {violation.detail}".rstrip())
        raise SystemExit(2)
    except InternalConsistencyError as e:
        print(f"❌ internal consistency: {e}")
        raise SystemExit(1)

    if config.output_format == 'json':
        print(render_json(report))
    else:
        print_report(report)

    if config.output:
        with open(config.output, 'w', encoding='utf-8') as f:
            f.write(render_json(report) + "\n")
        print(f"\n📄 Report saved to: {config.output}", file=console)

    if config.log:
        log_file = generate_log_filename(config.input, config.log_dir)
        if log_file:
            write_log_csv(log_file, report, console)

    raise SystemExit(status)


if __name__ == "__main__":
    main()
