"""Command-line surface: bound sweeps as CSV, verification runs, scheme evaluation.

Commands
--------
* ``qseal bounds dist``      -- sweep the distinguishability cap and both
                                detection-floor flavors over p in [0.5, 1].
* ``qseal bounds nfp``       -- sweep the false-negative cap over p in [0, 1]
                                for each requested message count M.
* ``qseal verify gentle``    -- randomized check of both gentle-measurement
                                inequalities; nonzero exit on any violation.
* ``qseal simulate naive``   -- permuted product-state protocol: projector
                                non-disturbance plus the measure-and-repair
                                Monte Carlo.
* ``qseal simulate achieve`` -- two-message qubit family evaluation.
* ``qseal seal eval``        -- detection metrics of a scheme file.

All numbers are printed with 17 significant digits so output is byte-stable
and parses back to the identical float.  With ``--out`` the CSV goes to the
file and a human summary to stdout; without it the CSV itself is stdout and
the summary moves to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import gentle, naive, qubit_seal, seal
from .linalg import MAX_DENSE_DIM
from .rng import derive_rng

_POPULATE_TOL = 1e-12


@dataclass(frozen=True)
class RunConfig:
    seed: int
    output_path: str | None = None
    tolerance: float = 1e-9
    trials: int = 100_000
    grid_points: int = 101

    def __post_init__(self):
        seed = int(self.seed)
        if not 0 <= seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.grid_points < 2:
            raise ValueError(f"grid must have at least 2 points, got {self.grid_points}")
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "tolerance", float(self.tolerance))
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "grid_points", int(self.grid_points))


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


@dataclass
class CsvTable:
    header: list
    rows: list

    def render(self) -> str:
        width = len(self.header)
        lines = [",".join(self.header)]
        for row in self.rows:
            if len(row) != width:
                raise ValueError(
                    f"row width {len(row)} does not match header width {width}")
            lines.append(",".join(format_cell(cell) for cell in row))
        return "\n".join(lines) + "\n"


def _emit(table: CsvTable, config: RunConfig, summary_lines: list) -> None:
    text = table.render()
    if config.output_path is None:
        sys.stdout.write(text)
        for line in summary_lines:
            print(line, file=sys.stderr)
    else:
        with open(config.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {config.output_path} ({len(table.rows)} rows)")
        for line in summary_lines:
            print(line)


def cmd_bounds_fig1(config: RunConfig) -> CsvTable:
    """Distinguishability cap and both detection floors over p in [0.5, 1]."""
    rows = []
    for raw_p in np.linspace(0.5, 1.0, config.grid_points):
        p = min(max(float(raw_p), 0.5), 1.0)
        rows.append([
            p,
            seal.clamp_probability(seal.p_dist_upper_bound(p)),
            qubit_seal.p_dist_lower_paper(p),
            qubit_seal.p_dist_lower_numeric(p),
        ])
    return CsvTable(
        ["p", "p_dist_upper", "p_dist_lower_paper", "p_dist_lower_numeric"], rows)


def cmd_bounds_fig2(config: RunConfig, m_list) -> CsvTable:
    """False-negative cap over p in [0, 1]; blank where p < 1/M."""
    ms = []
    for m in m_list:
        if int(m) < 2:
            raise ValueError(f"every M must be at least 2, got {m}")
        if int(m) not in ms:
            ms.append(int(m))
    rows = []
    for raw_p in np.linspace(0.0, 1.0, config.grid_points):
        p = min(max(float(raw_p), 0.0), 1.0)
        row = [p]
        for m in ms:
            if p >= 1.0 / m - _POPULATE_TOL:
                row.append(seal.p_nfp_upper_bound(min(max(p, 1.0 / m), 1.0), m))
            else:
                row.append(None)
        rows.append(row)
    return CsvTable(["p"] + [f"p_nfp_upper_M{m}" for m in ms], rows)


def _serialize_instance(instance: gentle.GentleInstance) -> str:
    def pairs(mat):
        return [[float(z.real), float(z.imag)] for z in mat.reshape(-1)]

    doc = {
        "dim": instance.rho.dim,
        "dominant_label": instance.dominant_label,
        "epsilon": instance.epsilon,
        "rho": pairs(instance.rho.matrix),
        "povm": [{"label": label, "matrix": pairs(element)}
                 for label, element in instance.povm.elements],
    }
    return json.dumps(doc)


def cmd_verify_gentle(config: RunConfig, dim: int, n_outcomes: int,
                      instances: int) -> tuple:
    """Randomized sweep of both disturbance inequalities.

    Returns (table, summary_lines, exit_code); exit code 1 when any instance
    violates either bound beyond config.tolerance.
    """
    if instances < 0:
        raise ValueError(f"instances must be non-negative, got {instances}")
    rng = derive_rng(config.seed, "verify-gentle", dim, n_outcomes, instances)
    header = ["instance", "epsilon_target", "epsilon",
              "lhs_classic", "bound_classic", "slack_classic",
              "lhs_unknown", "bound_unknown", "slack_unknown", "satisfied"]
    rows = []
    violations = 0
    first_offender = None
    slacks = []
    for index, (target, instance, report) in enumerate(
            gentle.sweep_instances(dim, n_outcomes, instances, rng,
                                   config.tolerance)):
        slack_classic = report.bound_classic - report.lhs_classic
        slack_unknown = report.bound_unknown - report.lhs_unknown
        ok = report.satisfied_classic and report.satisfied_unknown
        if not ok:
            violations += 1
            if first_offender is None:
                first_offender = instance
        slacks.extend([slack_classic, slack_unknown])
        rows.append([index, target, report.epsilon,
                     report.lhs_classic, report.bound_classic, slack_classic,
                     report.lhs_unknown, report.bound_unknown, slack_unknown, ok])
    summary = [
        f"instances={instances} dim={dim} outcomes={n_outcomes} violations={violations}",
        ("slack min=" + format_cell(min(slacks)) + " max=" + format_cell(max(slacks)))
        if slacks else "slack min= max=",
    ]
    if first_offender is not None:
        print(_serialize_instance(first_offender), file=sys.stderr)
    return CsvTable(header, rows), summary, (1 if violations else 0)


def cmd_simulate_naive(config: RunConfig, q: int) -> CsvTable:
    """Non-disturbance of the projector read plus the repair-attack Monte Carlo."""
    if q < 1:
        raise ValueError(f"q must be at least 1, got {q}")
    sigma = derive_rng(config.seed, "simulate-naive", q, "sigma")
    tau = derive_rng(config.seed, "simulate-naive", q, "tau")
    state_one, state_two = naive.build_message_states(q, sigma, tau)
    nondisturbing = None
    if 2 ** (3 * q) <= MAX_DENSE_DIM:
        nondisturbing = naive.states_nondisturbing(state_one, state_two)
    exact = naive.mean_fidelity_exact(q)
    rows = []
    for state in (state_one, state_two):
        attack_rng = derive_rng(config.seed, "simulate-naive", q,
                                "attack", state.message)
        result = naive.simulate_qubitwise_attack(state, config.trials, attack_rng)
        rows.append([q, state.message, nondisturbing, result.mean_fidelity,
                     exact, result.detection_probability])
    return CsvTable(["q", "message", "nondisturbing", "mean_fidelity",
                     "mean_fidelity_exact", "detection_probability"], rows)


def cmd_simulate_achieve(config: RunConfig, p: float) -> CsvTable:
    """Promise, returned-state diagonals, both detection floors, phase spread."""
    family = qubit_seal.QubitSealFamily(p)
    scheme = family.scheme()
    returned_one = family.returned_state(1).matrix
    returned_two = family.returned_state(2).matrix
    row = [
        family.p,
        seal.promise_probability(scheme, 1),
        seal.promise_probability(scheme, 2),
        returned_one[0, 0].real, returned_one[1, 1].real,
        returned_two[0, 0].real, returned_two[1, 1].real,
        qubit_seal.p_dist_lower_paper(family.p),
        qubit_seal.p_dist_lower_numeric(family.p, family.phi),
        qubit_seal.phi_invariance_spread(family.p),
    ]
    return CsvTable(
        ["p", "promise_m1", "promise_m2",
         "returned_m1_diag0", "returned_m1_diag1",
         "returned_m2_diag0", "returned_m2_diag1",
         "p_dist_lower_paper", "p_dist_lower_numeric", "phi_spread"],
        [row])


_ACHIEVE_NOTE = ("note: p_dist_lower_paper and p_dist_lower_numeric follow "
                 "different trace-norm conventions; both are reported, "
                 "neither is asserted equal to the other")


def cmd_seal_eval(config: RunConfig, scheme_path: str) -> tuple:
    """Detection metrics of a scheme file; exit 1 if a bound is violated."""
    scheme = seal.load_scheme(scheme_path)
    report = seal.evaluate_scheme(scheme)
    header = ["m", "promise_probability", "p_dist_numeric", "p_dist_upper",
              "p_dist_upper_raw", "p_nfp_numeric", "p_nfp_upper"]
    rows = []
    violated = False
    for entry in report.per_message:
        rows.append([entry.message, entry.promise_probability,
                     entry.p_dist_numeric, entry.p_dist_upper,
                     entry.p_dist_upper_raw, entry.p_nfp_numeric,
                     entry.p_nfp_upper])
        if (entry.p_dist_numeric > entry.p_dist_upper + config.tolerance
                or entry.p_nfp_numeric > entry.p_nfp_upper + config.tolerance):
            violated = True
    rows.append([None, None, report.p_dist_numeric, report.p_dist_upper,
                 None, report.p_nfp_numeric, report.p_nfp_upper])
    summary = [
        f"scheme: M={scheme.n_messages} dimA={scheme.dim_a} dimB={scheme.dim_b} "
        f"promised_p={format_cell(scheme.promised_p)}",
        f"{report.prior}-prior averages: p_dist_numeric="
        f"{format_cell(report.p_dist_numeric)} p_nfp_numeric="
        f"{format_cell(report.p_nfp_numeric)}",
    ]
    if violated:
        summary.append("bound violation detected (see rows)")
    return CsvTable(header, rows), summary, (1 if violated else 0)


def _config_from(args) -> RunConfig:
    return RunConfig(seed=args.seed, output_path=args.out, tolerance=args.tol,
                     trials=args.trials, grid_points=args.grid)


def _run_bounds_dist(args) -> int:
    config = _config_from(args)
    _emit(cmd_bounds_fig1(config), config, [])
    return 0


def _run_bounds_nfp(args) -> int:
    config = _config_from(args)
    _emit(cmd_bounds_fig2(config, args.M), config, [])
    return 0


def _run_verify_gentle(args) -> int:
    config = _config_from(args)
    table, summary, code = cmd_verify_gentle(config, args.dim, args.outcomes,
                                             args.instances)
    _emit(table, config, summary)
    return code


def _run_simulate_naive(args) -> int:
    config = _config_from(args)
    _emit(cmd_simulate_naive(config, args.q), config, [])
    return 0


def _run_simulate_achieve(args) -> int:
    config = _config_from(args)
    _emit(cmd_simulate_achieve(config, args.p), config, [_ACHIEVE_NOTE])
    return 0


def _run_seal_eval(args) -> int:
    config = _config_from(args)
    table, summary, code = cmd_seal_eval(config, args.scheme)
    _emit(table, config, summary)
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="master seed; sub-streams are derived per command")
    common.add_argument("--out", default=None,
                        help="CSV output path (default: CSV on stdout)")
    common.add_argument("--tol", type=float, default=1e-9,
                        help="violation tolerance (default 1e-9)")
    common.add_argument("--trials", type=int, default=100_000,
                        help="Monte Carlo trials (default 100000)")
    common.add_argument("--grid", type=int, default=101,
                        help="sweep grid points (default 101)")

    parser = argparse.ArgumentParser(
        prog="qseal",
        description="Quantum seal bound sweeps, verification runs, and scheme evaluation.")
    top = parser.add_subparsers(dest="command", required=True)

    bounds = top.add_parser("bounds", help="closed-form bound sweeps as CSV")
    bounds_sub = bounds.add_subparsers(dest="which", required=True)
    dist = bounds_sub.add_parser("dist", parents=[common],
                                 help="distinguishability cap and floors over p")
    dist.set_defaults(func=_run_bounds_dist)
    nfp = bounds_sub.add_parser("nfp", parents=[common],
                                help="false-negative cap over p, one column per M")
    nfp.add_argument("--M", action="append", type=int, default=None,
                     help="message count (repeatable; default 2 4 16 256)")
    nfp.set_defaults(func=_run_bounds_nfp)

    verify = top.add_parser("verify", help="randomized inequality verification")
    verify_sub = verify.add_subparsers(dest="which", required=True)
    vg = verify_sub.add_parser("gentle", parents=[common],
                               help="gentle-measurement disturbance bounds")
    vg.add_argument("--dim", type=int, default=8, help="state dimension (2..64)")
    vg.add_argument("--outcomes", type=int, default=4, help="POVM outcomes (>= 2)")
    vg.add_argument("--instances", type=int, default=1000,
                    help="random instances to draw")
    vg.set_defaults(func=_run_verify_gentle)

    simulate = top.add_parser("simulate", help="protocol simulations")
    simulate_sub = simulate.add_subparsers(dest="which", required=True)
    sn = simulate_sub.add_parser("naive", parents=[common],
                                 help="permuted product-state protocol")
    sn.add_argument("--q", type=int, default=2, help="padding registers per message")
    sn.set_defaults(func=_run_simulate_naive)
    sa = simulate_sub.add_parser("achieve", parents=[common],
                                 help="two-message qubit family")
    sa.add_argument("--p", type=float, default=0.75, help="promise level in (0.5, 1]")
    sa.set_defaults(func=_run_simulate_achieve)

    seal_cmd = top.add_parser("seal", help="scheme-file operations")
    seal_sub = seal_cmd.add_subparsers(dest="which", required=True)
    se = seal_sub.add_parser("eval", parents=[common],
                             help="evaluate detection metrics of a scheme file")
    se.add_argument("--scheme", required=True, help="scheme JSON file")
    se.set_defaults(func=_run_seal_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "M", "missing") is None:
        args.M = [2, 4, 16, 256]
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
