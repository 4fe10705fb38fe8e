"""Lipschitz-free norms and the linearized retractions on F(M) and F(N)."""
import itertools
from fractions import Fraction

from checks.context import VerificationContext
from checks.registry import Finding, at_most, no_failures, suite
from construction.free_space import free_norm


@suite("strong-duality", "free", "every transport value is certified by dual-feasible potentials of equal value")
def strong_duality(context: VerificationContext) -> Finding:
    report = context.free_report
    return Finding(report.duality_failures == 0, 0, report.duality_failures, "", f"{report.solves} transport solves")


@suite("elementary-molecules", "free", "‖δ_x‖ = d(x,0) and ‖δ_x - δ_y‖ = d(x,y)")
def elementary_molecules(context: VerificationContext) -> Finding:
    metric = context.metric
    failures, checked = [], 0
    for sample in context.molecules:
        m = sample.molecule
        coefficients = sorted(a for _, a in m.terms)
        if coefficients == [1]:
            expected = metric.distance(m.support[0], metric.base)
        elif coefficients == [-1, 1]:
            expected = metric.distance(*m.support)
        else:
            continue
        checked += 1
        value = free_norm(metric, m)
        if value != expected:
            failures.append(f"{sample.label}: ‖m‖={value}, distance {expected}")
    return no_failures(failures, checked, "elementary molecules")


@suite("norm-axioms", "free", "‖q·m‖ = |q|·‖m‖ and ‖m1 + m2‖ <= ‖m1‖ + ‖m2‖")
def norm_axioms(context: VerificationContext) -> Finding:
    metric = context.metric
    molecules = [s for s in context.molecules if s.label.startswith("random")]
    failures, checked = [], 0
    for sample in molecules:
        norm = free_norm(metric, sample.molecule)
        for q in (Fraction(-3, 2), Fraction(2, 3), Fraction(3)):
            checked += 1
            if free_norm(metric, sample.molecule.scale(q)) != abs(q) * norm:
                failures.append(f"{sample.label}: homogeneity fails for q={q}")
    for first, second in zip(molecules, molecules[1:]):
        checked += 1
        total = free_norm(metric, first.molecule + second.molecule)
        if total > free_norm(metric, first.molecule) + free_norm(metric, second.molecule):
            failures.append(f"{first.label} + {second.label}: triangle inequality fails")
    return no_failures(failures, checked, "axiom instances")


@suite("projection-bound", "free", "‖P_i m‖ <= K_global·‖m‖ on sampled molecules and prefix indices")
def projection_bound(context: VerificationContext) -> Finding:
    report = context.free_report
    worst = report.worst_ratio
    witness = next((f"{row.label}, i={row.index}" for row in report.rows if row.ratio == worst), "")
    detail = f"{len({row.label for row in report.rows})} molecules x {len(context.indices)} indices"
    return at_most(worst, context.k_global, witness, detail)


@suite("pushforward-lipschitz", "free", "‖P_i m‖ <= Lip(φ_i)·‖m‖")
def pushforward_lipschitz(context: VerificationContext) -> Finding:
    report = context.free_report
    failures = [f"{row.label}, i={row.index}" for row in report.lipschitz_violations]
    return no_failures(failures, len(report.rows), "projections")


@suite("projection-commutation", "free", "P_{i1}P_{i2} = P_min(i1,i2) on sampled molecules")
def projection_commutation(context: VerificationContext) -> Finding:
    report = context.free_report
    pairs = len(list(itertools.combinations(context.indices, 2)))
    return no_failures(report.commutation_failures, pairs * len(context.molecules), "(molecule, i1, i2) triples")


@suite("final-residual", "free", "‖P_#M m - m‖ = 0")
def final_residual(context: VerificationContext) -> Finding:
    report = context.free_report
    monotone = sum(report.monotone.values())
    finding = no_failures(report.final_residual_failures, len(context.molecules), "molecules")
    detail = f"{finding.detail}; residual nonincreasing along the indices for {monotone} of {len(report.monotone)}"
    return Finding(finding.passed, finding.bound, finding.worst, finding.witness, detail)


@suite("dual-crosscheck", "free", "transport value = Lipschitz-function LP value on small supports")
def dual_crosscheck(context: VerificationContext) -> Finding:
    report = context.free_report
    return no_failures(report.crosscheck_failures, report.crosschecks, "molecules")


@suite("net-basis", "free", "on F(N) the transferred projections satisfy ‖P_i m‖ <= D·K·‖m‖ and commute")
def net_basis(context: VerificationContext) -> Finding:
    report = context.net_report
    bound = context.transferred.bound
    worst = report.worst_ratio
    problems = (
        len(report.commutation_failures)
        + len(report.final_residual_failures)
        + len(report.lipschitz_violations)
        + report.duality_failures
    )
    witness = next((f"{row.label}, i={row.index}" for row in report.rows if row.ratio == worst), "")
    detail = f"{len(context.net_molecules)} molecules, {problems} commutation/residual/duality failures"
    return Finding(worst <= bound and problems == 0, bound, worst, witness, detail)
