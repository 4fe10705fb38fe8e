"""The global order I and the retractional basis φ_i on M."""
from fractions import Fraction

import numpy as np

from checks.context import VerificationContext
from checks.registry import Finding, at_most, no_failures, suite
from construction.basis_assembly import commutation_failures, project_rho
from construction.linf_core import covering_radius, sup_distance


@suite("global-order", "basis", "I is a bijection with 0 first and the segments M_1, C_1, M_2 \\ D_1, ...")
def global_order(context: VerificationContext) -> Finding:
    order, chain = context.order, context.chain
    failures = []
    if order.point(1) != context.construction.origin:
        failures.append("I⁻¹(1) is not the origin")
    if set(order.points) != set(chain.points) or len(order.points) != len(chain.points):
        failures.append("I is not a bijection onto M")
    for segment in order.segments:
        if segment.kind == "M1":
            expected = chain.stage(1).m_set
        elif segment.kind == "C":
            expected = set(chain.stage(segment.stage).c_points)
        else:
            expected = chain.stage(segment.stage).m_set - chain.stage(segment.stage - 1).d_set
        if set(order.points[segment.start - 1 : segment.end]) != expected:
            failures.append(f"segment {segment.kind}{segment.stage} [{segment.start}, {segment.end}] has the wrong points")
    detail = ", ".join(f"{name}={value}" for name, value in order.boundaries.items())
    finding = no_failures(failures, len(order.segments), "segments")
    return Finding(finding.passed, finding.bound, finding.worst, finding.witness, detail)


@suite("global-commutation", "basis", "φ_{i1}∘φ_{i2} = φ_min(i1,i2) on M for every index pair")
def global_commutation(context: VerificationContext) -> Finding:
    tables = context.tables
    order = context.order
    failures = [f"i1={a}, i2={b}, x={order.points[k]}" for a, b, k in commutation_failures(tables)]
    return no_failures(failures, tables.shape[0] ** 2 * tables.shape[1], "(i1, i2, x) triples")


@suite("global-retraction", "basis", "φ_i fixes M^i and maps M into M^i")
def global_retraction(context: VerificationContext) -> Finding:
    tables = context.tables
    failures = []
    for i in range(1, tables.shape[0] + 1):
        row = tables[i - 1]
        if (row[:i] != np.arange(i)).any():
            failures.append(f"φ_{i} moves a point of M^{i}")
        if row.max() >= i:
            failures.append(f"φ_{i} leaves M^{i}")
    return no_failures(failures, tables.shape[0], "retractions")


@suite("global-lipschitz", "basis", "Lip(φ_i) <= K_global")
def global_lipschitz(context: VerificationContext) -> Finding:
    constants = context.constants
    worst = max(constants)
    return at_most(worst, context.k_global, f"i={constants.index(worst) + 1}", f"{len(constants)} retractions")


@suite("rho-displacement", "basis", "‖m - ρ(m)‖ <= 1")
def rho_displacement(context: VerificationContext) -> Finding:
    worst, witness = Fraction(0), ""
    for m in context.chain.points:
        gap = sup_distance(project_rho(context.construction, m), m)
        if gap > worst:
            worst, witness = gap, f"m={m}"
    return at_most(worst, 1, witness)


@suite("density-m", "basis", "every sampled point of the realized ball lies within 2λ̄+2 of M")
def density_m(context: VerificationContext) -> Finding:
    radius, at = covering_radius(context.ambient, context.chain.points)
    witness = f"sample point {tuple(str(c) for c in context.ambient[at])}" if at >= 0 else ""
    return at_most(radius, 2 * context.lambda_bar + 2, witness, f"{len(context.ambient)} sample points")
