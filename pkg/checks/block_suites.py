"""Blocks M_n, C_n, D_n and the coarse retractions φ_n, Ψ_n."""
from fractions import Fraction

from checks.context import VerificationContext
from checks.registry import Finding, at_most, no_failures, suite
from construction.linf_core import integer_ball, lipschitz_constant_points, sup_distance
from construction.net_blocks import phi, psi


def _stages(context: VerificationContext) -> range:
    return range(1, context.chain.depth + 1)


@suite("dense", "blocks", "‖i_n(r_n(x)) - x‖ <= λ̄+1 on M_n")
def dense(context: VerificationContext) -> Finding:
    system = context.system
    worst, witness = Fraction(0), ""
    for n in _stages(context):
        blocks = context.chain.stage(n)
        for x in blocks.m_points:
            gap = sup_distance(system.extend_values(n, x[: blocks.width]), x)
            if gap > worst:
                worst, witness = gap, f"n={n}, x={x}"
    return at_most(worst, system.lambda_bar + 1, witness)


@suite("block-identification", "blocks", "r_n(M_n) and r_n(D_n) are the integer s_n- and s_{n+1}-balls")
def block_identification(context: VerificationContext) -> Finding:
    system = context.system
    failures = []
    for n in _stages(context):
        blocks = context.chain.stage(n)
        for label, points, radius in (("M", blocks.m_points, system.s(n)), ("D", blocks.d_points, system.s(n + 1))):
            keys = [x[: blocks.width] for x in points]
            if len(set(keys)) != len(keys):
                failures.append(f"r_{n} is not injective on {label}_{n}")
            if set(keys) != set(integer_ball(blocks.width, radius)):
                failures.append(f"r_{n}({label}_{n}) is not the integer {radius}-ball")
    return no_failures(failures, 2 * len(_stages(context)), "blocks")


def _inverse_restriction_constant(context: VerificationContext, block: str) -> tuple[Fraction, str]:
    worst, witness = Fraction(0), ""
    for n in _stages(context):
        blocks = context.chain.stage(n)
        points = blocks.m_points if block == "M" else blocks.d_points
        value = lipschitz_constant_points([x[: blocks.width] for x in points], points, context.workers)
        if value > worst:
            worst, witness = value, f"n={n}"
    return worst, witness


@suite("lipmain1", "blocks", "Lip((r_n|M_n)⁻¹) <= 3λ̄+2")
def lipmain1(context: VerificationContext) -> Finding:
    worst, witness = _inverse_restriction_constant(context, "M")
    return at_most(worst, 3 * context.lambda_bar + 2, witness)


@suite("lipmain", "blocks", "Lip((r_n|D_n)⁻¹) <= λ̄²+2λ̄+2")
def lipmain(context: VerificationContext) -> Finding:
    worst, witness = _inverse_restriction_constant(context, "D")
    lam = context.lambda_bar
    return at_most(worst, lam**2 + 2 * lam + 2, witness)


@suite("phi-commutation", "blocks", "φ_n∘φ_m = φ_min(n,m) on M")
def phi_commutation(context: VerificationContext) -> Finding:
    chain = context.chain
    stages = _stages(context)
    images = {n: {x: phi(chain, n, x) for x in chain.points} for n in stages}
    failures = []
    for n in stages:
        for m in stages:
            low = images[min(n, m)]
            for x in chain.points:
                if images[n][images[m][x]] != low[x]:
                    failures.append(f"n={n}, m={m}, x={x}")
    return no_failures(failures, len(stages) ** 2 * len(chain.points), "(n, m, x) triples")


@suite("phi-lipschitz", "blocks", "Lip(φ_n) <= 3λ̄+2")
def phi_lipschitz(context: VerificationContext) -> Finding:
    chain = context.chain
    worst, witness = Fraction(0), ""
    for n in _stages(context):
        value = lipschitz_constant_points(chain.points, [phi(chain, n, x) for x in chain.points], context.workers)
        if value > worst:
            worst, witness = value, f"n={n}"
    return at_most(worst, 3 * context.lambda_bar + 2, witness)


@suite("cont-cb", "blocks", "C_n ∩ M_n = ∅ and C_n ⊆ M_{n+1}")
def cont_cb(context: VerificationContext) -> Finding:
    chain = context.chain
    failures = []
    for n in _stages(context):
        blocks = chain.stage(n)
        overlap = blocks.m_set & set(blocks.c_points)
        if overlap:
            failures.append(f"C_{n} meets M_{n} in {min(overlap)}")
        if n < chain.depth:
            outside = set(blocks.c_points) - chain.stage(n + 1).m_set
            if outside:
                failures.append(f"C_{n} point {min(outside)} is not in M_{n + 1}")
    return no_failures(failures, len(_stages(context)), "stages")


@suite("psi-commutation", "blocks", "Ψ_n∘Ψ_m = Ψ_min(n,m) on M_min(n,m)")
def psi_commutation(context: VerificationContext) -> Finding:
    chain = context.chain
    stages = range(2, chain.depth + 1)
    failures, checked = [], 0
    for n in stages:
        for m in stages:
            low = min(n, m)
            for x in chain.stage(low).m_points:
                checked += 1
                if psi(chain, n, psi(chain, m, x)) != psi(chain, low, x):
                    failures.append(f"n={n}, m={m}, x={x}")
    return no_failures(failures, checked, "(n, m, x) triples")


@suite("factorization", "blocks", "φ_{n-1} = φ_{n-1}∘Ψ_n∘φ_n on M")
def factorization(context: VerificationContext) -> Finding:
    chain = context.chain
    failures, checked = [], 0
    for n in range(2, chain.depth + 1):
        for x in chain.points:
            checked += 1
            if phi(chain, n - 1, psi(chain, n, phi(chain, n, x))) != phi(chain, n - 1, x):
                failures.append(f"n={n}, x={x}")
    return no_failures(failures, checked, "(n, x) pairs")
