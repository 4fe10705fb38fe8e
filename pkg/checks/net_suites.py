"""Greedy net of ρ(M), the perturbation μ and the transferred retractions on N."""
from fractions import Fraction

from checks.context import VerificationContext
from checks.registry import Finding, at_most, no_failures, suite
from construction.basis_assembly import GRID_VALUES, commutation_failures
from construction.linf_core import covering_radius, min_pairwise_distance, sup_distance


@suite("net-representatives", "net", "representatives pairwise > a apart, every ρ-point within a of its representative")
def net_representatives(context: VerificationContext) -> Finding:
    net = context.net
    failures = []
    separation = min_pairwise_distance(net.representatives)
    if separation is not None and separation <= net.a:
        failures.append(f"representatives only {separation} apart")
    covered = [v for cluster in net.clusters for v in cluster]
    if len(covered) != len(set(covered)) or set(covered) != set(net.rho.values()):
        failures.append("clusters do not partition ρ(M)")
    for k, (rep, cluster) in enumerate(zip(net.representatives, net.clusters)):
        radius = max(sup_distance(v, rep) for v in cluster)
        if radius > net.a:
            failures.append(f"cluster {k} has radius {radius}")
    detail = f"{len(net.clusters)} clusters, min separation {separation}"
    finding = no_failures(failures, len(net.clusters), "clusters")
    return Finding(finding.passed, finding.bound, finding.worst, finding.witness, detail)


@suite("net-grid", "net", "perturbation grid points have norm <= 3/4 and are pairwise >= 1/2 apart")
def net_grid(context: VerificationContext) -> Finding:
    grid = context.net.grid
    norm = max(max(abs(c) for c in p) for p in grid)
    separation = min_pairwise_distance(grid)
    passed = norm <= Fraction(3, 4) and (separation is None or separation >= Fraction(1, 2))
    return Finding(passed, "3/4, 1/2", f"{norm}, {separation}", "", f"{len(grid)} grid points over {list(GRID_VALUES)}")


@suite("net-separation", "net", "N is (a/4)-separated")
def net_separation(context: VerificationContext) -> Finding:
    separation = min_pairwise_distance(context.transferred.points)
    bound = context.net.a / 4
    if separation is None:
        return Finding(True, bound, None, "", "fewer than two net points")
    return Finding(separation >= bound, bound, separation, "", "minimum pairwise distance (a lower bound)")


@suite("net-density", "net", "N is (b+3a/8)-dense in the realized ball, b = a+2λ̄+3")
def net_density(context: VerificationContext) -> Finding:
    net = context.net
    radius, at = covering_radius(context.ambient, context.transferred.points)
    witness = f"sample point {tuple(str(c) for c in context.ambient[at])}" if at >= 0 else ""
    return at_most(radius, net.b(context.lambda_bar) + 3 * net.a / 8, witness, f"{len(context.ambient)} sample points")


@suite("net-displacement", "net", "‖μ(m) - m‖ <= a+1+3a/8")
def net_displacement(context: VerificationContext) -> Finding:
    net = context.net
    worst, witness = Fraction(0), ""
    for m, image in net.mu.items():
        gap = sup_distance(image, m)
        if gap > worst:
            worst, witness = gap, f"m={m}"
    return at_most(worst, net.a + 1 + 3 * net.a / 8, witness)


@suite("net-distortion", "net", "μ is bi-Lipschitz with distortion D = Lip(μ)·Lip(μ⁻¹)")
def net_distortion(context: VerificationContext) -> Finding:
    net = context.net
    passed = net.forward is not None and net.backward is not None and net.forward > 0 and net.backward > 0
    return Finding(passed, None, net.distortion, "", f"Lip(μ)={net.forward}, Lip(μ⁻¹)={net.backward}")


@suite("transfer-commutation", "net", "μ∘φ_i∘μ⁻¹ commute on N and retract onto μ(M^i)")
def transfer_commutation(context: VerificationContext) -> Finding:
    transferred, order, mu = context.transferred, context.order, context.net.mu
    failures = [f"i1={a}, i2={b}, x={transferred.points[k]}" for a, b, k in commutation_failures(transferred.tables)]
    for i in range(1, len(order) + 1):
        if transferred.prefix(i) != tuple(mu[x] for x in order.prefix(i)):
            failures.append(f"prefix {i} is not μ(M^{i})")
            break
    return no_failures(failures, transferred.tables.shape[0] ** 2 * transferred.tables.shape[1], "(i1, i2, x) triples")


@suite("transfer-lipschitz", "net", "Lip(μ∘φ_i∘μ⁻¹) <= D·K with K the largest constant on M")
def transfer_lipschitz(context: VerificationContext) -> Finding:
    transferred = context.transferred
    worst = max(transferred.constants)
    return at_most(
        worst,
        transferred.bound,
        f"i={transferred.constants.index(worst) + 1}",
        f"D={transferred.distortion}, K={transferred.constant_on_m}",
    )
