"""Sup-norm operators: entire part, truncation, restriction and the Lipschitz evaluator."""
from fractions import Fraction

from checks.context import VerificationContext
from checks.registry import Finding, at_most, no_failures, suite
from construction.linf_core import (
    lipschitz_constant,
    lipschitz_constant_points,
    quantize,
    restrict,
    sup_distance,
    truncate,
)


def _radii(context: VerificationContext) -> list[Fraction]:
    return [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(context.system.s(1))]


@suite("quantize-idempotent", "core", "f∘f = f, integer output, |[r]| <= |r| with the sign kept")
def quantize_idempotent(context: VerificationContext) -> Finding:
    failures = []
    for k, v in enumerate(context.core_vectors):
        q = quantize(v)
        if quantize(q) != q or not q.is_integral():
            failures.append(f"vector {k}: {v}")
            continue
        for r, t in zip(v.values, q.values):
            if abs(t) > abs(r) or t * r < 0:
                failures.append(f"vector {k}: coordinate {r} -> {t}")
                break
    return no_failures(failures, len(context.core_vectors), "vectors")


@suite("truncate-bound", "core", "‖T_s v‖ <= min(s, ‖v‖)")
def truncate_bound(context: VerificationContext) -> Finding:
    worst, witness = None, ""
    for k, v in enumerate(context.core_vectors):
        for s in _radii(context):
            excess = truncate(v, s).sup_norm() - min(s, v.sup_norm())
            if worst is None or excess > worst:
                worst, witness = excess, f"vector {k}, s={s}"
    return at_most(worst, 0, witness, "excess of ‖T_s v‖ over min(s, ‖v‖)")


@suite("nonexpansive-operators", "core", "T_s and r_n are 1-Lipschitz")
def nonexpansive_operators(context: VerificationContext) -> Finding:
    chain = context.system.chain
    vectors = context.core_vectors
    worst, witness = Fraction(0), ""
    for k, (v, w) in enumerate(zip(vectors, vectors[1:])):
        base = sup_distance(v, w)
        if base == 0:
            continue
        images = [(f"T_{s}", truncate(v, s), truncate(w, s)) for s in _radii(context)]
        images += [(f"r_{n}", restrict(v, n, chain), restrict(w, n, chain)) for n in range(1, chain.n_max + 1)]
        for name, a, b in images:
            ratio = sup_distance(a, b) / base
            if ratio > worst:
                worst, witness = ratio, f"{name} on pair {k}"
    return at_most(worst, 1, witness, f"{len(vectors) - 1} consecutive pairs")


@suite("identity-lipschitz", "core", "Lip(id) = 1 on every realized block")
def identity_lipschitz(context: VerificationContext) -> Finding:
    points = context.chain.points
    first = context.chain.stage(1).m_points
    vectorized = lipschitz_constant_points(points, points, context.workers)
    exhaustive = lipschitz_constant([(x, x) for x in first])
    worst = max(vectorized, exhaustive)
    passed = vectorized == 1 and exhaustive == 1
    return Finding(passed, 1, worst, "", f"vectorized {vectorized} on M, pairwise {exhaustive} on M_1")
