"""Shell orders, the index sets E(n) and G(n), and the intermediate retractions Ψ_{n,i}, φ_{n,i}."""
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from checks.context import VerificationContext
from checks.registry import Finding, at_most, no_failures, suite
from construction.basis_assembly import commutation_failures
from construction.fine_retractions import (
    EIndex,
    GIndex,
    big_m,
    compose_locals_phi,
    compose_locals_psi,
    psi_closed_form,
    local_psi,
    local_truncation,
    m_value,
    phi_closed_form,
    phi_intermediate,
    psi_intermediate,
)
from construction.linf_core import Point, lipschitz_constants_of_tables, point_norm
from construction.net_blocks import phi, psi


def _e_indices(context: VerificationContext) -> list[EIndex]:
    return [context.construction.e_indices[n] for n in sorted(context.construction.e_indices)]


def _g_indices(context: VerificationContext) -> list[GIndex]:
    return [context.construction.g_indices[n] for n in sorted(context.construction.g_indices)]


def _family_tables(points: Sequence[Point], count: int, retraction: Callable[[int, Point], Point]) -> np.ndarray:
    """Row i holds the positions of retraction(i, x) for x in points, i = 0..count."""
    position = {x: k for k, x in enumerate(points)}
    tables = np.empty((count + 1, len(points)), dtype=np.intp)
    for i in range(count + 1):
        tables[i] = [position[retraction(i, x)] for x in points]
    return tables


def _psi_tables(context: VerificationContext, e: EIndex) -> tuple[tuple[Point, ...], np.ndarray]:
    points = context.chain.stage(e.stage).m_points
    return points, _family_tables(points, e.size, lambda i, x: psi_intermediate(e, i, x))


def _phi_tables(context: VerificationContext, g: GIndex) -> tuple[tuple[Point, ...], np.ndarray]:
    points = context.chain.stage(g.stage).d_points
    return points, _family_tables(points, g.size, lambda i, x: phi_intermediate(g, i, x))


def _shifted(failures: list[tuple[int, int, int]], stage: int, points: Sequence[Point]) -> list[str]:
    # commutation_failures counts maps from 1; these families start at index 0
    return [f"n={stage}, i1={a - 1}, i2={b - 1}, x={points[k]}" for a, b, k in failures]


@suite("shell-order", "fine", "shells complete, duplicate-free, norm-monotone, lexicographic inside a shell")
def shell_order(context: VerificationContext) -> Finding:
    failures = []
    for e in _e_indices(context):
        order = e.order
        if order.points[0] != (0,) * order.width:
            failures.append(f"n={e.stage}: y_0 is not 0")
        if len(order.index) != len(order.points):
            failures.append(f"n={e.stage}: duplicate points")
        if any(a > b for a, b in zip(order.norms, order.norms[1:])):
            failures.append(f"n={e.stage}: norms decrease")
        for m in range(order.max_shell + 1):
            shell = [p for p, norm in zip(order.points, order.norms) if norm == m]
            expected = (2 * m + 1) ** order.width - (2 * m - 1) ** order.width if m else 1
            if len(shell) != expected or shell != sorted(shell):
                failures.append(f"n={e.stage}: shell {m} has {len(shell)} points, expected {expected} in order")
    return no_failures(failures, len(_e_indices(context)), "shell orders")


@suite("bound", "fine", "‖y_{j1}‖-1 <= m(j2,j1) <= ‖y_{j1}‖ for j1 < j2")
def bound(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for e in _e_indices(context):
        order = e.order
        for j2 in range(1, len(order)):
            for j1 in range(j2):
                checked += 1
                value = m_value(order, j1, j2)
                if not order.norms[j1] - 1 <= value <= order.norms[j1]:
                    failures.append(f"n={e.stage}, j1={j1}, j2={j2}, m={value}")
    return no_failures(failures, checked, "(j1, j2) pairs")


@suite("local-commutation", "fine", "local maps absorb later ones: T_{j1}∘T_{j2} = T_{j2}, ψ_{i1}∘ψ_{i2} = ψ_{i2}, j1 >= j2")
def local_commutation(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for e in _e_indices(context):
        order = e.order
        for j2 in range(1, len(order)):
            for k in range(j2 + 1):
                moved = order.local_truncation(j2, k)
                for j1 in range(j2, len(order)):
                    checked += 1
                    if order.local_truncation(j1, moved) != moved:
                        failures.append(f"T: n={e.stage}, j1={j1}, j2={j2}, k={k}")
        lower = context.chain.stage(e.stage - 1).d_points
        for i2 in range(1, e.size + 1):
            domain = list(lower) + list(e.points[:i2])
            for x in domain:
                moved = local_psi(e, i2, x)
                for i1 in range(i2, e.size + 1):
                    checked += 1
                    if local_psi(e, i1, moved) != moved:
                        failures.append(f"ψ: n={e.stage}, i1={i1}, i2={i2}, x={x}")
    for g in _g_indices(context):
        lower = context.chain.stage(g.stage).m_points
        for i2 in range(1, g.size + 1):
            for x in list(lower) + list(g.points[:i2]):
                moved = local_truncation(g, i2, x)
                for i1 in range(i2, g.size + 1):
                    checked += 1
                    if local_truncation(g, i1, moved) != moved:
                        failures.append(f"T_n: n={g.stage}, i1={i1}, i2={i2}, x={x}")
    return no_failures(failures, checked, "compositions")


@suite("e-index", "fine", "E(n) is lexicographic and i ↦ x^n_i is a bijection onto M_n \\ D_{n-1}")
def e_index(context: VerificationContext) -> Finding:
    failures = []
    for e in _e_indices(context):
        if any(a >= b for a, b in zip(e.entries, e.entries[1:])):
            failures.append(f"n={e.stage}: E(n) is not strictly lexicographic")
        if len(e.k_sets[0]) != len(e.d_points):
            failures.append(f"n={e.stage}: K(0,n) is not 1..k(n)")
        blocks, lower = context.chain.stage(e.stage), context.chain.stage(e.stage - 1)
        if len(set(e.points)) != len(e.points) or set(e.points) != blocks.m_set - lower.d_set:
            failures.append(f"n={e.stage}: x^n_i do not enumerate M_n \\ D_(n-1)")
    detail = ", ".join(f"i({e.stage})={e.size}" for e in _e_indices(context))
    finding = no_failures(failures, len(_e_indices(context)), "index sets")
    return Finding(finding.passed, finding.bound, finding.worst, finding.witness, detail or finding.detail)


@suite("psi-intermediate-commutation", "fine", "Ψ_{n,i1}∘Ψ_{n,i2} = Ψ_{n,min(i1,i2)} on M_n")
def psi_intermediate_commutation(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for e in _e_indices(context):
        points, tables = _psi_tables(context, e)
        checked += tables.shape[0] ** 2 * tables.shape[1]
        failures += _shifted(commutation_failures(tables), e.stage, points)
    return no_failures(failures, checked, "(i1, i2, x) triples")


@suite("psi-anchor", "fine", "Ψ_{n,0} = Ψ_n on M_n")
def psi_anchor(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for e in _e_indices(context):
        for x in context.chain.stage(e.stage).m_points:
            checked += 1
            if psi_intermediate(e, 0, x) != psi(context.chain, e.stage, x):
                failures.append(f"n={e.stage}, x={x}")
    return no_failures(failures, checked, "points")


@suite("psi-composition-oracle", "fine", "Ψ_{n,i} equals the explicit composition ψ_{n,i+1}∘...∘ψ_{n,i(n)}")
def psi_composition_oracle(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for e in _e_indices(context):
        for i in range(e.size + 1):
            for x in context.chain.stage(e.stage).m_points:
                checked += 1
                if psi_intermediate(e, i, x) != compose_locals_psi(e, i, x):
                    failures.append(f"n={e.stage}, i={i}, x={x}")
    return no_failures(failures, checked, "(i, x) pairs")


@suite("psi-closed-form", "fine", "Ψ_{n,i1}(x^n_{i2}) is the truncation of y_{j2} at radius M(i1,i2)")
def psi_closed_form_suite(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for e in _e_indices(context):
        for i2 in range(2, e.size + 1):
            x = e.point(i2)
            for i1 in range(1, i2):
                checked += 1
                if psi_intermediate(e, i1, x) != psi_closed_form(context.chain, e, i1, i2):
                    failures.append(f"n={e.stage}, i1={i1}, i2={i2}")
    return no_failures(failures, checked, "(i1, i2) pairs")


@suite("remlip", "fine", "‖y_{j1}‖-2 <= M(i1,i2) <= ‖y_{j1}‖ for i1 < i2")
def remlip(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for e in _e_indices(context):
        for i2 in range(2, e.size + 1):
            for i1 in range(1, i2):
                checked += 1
                j1, _ = e.entry(i1)
                norm = e.order.norms[j1]
                value = big_m(e, i1, i2)
                if not norm - 2 <= value <= norm:
                    failures.append(f"n={e.stage}, i1={i1}, i2={i2}, M={value}")
    return no_failures(failures, checked, "(i1, i2) pairs")


@suite("psi-intermediate-lipschitz", "fine", "Lip(Ψ_{n,i}) <= (3λ̄+2)(3λ̄²+6λ̄+11)")
def psi_intermediate_lipschitz(context: VerificationContext) -> Finding:
    lam = context.lambda_bar
    worst, witness = Fraction(0), ""
    for e in _e_indices(context):
        points, tables = _psi_tables(context, e)
        for i, value in enumerate(lipschitz_constants_of_tables(points, tables, context.workers)):
            if value > worst:
                worst, witness = value, f"n={e.stage}, i={i}"
    return at_most(worst, (3 * lam + 2) * (3 * lam**2 + 6 * lam + 11), witness)


@suite("g-index", "fine", "G(n) is norm-monotone and i ↦ c^n_i is a bijection onto C_n")
def g_index(context: VerificationContext) -> Finding:
    failures = []
    for g in _g_indices(context):
        if any(a > b for a, b in zip(g.norms, g.norms[1:])):
            failures.append(f"n={g.stage}: shell norms decrease")
        if len(set(g.points)) != len(g.points) or set(g.points) != set(context.chain.stage(g.stage).c_points):
            failures.append(f"n={g.stage}: c^n_i do not enumerate C_n")
    return no_failures(failures, len(_g_indices(context)), "index sets")


@suite("phi-intermediate-commutation", "fine", "φ_{n,i1}∘φ_{n,i2} = φ_{n,min(i1,i2)} on D_n")
def phi_intermediate_commutation(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for g in _g_indices(context):
        points, tables = _phi_tables(context, g)
        checked += tables.shape[0] ** 2 * tables.shape[1]
        failures += _shifted(commutation_failures(tables), g.stage, points)
    return no_failures(failures, checked, "(i1, i2, x) triples")


@suite("phi-anchor", "fine", "φ_{n,0} = φ_n on D_n")
def phi_anchor(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for g in _g_indices(context):
        for x in context.chain.stage(g.stage).d_points:
            checked += 1
            if phi_intermediate(g, 0, x) != phi(context.chain, g.stage, x):
                failures.append(f"n={g.stage}, x={x}")
    return no_failures(failures, checked, "points")


@suite("phi-composition-oracle", "fine", "φ_{n,i} equals the explicit composition T_{n,i+1}∘...∘T_{n,c(n)}")
def phi_composition_oracle(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for g in _g_indices(context):
        for i in range(g.size + 1):
            for x in context.chain.stage(g.stage).d_points:
                checked += 1
                if phi_intermediate(g, i, x) != compose_locals_phi(g, i, x):
                    failures.append(f"n={g.stage}, i={i}, x={x}")
    return no_failures(failures, checked, "(i, x) pairs")


@suite("phi-closed-form", "fine", "φ_{n,i}(x) = (r_n|D_n)⁻¹(T_t(r_n x)) with t = ‖r_n φ_{n,i}(x)‖")
def phi_closed_form_suite(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for g in _g_indices(context):
        for i in range(g.size + 1):
            for x in context.chain.stage(g.stage).d_points:
                checked += 1
                if phi_closed_form(context.chain, g, i, x) != phi_intermediate(g, i, x):
                    failures.append(f"n={g.stage}, i={i}, x={x}")
    return no_failures(failures, checked, "(i, x) pairs")


@suite("sandwich", "fine", "‖z_i‖ >= ‖r_n φ_{n,i}(x)‖ >= min(‖r_n x‖, ‖z_i‖-1)")
def sandwich(context: VerificationContext) -> Finding:
    failures, checked = [], 0
    for g in _g_indices(context):
        width = context.chain.stage(g.stage).width
        for i in range(1, g.size + 1):
            top = g.norms[i - 1]
            for x in context.chain.stage(g.stage).d_points:
                checked += 1
                image = point_norm(phi_intermediate(g, i, x)[:width])
                if not top >= image >= min(point_norm(x[:width]), top - 1):
                    failures.append(f"n={g.stage}, i={i}, x={x}")
    return no_failures(failures, checked, "(i, x) pairs")


@suite("phi-intermediate-lipschitz", "fine", "Lip(φ_{n,i}) <= 2λ̄²+4λ̄+4")
def phi_intermediate_lipschitz(context: VerificationContext) -> Finding:
    lam = context.lambda_bar
    worst, witness = Fraction(0), ""
    for g in _g_indices(context):
        points, tables = _phi_tables(context, g)
        for i, value in enumerate(lipschitz_constants_of_tables(points, tables, context.workers)):
            if value > worst:
                worst, witness = value, f"n={g.stage}, i={i}"
    return at_most(worst, 2 * lam**2 + 4 * lam + 4, witness)
