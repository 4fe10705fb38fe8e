"""Compatibility, extension property and the λ̄ bound of the system."""
from checks.context import VerificationContext
from checks.registry import Finding, at_most, no_failures, suite
from construction.bd_system import compatibility_samples, extend, lambda_of
from construction.linf_core import restrict


def _samples(context: VerificationContext, n: int):
    return compatibility_samples(context.system, n, context.config.caps.compatibility_sample)


@suite("compatibility", "system", "i_n = i_m∘r_m∘i_n for n < m <= N_max")
def compatibility(context: VerificationContext) -> Finding:
    system = context.system
    chain = system.chain
    failures, checked = [], 0
    for n in range(1, system.n_max):
        for v in _samples(context, n):
            image = extend(system, n, v)
            for m in range(n + 1, system.n_max + 1):
                checked += 1
                if extend(system, m, restrict(image, m, chain)) != image:
                    failures.append(f"n={n}, m={m}, v={v}")
    return no_failures(failures, checked, "(n, m, v) triples")


@suite("extension-property", "system", "r_n(i_n(v)) = v")
def extension_property(context: VerificationContext) -> Finding:
    system = context.system
    failures, checked = [], 0
    for n in range(1, system.n_max + 1):
        for v in _samples(context, n):
            checked += 1
            if restrict(extend(system, n, v), n, system.chain) != v:
                failures.append(f"n={n}, v={v}")
    return no_failures(failures, checked, "sample vectors")


@suite("lambda-bound", "system", "sup_n ‖i_n‖ <= λ̄ and ‖i_n v‖ <= λ̄‖v‖")
def lambda_bound(context: VerificationContext) -> Finding:
    system = context.system
    value = lambda_of(system)
    for n in range(1, system.n_max + 1):
        for v in _samples(context, n):
            if extend(system, n, v).sup_norm() > system.lambda_bar * v.sup_norm():
                return Finding(False, system.lambda_bar, value, f"n={n}, v={v}", "sampled norm exceeds λ̄‖v‖")
    return at_most(value, system.lambda_bar, "", "max absolute row sum over the composed matrices")
