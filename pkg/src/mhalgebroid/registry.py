"""Fixed registry of check names, grouped by the part of the theory they belong to."""

GROUPS = {
    "hopf-algebroid": (
        "quantum-graph", "balanced-tensors", "left-galois-definition", "right-galois-definition",
        "left-comult-module", "right-comult-module", "left-galois-module", "right-galois-module",
        "left-comult-coass", "right-comult-coass", "dg:left-galois-1", "dg:left-galois-2",
        "dg:right-galois-1", "dg:right-galois-2", "compatible", "dg:compatible", "regular",
        "dg:left-counit", "eq:right-counit", "dg:antipode", "dg:galois-inverse", "dg:galois-aux",
        "dg:galois-aux2", "counits-antipode", "counits-full", "star-admissible", "star-comult",
        "involutions",
    ),
    "integration": (
        "base-weight", "counit-kms", "base-counit", "base-counit-mult", "invariance-canonical-left",
        "invariance-canonical-right", "dg:strong-invariance-left", "dg:strong-invariance-right",
        "integrals-oo-left", "integrals-oo-right", "integrals-antipode", "integrals-uniqueness",
        "uniqueness-phi-psi", "uniqueness-full", "corollary-full", "convolution-counit", "convolution",
        "dual-strong-invariance", "modular", "modular-automorphism", "bphi-phib", "modular-element",
        "modular-element-second", "modular-intertwining", "integrals-faithful", "extension-multipliers",
    ),
    "duality": (
        "dual-algebra", "dual-product", "dual-quantum-graphs", "dual-involution", "dual-evaluation",
        "dual-pairings", "dual-embeddings", "dual-bijections", "dual-counit", "dual-hopf-algebroid",
        "dual-measured", "dual-left-integral", "dual-right-integral", "dual-right-integral-fac",
        "dual-positivity", "biduality", "dual-multipliers", "mult-comult", "dual-galois-multipliers",
        "dual-bimodule-explicit",
    ),
    "examples": (
        "groupoid-hopf", "groupoid-measured", "groupoid-dual", "hopf-axioms", "coupled-action",
        "coupled-invariance", "coupled-hopf", "coupled-counits", "coupled-antipode", "coupled-measured",
        "coupled-dual",
    ),
}

GROUP_TITLES = {
    "hopf-algebroid": "Regular multiplier Hopf algebroids",
    "integration": "Integration",
    "duality": "Duality",
    "examples": "Examples",
}

GROUP_ORDER = ("hopf-algebroid", "integration", "duality", "examples")

_INDEX = {name: g for g, names in GROUPS.items() for name in names}
ALL_CHECKS = tuple(name for g in GROUP_ORDER for name in GROUPS[g])


def group_of(name: str) -> str:
    try:
        return _INDEX[name]
    except KeyError:
        raise KeyError(f"check name {name!r} is not registered") from None


def order_of(name: str) -> int:
    return ALL_CHECKS.index(name)
