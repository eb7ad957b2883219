import pytest

import mutants


@pytest.mark.parametrize("label", sorted(mutants.MUTANTS))
@pytest.mark.parametrize("seed", [mutants.SEED, 7, 99])
def test_mutant_is_caught_in_its_section(label, seed):
    rep, group = mutants.MUTANTS[label](seed)
    failing = rep.failures()
    assert failing
    assert failing[0].group == group, failing[0].name
