import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from suploc import models
from suploc.localization import localize_all
from suploc.omegasynth import (
    assemble_fomega,
    build_rabin_buchi,
    controllability_subset,
    existence_check,
    inf_closure,
    restrict_sup,
)
from suploc.safety import controlled_plant, sup_con_star


@pytest.fixture(scope="session")
def sf():
    """The full factory pipeline, computed once."""
    plant = models.plant()
    spec = models.safety_spec()
    sup = sup_con_star(plant, spec)
    closed = controlled_plant(plant, sup)
    maxspec = models.start_fairness_spec()
    minimal = models.alternation_spec()
    prod = build_rabin_buchi(closed, maxspec)
    ctr = controllability_subset(prod, plant.alphabet)
    asup = restrict_sup(prod, ctr)
    infa = inf_closure(minimal, closed)
    ok, witness = existence_check(infa, asup)
    assert ok, witness
    supw = assemble_fomega(asup, ctr, minimal, existence_verified=True)
    controllers = localize_all(plant, sup, closed, supw)
    return {
        "plant": plant,
        "spec": spec,
        "sup": sup,
        "closed": closed,
        "maxspec": maxspec,
        "minimal": minimal,
        "prod": prod,
        "ctr": ctr,
        "asup": asup,
        "infa": infa,
        "supw": supw,
        "controllers": controllers,
    }
