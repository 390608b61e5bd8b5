"""Scratch: drive the bundled factory through the pipeline and print counts."""
import sys
sys.path.insert(0, "src")

from suploc import models
from suploc.automata import *
from suploc.omega import *
from suploc.safety import *
from suploc.omegasynth import *
from suploc.localization import *

plant = models.plant()
print("plant buchi:", len(plant.core.states), "states,", plant.core.n_transitions(),
      "transitions,", len(plant.accepting), "accepting")

spec = models.safety_spec()
sup = sup_con_star(plant, spec)
print("SUP*:", len(sup.automaton.states), "states,", sup.automaton.n_transitions(),
      "transitions, |B| =", len(sup.buchi_lift), "marked:", sorted(sup.buchi_lift))

closed = controlled_plant(plant, sup)
maxspec = models.start_fairness_spec()
prod = build_rabin_buchi(closed, maxspec)
print("A:", len(prod.core.states), "states, |B| =", len(prod.buchi),
      "|R| =", len(prod.rabin_pairs[0][0]), "|I| =", len(prod.rabin_pairs[0][1]))

ctr = controllability_subset(prod, plant.alphabet)
print("C^A:", len(ctr.subset), "of", len(prod.core.states))
refined = {q: sorted(set(prod.core.enabled(q)) - ctr.phi[q]) for q in sorted(ctr.subset)
           if set(prod.core.enabled(q)) != ctr.phi[q]}
print("phi refinements:", len(refined), refined)

asup = restrict_sup(prod, ctr)
minimal = models.alternation_spec()
infa = inf_closure(minimal, closed)
ok, wit = existence_check(infa, asup)
print("existence:", ok, wit)

supw = assemble_fomega(asup, ctr, minimal, existence_verified=ok)
print("SUP^w:", len(supw.automaton.states), "states,", supw.automaton.n_transitions(),
      "transitions, |B| =", len(supw.buchi_lift))

# disablement counts against the controlled plant
for alpha in ("a1", "a2"):
    prof = profile_liveness(closed, supw, alpha, Part.NONE)
    n_dis = sum(1 for v in prof.disable.values() if v)
    prof1 = profile_liveness(closed, supw, alpha, Part.C1)
    prof2 = profile_liveness(closed, supw, alpha, Part.C2)
    print(f"{alpha}: disabled at {n_dis} states; C1 {sum(prof1.disable.values())},"
          f" C2 {sum(prof2.disable.values())}")

controllers = localize_all(plant, sup, closed, supw)
for c in controllers:
    print(c.kind.value, c.event, c.part.value, len(c.automaton.states), "states")
