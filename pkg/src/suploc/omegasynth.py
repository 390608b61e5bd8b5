"""Liveness supervisor synthesis on a single-Rabin-pair product automaton.

Pipeline: build one product automaton carrying three acceptance layers
(star / Buchi / Rabin), compute its controllability subset and a maximal
memoryless control pattern map by solving a parity game, restrict the Rabin
layer to the subset, check the existence condition against the minimal
acceptable behavior, and realize the supervisor as the product of the legal
region with a totalized tracker of the minimal behavior.

The game semantics credits the Buchi layer as a liveness assumption: a run
that violates the Buchi layer need not satisfy the Rabin objective.  With a
single pair (R, I) this is the parity condition over priorities

    3 : outside I      (losing if seen infinitely often)
    2 : in R
    1 : in the Buchi layer, outside R
    0 : everything else

where the controller picks, at every state, a control pattern (a nonempty
subset of the defined events containing every defined uncontrollable event)
and the plant picks an event from the pattern.  Only the multi-pair case is
out of scope and rejected.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .automata import (
    Alphabet,
    AutomatonError,
    BuchiAutomaton,
    Event,
    LassoWord,
    RabinBuchiAutomaton,
    StarAutomaton,
    State,
    buchi_intersection,
    buchi_lift,
    reachable_states,
    reachable_trim,
    renumber_bfs,
    tarjan_scc,
    totalize,
)
from .omega import (
    StarLanguageHandle,
    clo_automaton,
    omega_contained_single_pair,
    pre_automaton,
    states_reaching_pair_cycle,
)


@dataclass(frozen=True)
class ControllabilityResult:
    """Winning states of the control game and a maximal winning pattern map."""

    subset: frozenset[State]
    phi: dict[State, frozenset[Event]]


@dataclass(frozen=True)
class OmegaSupervisor:
    """Liveness supervisor realized over (legal-region state, tracker state).

    `psi` gives the enabled-event set per supervisor state; `tracker` is the
    totalized automaton of the minimal acceptable behavior whose sink state
    (`tracker_sink`) flags strings that have left that behavior's prefixes.
    `z_component` maps each supervisor state to its tracker component.
    """

    automaton: StarAutomaton
    buchi_lift: frozenset[State]
    psi: dict[State, frozenset[Event]]
    tracker: StarAutomaton
    tracker_sink: State
    z_component: dict[State, State]


def _as_rabin(legal: BuchiAutomaton | RabinBuchiAutomaton) -> RabinBuchiAutomaton:
    if isinstance(legal, RabinBuchiAutomaton):
        legal.single_pair()
        return legal
    states = frozenset(legal.core.states)
    return RabinBuchiAutomaton(legal.core, states, ((legal.accepting, states),))


def build_rabin_buchi(
    plant: BuchiAutomaton,
    legal: BuchiAutomaton | RabinBuchiAutomaton,
    liveness_reference: Optional[BuchiAutomaton] = None,
) -> RabinBuchiAutomaton:
    """Product of the controlled plant with the legal specification.

    The star layer accepts L(plant) ^ pre(E_l); the Buchi layer accepts the
    plant's accepted infinite behavior restricted to the closure of E_l; the
    Rabin pair of the legal automaton is lifted through the product.  When a
    `liveness_reference` is given, the Buchi layer is re-marked by joint
    reachability against it (states reachable by some string accepted there),
    mirroring how the plant's own marking was obtained.
    """
    rl = _as_rabin(legal)
    if plant.alphabet.events != rl.alphabet.events:
        raise AutomatonError("alphabet mismatch")
    alphabet = plant.alphabet
    r_set, i_set = rl.single_pair()

    # pre(E_l): legal states that still admit a pair-accepted continuation;
    # the pruned tracker is then made total with an absorbing dead sink so
    # the product's star layer accepts the plant's finite behavior exactly
    # (strings outside pre(E_l) run into the sink, which satisfies nothing)
    good = states_reaching_pair_cycle(rl.core, r_set, i_set)
    if rl.core.initial not in good:
        raise AutomatonError("legal specification has empty omega-language")
    pruned = reachable_trim(StarAutomaton(
        alphabet,
        tuple(q for q in rl.core.states if q in good),
        rl.core.initial,
        {k: t for k, t in rl.core.transitions.items() if k[0] in good and t in good},
    ))
    tracker = totalize(pruned)
    sink = tracker.states[-1] if not pruned.is_total() else None

    init = (plant.core.initial, tracker.initial)
    num: dict[tuple, int] = {init: 0}
    origin: list[tuple] = [init]
    trans: dict[tuple[State, Event], State] = {}
    queue = deque([init])
    while queue:
        vec = queue.popleft()
        src = num[vec]
        q, l = vec
        for e in alphabet.events:
            tq = plant.core.transitions.get((q, e))
            if tq is None:
                continue
            nxt = (tq, tracker.transitions[(l, e)])
            if nxt not in num:
                num[nxt] = len(num)
                origin.append(nxt)
                queue.append(nxt)
            trans[(src, e)] = num[nxt]

    core = StarAutomaton(alphabet, tuple(range(len(num))), 0, trans)
    rabin_r = frozenset(i for i, (q, l) in enumerate(origin) if l in r_set and l != sink)
    rabin_i = frozenset(i for i, (q, l) in enumerate(origin) if l in i_set and l != sink)
    if liveness_reference is None:
        buchi = frozenset(i for i, (q, l) in enumerate(origin)
                          if q in plant.accepting and l != sink)
    else:
        buchi = frozenset(q for q in buchi_lift(core, liveness_reference)
                          if origin[q][1] != sink)
    return RabinBuchiAutomaton(core, buchi, ((rabin_r, rabin_i),))


# ---------------------------------------------------------------------------
# the control game


def _patterns(enabled: tuple[Event, ...], alphabet: Alphabet) -> list[frozenset[Event]]:
    """Valid control patterns at a state: nonempty subsets of the defined
    events that keep every defined uncontrollable event, largest first."""
    floor = tuple(e for e in enabled if e in alphabet.uncontrollable)
    optional = tuple(e for e in enabled if e in alphabet.controllable)
    out = []
    for k in range(len(optional), -1, -1):
        for combo in combinations(optional, k):
            pat = frozenset(floor) | frozenset(combo)
            if pat:
                out.append(pat)
    return out


def _priority(q, r_set, i_set, b_set) -> int:
    if q not in i_set:
        return 3
    if q in r_set:
        return 2
    if q in b_set:
        return 1
    return 0


def _zielonka(nodes, edges, owner, priority):
    """Memoryless parity game solver; returns winning sets and strategies.

    owner[v] in {0, 1} (0 = controller); a player stuck at its own node
    loses.  Strategies map a node of the winning player to a chosen
    successor.
    """
    nodes = set(nodes)
    if not nodes:
        return set(), set(), {}, {}
    p = max(priority[v] for v in nodes)
    player = p % 2
    target = {v for v in nodes if priority[v] == p}
    attr, attr_strat = _attractor(player, target, nodes, edges, owner)
    rest = nodes - attr
    w0, w1, s0, s1 = _zielonka(rest, edges, owner, priority)
    wins = (w0, w1)
    strats = (s0, s1)
    if not wins[1 - player]:
        strat = dict(strats[player])
        strat.update(attr_strat)
        for v in target:
            if owner[v] == player:
                succ = [t for t in edges.get(v, ()) if t in nodes]
                if succ:
                    strat.setdefault(v, succ[0])
        if player == 0:
            return nodes, set(), strat, {}
        return set(), nodes, {}, strat
    opp = 1 - player
    b_attr, b_strat = _attractor(opp, wins[opp], nodes, edges, owner)
    rest2 = nodes - b_attr
    w0b, w1b, s0b, s1b = _zielonka(rest2, edges, owner, priority)
    if opp == 0:
        strat0 = dict(s0)
        strat0.update(b_strat)
        strat0.update(s0b)
        return w0b | b_attr, w1b, strat0, s1b
    strat1 = dict(s1)
    strat1.update(b_strat)
    strat1.update(s1b)
    return w0b, w1b | b_attr, s0b, strat1


def _attractor(player, target, nodes, edges, owner):
    """Attractor of `target` for `player` within `nodes`, with a strategy for
    the player's nodes that move toward the target."""
    attr = set(target) & nodes
    strat = {}
    # count remaining escapes for opponent nodes
    out_count = {}
    preds: dict = {}
    for v in nodes:
        succ = [t for t in edges.get(v, ()) if t in nodes]
        out_count[v] = len(succ)
        for t in succ:
            preds.setdefault(t, []).append(v)
    queue = deque(attr)
    while queue:
        t = queue.popleft()
        for v in preds.get(t, ()):  # v in nodes by construction
            if v in attr:
                continue
            if owner[v] == player:
                attr.add(v)
                strat.setdefault(v, t)
                queue.append(v)
            else:
                out_count[v] -= 1
                if out_count[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strat


def controllability_subset(a: RabinBuchiAutomaton, alphabet: Alphabet) -> ControllabilityResult:
    """States from which a supervisor can win the liveness control objective,
    together with a maximal winning control pattern per state.

    A winning supervisor must, from every state it can reach, keep some
    continuation that satisfies the plant's Buchi layer (deadlock-freedom
    with respect to the accepted infinite behavior); the parity game alone
    would also admit "vacuous" wins that starve the liveness assumption, so
    states without a live continuation under the maximal pattern map are
    pruned and the game re-solved until stable.
    """
    r_set, i_set = a.single_pair()
    core = a.core
    if core.alphabet.events != alphabet.events:
        raise AutomatonError("alphabet mismatch")

    allowed = set(core.states)
    while True:
        winning, phi = _solve_pattern_game(core, alphabet, allowed, r_set, i_set, a.buchi)
        live = _states_reaching_live_cycle(core, phi, winning, a.buchi)
        if live == winning:
            return ControllabilityResult(frozenset(winning), phi)
        allowed = live


def _solve_pattern_game(core, alphabet, allowed, r_set, i_set, b_set):
    nodes = []
    edges: dict = {}
    owner = {}
    priority = {}
    # losing sink keeps the game graph total: a state with no valid pattern
    # deadlocks (or exits the allowed region), which loses for the controller
    dead = ("dead",)
    nodes.append(dead)
    owner[dead] = 1
    priority[dead] = 1
    edges[dead] = [dead]
    for q in core.states:
        if q not in allowed:
            continue
        cnode = ("c", q)
        nodes.append(cnode)
        owner[cnode] = 0
        priority[cnode] = _priority(q, r_set, i_set, b_set)
        succs = []
        for pat in _patterns(core.enabled(q), alphabet):
            pnode = ("p", q, pat)
            nodes.append(pnode)
            owner[pnode] = 1
            priority[pnode] = 0
            edges[pnode] = [
                ("c", core.transitions[(q, e)])
                if core.transitions[(q, e)] in allowed else dead
                for e in sorted(pat, key=alphabet.index)
            ]
            succs.append(pnode)
        edges[cnode] = succs or [dead]

    w0, _w1, strat0, _s1 = _zielonka(set(nodes), edges, owner, priority)
    winning = {q for q in core.states if ("c", q) in w0}

    # base pattern map from the game strategy, then greedy maximal enlargement
    phi: dict[State, frozenset[Event]] = {}
    for q in winning:
        choice = strat0.get(("c", q))
        if choice is None:  # interior of an attractor layer; any winning pattern
            choice = next(p for p in edges[("c", q)] if p in w0)
        phi[q] = choice[2]

    def phi_wins_everywhere(cand: dict) -> bool:
        return _pattern_map_wins(core, cand, winning, r_set, i_set, b_set)

    if not phi_wins_everywhere(phi):
        raise AssertionError("game strategy failed verification")
    for q in sorted(winning, key=core.states.index):
        for e in core.enabled(q):
            if e in phi[q] or e not in alphabet.controllable:
                continue
            if core.transitions[(q, e)] not in winning:
                continue
            trial = dict(phi)
            trial[q] = phi[q] | {e}
            if phi_wins_everywhere(trial):
                phi = trial
    return winning, phi


def _states_reaching_live_cycle(core, phi, region, b_set) -> set[State]:
    """States of `region` from which the pattern map keeps a continuation
    that visits the Buchi layer infinitely often."""

    def succ(q):
        return [core.transitions[(q, e)] for e in sorted(phi[q], key=core.alphabet.index)
                if core.transitions[(q, e)] in region]

    on_live: set[State] = set()
    ordered = [q for q in core.states if q in region]
    for comp in tarjan_scc(ordered, succ):
        compset = set(comp)
        nontrivial = len(comp) > 1 or comp[0] in succ(comp[0])
        if nontrivial and compset & b_set:
            on_live |= compset
    preds: dict[State, list[State]] = {q: [] for q in ordered}
    for q in ordered:
        for t in succ(q):
            preds[t].append(q)
    good = set(on_live)
    queue = deque(good)
    while queue:
        t = queue.popleft()
        for q in preds[t]:
            if q not in good:
                good.add(q)
                queue.append(q)
    return good


def _pattern_map_wins(core, phi, region, r_set, i_set, b_set) -> bool:
    """Check that the fixed memoryless pattern map wins from every state of
    `region`: no deadlock, plays stay in the region, and no reachable cycle
    has odd maximal priority."""
    for q in region:
        if not phi.get(q):
            return False
        for e in phi[q]:
            if core.transitions.get((q, e)) is None or core.transitions[(q, e)] not in region:
                return False

    def succ(q):
        return [core.transitions[(q, e)] for e in sorted(phi[q], key=core.alphabet.index)]

    ordered = [q for q in core.states if q in region]
    # cycles through a state outside I are losing outright
    for comp in tarjan_scc(ordered, succ):
        compset = set(comp)
        nontrivial = len(comp) > 1 or comp[0] in succ(comp[0])
        if not nontrivial:
            continue
        if any(q not in i_set for q in comp):
            return False
        # within I: a cycle avoiding R but meeting the Buchi layer is losing
        sub = compset - r_set
        for inner in tarjan_scc([q for q in ordered if q in sub],
                                lambda s: [t for t in succ(s) if t in sub]):
            innerset = set(inner)
            inner_nontrivial = len(inner) > 1 or inner[0] in [
                t for t in succ(inner[0]) if t in innerset
            ]
            if inner_nontrivial and innerset & b_set:
                return False
    return True


def restrict_sup(a: RabinBuchiAutomaton, c: ControllabilityResult) -> RabinBuchiAutomaton:
    """Degenerate every state outside the controllability subset: it keeps
    its transitions but leaves both R and I, so no run through it infinitely
    often can satisfy the pair."""
    r_set, i_set = a.single_pair()
    return RabinBuchiAutomaton(
        a.core,
        a.buchi,
        ((r_set & c.subset, i_set & c.subset),),
    )


def inf_closure(minimal: BuchiAutomaton, plant_omega: BuchiAutomaton) -> BuchiAutomaton:
    """Infimal omega-closed superlanguage of the minimal behavior relative to
    the plant: clo(A) ^ S(plant)."""
    return buchi_intersection(clo_automaton(minimal), plant_omega)


def existence_check(
    inf_a: BuchiAutomaton, sup_e: RabinBuchiAutomaton
) -> tuple[bool, Optional[LassoWord]]:
    """The supervisor existence condition: inf F(A) <= sup C(E_l)."""
    return omega_contained_single_pair(inf_a, sup_e, a_layer="buchi", b_layer="rabin")


def assemble_fomega(
    asup: RabinBuchiAutomaton,
    c: ControllabilityResult,
    minimal: BuchiAutomaton,
    *,
    existence_verified: bool,
    buchi_reference: Optional[BuchiAutomaton] = None,
) -> OmegaSupervisor:
    """Realize the piecewise liveness supervisor as one automaton.

    States are pairs (legal-region state, tracker state) where the tracker is
    the totalized automaton of the minimal behavior.  While the tracker is
    off its sink the string is a prefix of the minimal behavior and every
    defined event stays enabled; once the sink is reached, the maximal
    winning pattern of the legal region takes over.  The Buchi marking is
    lifted from the legal region's Buchi layer (or from `buchi_reference`).
    """
    if not existence_verified:
        raise AutomatonError("assemble_fomega requires a passed existence check")
    r_set, i_set = asup.single_pair()
    # the full-enablement branch may only move inside the prefix region of
    # the restricted legal behavior: states reaching an accepting cycle
    # without leaving the controllability subset (states outside it act as
    # degenerate traps).  On a fully controllable instance this is every
    # reachable state and the branch enables every defined event.
    if asup.core.initial not in c.subset:
        raise AutomatonError("restricted legal behavior is empty")
    sub_core = StarAutomaton(
        asup.alphabet,
        tuple(q for q in asup.core.states if q in c.subset),
        asup.core.initial,
        {k: t for k, t in asup.core.transitions.items()
         if k[0] in c.subset and t in c.subset},
    )
    prefix_region = states_reaching_pair_cycle(sub_core, r_set, i_set)
    if asup.core.initial not in prefix_region:
        raise AutomatonError("restricted legal behavior is empty")
    for q in prefix_region:
        for e in asup.core.enabled(q):
            if e in asup.alphabet.uncontrollable and \
                    asup.core.transitions[(q, e)] not in prefix_region:
                raise AutomatonError(
                    "prefix region of the restricted legal behavior is not "
                    "controllable; the controllability subset is inconsistent")

    trimmed = reachable_trim(minimal.core)
    tracker = totalize(trimmed)
    # with a total tracker every string stays a prefix of the minimal
    # behavior and the pattern branch is never taken
    sink = tracker.states[-1] if not trimmed.is_total() else None
    alphabet = asup.alphabet

    init = (asup.core.initial, tracker.initial)
    num: dict[tuple, int] = {init: 0}
    origin: list[tuple] = [init]
    trans: dict[tuple[State, Event], State] = {}
    psi_raw: dict[tuple, frozenset[Event]] = {}
    queue = deque([init])
    while queue:
        vec = queue.popleft()
        src = num[vec]
        q, z = vec
        if z == sink:
            enabled = frozenset(asup.core.enabled(q)) & c.phi[q]
        else:
            enabled = frozenset(
                e for e in asup.core.enabled(q)
                if asup.core.transitions[(q, e)] in prefix_region)
        psi_raw[vec] = enabled
        for e in sorted(enabled, key=alphabet.index):
            nxt = (asup.core.transitions[(q, e)], tracker.transitions[(z, e)])
            if nxt not in num:
                num[nxt] = len(num)
                origin.append(nxt)
                queue.append(nxt)
            trans[(src, e)] = num[nxt]

    aut = StarAutomaton(alphabet, tuple(range(len(num))), 0, trans)
    if buchi_reference is None:
        lift = frozenset(i for i, (q, z) in enumerate(origin) if q in asup.buchi)
    else:
        lift = buchi_lift(aut, buchi_reference)
    psi = {num[vec]: psi_raw[vec] for vec in origin}
    z_comp = {num[vec]: vec[1] for vec in origin}
    return OmegaSupervisor(aut, lift, psi, tracker, sink, z_comp)
