"""Language operators on finite and infinite behaviors.

The prefix-closure of a star language is represented by its (trim,
all-accepting) automaton.  Limits are never materialized: membership of an
ultimately periodic word in lim(K) is decided by running it, which is exact
for deterministic prefix-closed K.  Containment of omega-languages is decided
on the synchronized product: with deterministic operands and single-pair
acceptance, every counterexample is witnessed by an ultimately periodic word,
and such a word shows up as a reachable product cycle whose infinity set is
accepting on one side and rejecting on the other.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .automata import (
    AutomatonError,
    BuchiAutomaton,
    Event,
    LassoWord,
    RabinBuchiAutomaton,
    StarAutomaton,
    State,
    Word,
    lasso_in_star,
    omega_visit_set,
    reachable_states,
    reachable_trim,
    tarjan_scc,
    totalize,
)


@dataclass(frozen=True)
class StarLanguageHandle:
    """A prefix-closed star language, held as a trim all-accepting automaton.

    ``automaton is None`` encodes the empty language (which, being
    prefix-free of even the empty string, has no automaton of this shape).
    """

    automaton: Optional[StarAutomaton]

    @property
    def is_empty(self) -> bool:
        return self.automaton is None

    @property
    def alphabet(self):
        if self.automaton is None:
            raise AutomatonError("empty language handle has no alphabet")
        return self.automaton.alphabet


def states_reaching_accepting_cycle(b: BuchiAutomaton) -> set[State]:
    """States from which some cycle through an accepting state is reachable."""
    a = b.core
    reach = reachable_states(a)

    def succ(q):
        return [a.transitions[(q, e)] for e in a.enabled(q)]

    on_acc_cycle: set[State] = set()
    for comp in tarjan_scc(reach, succ):
        compset = set(comp)
        nontrivial = len(comp) > 1 or any(
            a.transitions.get((comp[0], e)) == comp[0] for e in a.alphabet.events
        )
        if nontrivial and compset & b.accepting:
            on_acc_cycle |= compset
    # backward closure over reachable states
    preds: dict[State, list[State]] = {q: [] for q in reach}
    reachset = set(reach)
    for (q, _e), t in a.transitions.items():
        if q in reachset and t in reachset:
            preds[t].append(q)
    good = set(on_acc_cycle)
    queue = deque(good)
    while queue:
        t = queue.popleft()
        for q in preds[t]:
            if q not in good:
                good.add(q)
                queue.append(q)
    return good


def states_reaching_pair_cycle(core: StarAutomaton, r_set, i_set) -> set[State]:
    """States from which some cycle inside I through an R state is reachable."""
    reach = reachable_states(core)
    inside = [q for q in reach if q in i_set]

    def succ_i(q):
        return [core.transitions[(q, e)] for e in core.enabled(q)
                if core.transitions[(q, e)] in i_set]

    on_cycle: set[State] = set()
    for comp in tarjan_scc(inside, succ_i):
        compset = set(comp)
        nontrivial = len(comp) > 1 or comp[0] in succ_i(comp[0])
        if nontrivial and compset & r_set:
            on_cycle |= compset
    preds: dict[State, list[State]] = {q: [] for q in reach}
    reachset = set(reach)
    for (q, _e), t in core.transitions.items():
        if q in reachset and t in reachset:
            preds[t].append(q)
    good = set(on_cycle)
    queue = deque(good)
    while queue:
        t = queue.popleft()
        for q in preds[t]:
            if q not in good:
                good.add(q)
                queue.append(q)
    return good


def pre_automaton(a: BuchiAutomaton | StarAutomaton | StarLanguageHandle) -> StarLanguageHandle:
    """Automaton for the set of finite prefixes of the declared language.

    For a star automaton this is just the trim structure.  For a Buchi
    automaton, states that cannot reach an accepting cycle contribute no
    prefixes and are pruned first.
    """
    if isinstance(a, StarLanguageHandle):
        if a.is_empty:
            return a
        return StarLanguageHandle(reachable_trim(a.automaton))
    if isinstance(a, StarAutomaton):
        return StarLanguageHandle(reachable_trim(a))
    good = states_reaching_accepting_cycle(a)
    if a.core.initial not in good:
        return StarLanguageHandle(None)
    core = a.core
    trans = {k: t for k, t in core.transitions.items() if k[0] in good and t in good}
    pruned = StarAutomaton(core.alphabet, tuple(q for q in core.states if q in good),
                           core.initial, trans)
    return StarLanguageHandle(reachable_trim(pruned))


def clo_automaton(a: BuchiAutomaton) -> BuchiAutomaton:
    """Omega-closure: the limit of pre of the automaton's omega-language."""
    handle = pre_automaton(a)
    if handle.is_empty:
        empty = StarAutomaton(a.alphabet, (0,), 0, {})
        return BuchiAutomaton(empty, frozenset())
    return BuchiAutomaton(handle.automaton, frozenset(handle.automaton.states))


def is_deadlock_free(a: BuchiAutomaton) -> bool:
    """True iff every reachable state reaches an accepting cycle."""
    good = states_reaching_accepting_cycle(a)
    return all(q in good for q in reachable_states(a.core))


def star_equal(a: StarLanguageHandle, b: StarLanguageHandle) -> tuple[bool, Optional[Word]]:
    """Exact equality of prefix-closed languages, with a shortest-difference
    witness string on failure."""
    if a.is_empty or b.is_empty:
        if a.is_empty and b.is_empty:
            return True, None
        return False, ()
    return _star_compare(a.automaton, b.automaton, containment=False)


def star_contained(a: StarLanguageHandle, b: StarLanguageHandle) -> tuple[bool, Optional[Word]]:
    """Exact containment L(a) <= L(b), with a witness in L(a) \\ L(b)."""
    if a.is_empty:
        return True, None
    if b.is_empty:
        return False, ()
    return _star_compare(a.automaton, b.automaton, containment=True)


def _star_compare(a: StarAutomaton, b: StarAutomaton, containment: bool):
    if a.alphabet.events != b.alphabet.events:
        raise AutomatonError("alphabet mismatch")
    start = (a.initial, b.initial)
    parent: dict[tuple, Optional[tuple]] = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        qa, qb = pair
        ea, eb = set(a.enabled(qa)), set(b.enabled(qb))
        bad = (ea - eb) if containment else (ea ^ eb)
        if bad:
            e = min(bad, key=a.alphabet.index)
            word: list[Event] = [e]
            cur = pair
            while parent[cur] is not None:
                cur, ev = parent[cur]
                word.append(ev)
            return False, tuple(reversed(word))
        for e in sorted(ea & eb, key=a.alphabet.index):
            nxt = (a.transitions[(qa, e)], b.transitions[(qb, e)])
            if nxt not in parent:
                parent[nxt] = (pair, e)
                queue.append(nxt)
    return True, None


def _acceptance_pair(aut, layer: str):
    """(R, I) view of the queried acceptance condition."""
    states = frozenset(aut.core.states)
    if isinstance(aut, BuchiAutomaton):
        return aut.accepting, states
    if layer == "buchi":
        return aut.buchi, states
    if layer == "rabin":
        return aut.single_pair()
    raise AutomatonError(f"unknown acceptance layer {layer!r}")


def omega_contained_single_pair(
    a: BuchiAutomaton | RabinBuchiAutomaton,
    b: BuchiAutomaton | RabinBuchiAutomaton,
    a_layer: str = "rabin",
    b_layer: str = "rabin",
) -> tuple[bool, Optional[LassoWord]]:
    """Decide S(a) <= S(b); on failure return a lasso in S(a) \\ S(b).

    Searches the synchronized product (b totalized with a dead sink) for a
    reachable cycle accepting for a's condition and rejecting for b's.  Two
    cycle shapes cover all counterexamples: a cycle inside I_a avoiding R_b
    that hits R_a, and a cycle inside I_a hitting both R_a and the complement
    of I_b.
    """
    if a.core.alphabet.events != b.core.alphabet.events:
        raise AutomatonError("alphabet mismatch")
    ra, ia = _acceptance_pair(a, a_layer)
    rb, ib = _acceptance_pair(b, b_layer)
    was_total = b.core.is_total()
    bt = totalize(b.core)
    sink = None if was_total else bt.states[-1]

    alphabet = a.core.alphabet
    edges: dict[tuple[tuple, Event], tuple] = {}
    start = (a.core.initial, bt.initial)
    parent: dict[tuple, Optional[tuple]] = {start: None}
    order = [start]
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        qa, qb = pair
        for e in alphabet.events:
            na = a.core.transitions.get((qa, e))
            if na is None:
                continue
            nxt = (na, bt.transitions[(qb, e)])
            edges[(pair, e)] = nxt
            if nxt not in parent:
                parent[nxt] = (pair, e)
                order.append(nxt)
                queue.append(nxt)

    def b_outside_i(pair):
        return pair[1] == sink or pair[1] not in ib

    def b_in_r(pair):
        return pair[1] != sink and pair[1] in rb

    def a_in_r(pair):
        return pair[0] in ra

    def restricted_succ(region):
        def succ(pair):
            return [edges[(pair, e)] for e in alphabet.events
                    if (pair, e) in edges and edges[(pair, e)] in region]
        return succ

    def cycle_through(region, anchor, waypoints):
        """Event path: anchor -> each waypoint in turn -> anchor, inside region."""
        word: list[Event] = []
        cur = anchor
        for goal in list(waypoints) + [anchor]:
            if cur == goal and word:
                continue
            seg = _bfs_path(edges, alphabet, region, cur, goal)
            word.extend(seg)
            cur = goal
        if not word:  # anchor on a self-loop
            for e in alphabet.events:
                if edges.get((anchor, e)) == anchor:
                    return [e]
        return word

    witness_cycle = None
    anchor = None
    # shape 1: cycle inside I_a, avoiding R_b, hitting R_a
    region1 = {p for p in order if p[0] in ia and not b_in_r(p)}
    for comp in tarjan_scc([p for p in order if p in region1], restricted_succ(region1)):
        compset = set(comp)
        succ = restricted_succ(compset)
        nontrivial = len(compset) > 1 or comp[0] in succ(comp[0])
        hits = [p for p in order if p in compset and a_in_r(p)]
        if nontrivial and hits:
            anchor = hits[0]
            witness_cycle = cycle_through(compset, anchor, [])
            break
    if witness_cycle is None:
        # shape 2: cycle inside I_a hitting R_a and leaving I_b
        region2 = {p for p in order if p[0] in ia}
        for comp in tarjan_scc([p for p in order if p in region2], restricted_succ(region2)):
            compset = set(comp)
            succ = restricted_succ(compset)
            if len(compset) == 1 and comp[0] not in succ(comp[0]):
                continue
            hits = [p for p in order if p in compset and a_in_r(p)]
            outs = [p for p in order if p in compset and b_outside_i(p)]
            if hits and outs:
                anchor = hits[0]
                witness_cycle = cycle_through(compset, anchor, [outs[0]])
                break
    if witness_cycle is None:
        return True, None

    stem: list[Event] = []
    cur = anchor
    while parent[cur] is not None:
        cur, e = parent[cur]
        stem.append(e)
    stem.reverse()
    lasso = LassoWord(tuple(stem), tuple(witness_cycle))
    lasso = _shrink_lasso(lasso, a, b, a_layer, b_layer)
    return False, lasso


def _bfs_path(edges, alphabet, region, src, dst) -> list[Event]:
    """Shortest non-empty event path src -> dst within region."""
    local: dict[tuple, Optional[tuple]] = {}
    queue = deque()
    for e in alphabet.events:
        t = edges.get((src, e))
        if t is not None and t in region:
            if t == dst:
                return [e]
            if t not in local:
                local[t] = (None, e)
                queue.append(t)
    while queue:
        p = queue.popleft()
        for e in alphabet.events:
            t = edges.get((p, e))
            if t is None or t not in region:
                continue
            if t == dst:
                word = [e]
                cur = p
                while cur is not None:
                    prev, ev = local[cur]
                    word.append(ev)
                    cur = prev
                return list(reversed(word))
            if t not in local:
                local[t] = (p, e)
                queue.append(t)
    raise AutomatonError("no path inside strongly connected region")


def lasso_accepted(aut, w: LassoWord, layer: str) -> bool:
    omega = omega_visit_set(aut.core, w)
    if omega is None:
        return False
    r, i = _acceptance_pair(aut, layer)
    return bool(omega & r) and omega <= i


def _shrink_lasso(w: LassoWord, a, b, a_layer, b_layer) -> LassoWord:
    """Greedy deterministic minimization: shorten the stem, then the cycle,
    keeping the lasso inside S(a) \\ S(b)."""

    def still_witness(cand: LassoWord) -> bool:
        return lasso_accepted(a, cand, a_layer) and not lasso_accepted(b, cand, b_layer)

    for k in range(len(w.stem) + 1):
        cand = LassoWord(w.stem[:k], w.cycle)
        if still_witness(cand):
            w = cand
            break
    for m in range(1, len(w.cycle)):
        cand = LassoWord(w.stem, w.cycle[:m])
        if still_witness(cand):
            w = cand
            break
    return w

