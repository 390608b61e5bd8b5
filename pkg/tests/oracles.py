"""Independent oracles used to derive expected values in the tests.

Everything here is deliberately brute force: plain string enumeration,
fixpoints over explicit string sets, exhaustive subset search.  None of it
shares code paths with the library operations it checks.
"""

from collections import deque

from suploc.automata import LassoWord, StarAutomaton, lasso_in_star, run_lasso, run_star


def enumerate_language(aut: StarAutomaton, max_len: int) -> set[tuple]:
    """All accepted strings of length <= max_len, by brute enumeration."""
    out = {()}
    frontier = {(): aut.initial}
    for _ in range(max_len):
        nxt = {}
        for word, q in frontier.items():
            for e in aut.alphabet.events:
                t = aut.transitions.get((q, e))
                if t is not None:
                    w2 = word + (e,)
                    nxt[w2] = t
                    out.add(w2)
        frontier = nxt
    return out


def language_equal_upto(a: StarAutomaton, b: StarAutomaton, max_len: int) -> bool:
    return enumerate_language(a, max_len) == enumerate_language(b, max_len)


def projection(word, events) -> tuple:
    return tuple(e for e in word if e in events)


def in_projected_product(word, components) -> bool:
    """Membership oracle for the synchronous product: the projection onto
    each component's alphabet must be accepted there."""
    for c in components:
        if run_star(c, projection(word, set(c.alphabet.events))) is None:
            return False
    return True


def supremal_controllable_finite(universe: set[tuple], legal: set[tuple],
                                 uncontrollable, plant_lang: set[tuple]) -> set[tuple]:
    """Supremal controllable prefix-closed sublanguage on a finite string
    universe, by iterated removal."""
    def prefix_closed(k):
        return {w[:i] for w in k for i in range(len(w) + 1)}

    k = {w for w in legal if w in plant_lang}
    k = {w for w in k if all(w[:i] in legal for i in range(len(w) + 1))}
    k = prefix_closed(k) & plant_lang & legal
    while True:
        bad = set()
        for w in k:
            for u in uncontrollable:
                wu = w + (u,)
                if wu in plant_lang and wu not in k:
                    bad.add(w)
                    break
        if not bad:
            return k
        # removing a string removes all its extensions
        k = {w for w in k if not any(w[:i] in bad for i in range(len(w) + 1))}


def lasso_semantic_closed_loop(plant_buchi, star_automata, w: LassoWord) -> bool:
    """Membership of a lasso in the closed loop: accepted by the plant and
    inside the limit of every supervisor/controller language."""
    if not run_lasso(plant_buchi, w):
        return False
    return all(lasso_in_star(a, w) for a in star_automata)
