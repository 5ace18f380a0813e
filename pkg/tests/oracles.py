"""Independent brute-force oracles used by the tests.

These re-derive expected values from first principles (subset loops, explicit
branch enumeration, direct payoff accounting) without reusing the library's
own formulas, so each checked quantity has two separate routes to the answer.
"""
from fractions import Fraction
from itertools import product

ZERO = Fraction(0)
ONE = Fraction(1)


def subsets(members):
    members = list(members)
    for mask in range(1 << len(members)):
        yield [members[i] for i in range(len(members)) if mask >> i & 1]


def wins(minimal_winning, coalition):
    s = set(coalition)
    return any(set(c) <= s for c in minimal_winning)


def requires_more_consensus_bruteforce(n, minimal_winning):
    """Direct subset-loop version of the consensus comparison."""
    members = list(range(1, n + 1))
    for group in subsets(members):
        if not group:
            continue
        complement = [m for m in members if m not in group]
        if not wins(minimal_winning, group):
            continue
        if wins(minimal_winning, complement):
            continue
        # group is pivotal: need a strict subgroup that can block on its own
        blocked = False
        for sub in subsets(group):
            if len(sub) == len(group):
                continue
            rest = [m for m in members if m not in sub]
            if not wins(minimal_winning, rest):
                blocked = True
                break
        if not blocked:
            return False
    return True


def posterior_by_enumeration(cells, probs, disclose, member_index):
    """E[member value | concealed], summing cell by cell."""
    num = ZERO
    den = ZERO
    for cell, p, d in zip(cells, probs, disclose):
        num += cell[member_index] * (ONE - d) * p
        den += (ONE - d) * p
    assert den > 0, "oracle conditioned on a null event"
    return num / den


def upper_set_masks_bruteforce(cells):
    """All upper sets of the componentwise order, as index bitmasks.

    Filters every subset, so only usable up to ~16 cells.
    """
    n = len(cells)
    above = []
    for i, c in enumerate(cells):
        m = 0
        for j, d in enumerate(cells):
            if all(a >= b for a, b in zip(d, c)):
                m |= 1 << j
        above.append(m)
    out = []
    for mask in range(1 << n):
        rest = mask
        ok = True
        while rest:
            i = (rest & -rest).bit_length() - 1
            if above[i] & ~mask:
                ok = False
                break
            rest &= rest - 1
        if ok:
            out.append(mask)
    return out


def fosd_bruteforce(cells, probs_f, probs_g, strict=False):
    weak = True
    some_strict = False
    for mask in upper_set_masks_bruteforce(cells):
        pf = pg = ZERO
        rest = mask
        while rest:
            i = (rest & -rest).bit_length() - 1
            pf += probs_f[i]
            pg += probs_g[i]
            rest &= rest - 1
        if pf < pg:
            weak = False
            break
        if pf > pg:
            some_strict = True
    if strict:
        return weak and some_strict
    return weak


def fosd_everywhere_bruteforce(cells, probs_f, probs_g):
    full = (1 << len(cells)) - 1
    for mask in upper_set_masks_bruteforce(cells):
        if mask in (0, full):
            continue
        gap = ZERO
        rest = mask
        while rest:
            i = (rest & -rest).bit_length() - 1
            gap += probs_f[i] - probs_g[i]
            rest &= rest - 1
        if gap <= 0:
            return False
    return True


def binary_branch_enumeration(n, p, q_team, q_own, q_other, k):
    """(P(ND), P(own high and ND), E[own|ND]) by enumerating both branches.

    Walks the common branch's two outcomes and the independent branch's 2^n
    outcome vectors explicitly; concealment means fewer than k high draws.
    """
    p = Fraction(p)
    q_team = Fraction(q_team)
    q_own = Fraction(q_own)
    q_other = Fraction(q_other)
    pnd = ZERO
    hi_nd = ZERO

    # common branch: everyone shares one draw
    for value, weight in ((1, q_team), (0, ONE - q_team)):
        if n * value < k:  # highs are n*value
            pnd += p * weight
            if value == 1:
                hi_nd += p * weight

    # independent branch
    for outcome in product((0, 1), repeat=n):
        w = q_own if outcome[0] == 1 else ONE - q_own
        for v in outcome[1:]:
            w *= q_other if v == 1 else ONE - q_other
        if sum(outcome) < k:
            pnd += (ONE - p) * w
            if outcome[0] == 1:
                hi_nd += (ONE - p) * w
    mean = hi_nd / pnd if pnd > 0 else ZERO
    return pnd, hi_nd, mean


def effort_payoff_difference(full_dist, dev_dist, rule_values, member_index):
    """Gain from effort by direct payoff accounting.

    Disclosed outcomes pay their own value; concealed ones pay the observer's
    posterior, frozen at its everyone-works value (the observer never sees
    effort). Returns the payoff at full effort minus at the deviation.
    """
    cells = full_dist.space.cells
    if all(d == ONE for d in rule_values):
        post = full_dist.space.grids[member_index][0]  # skeptical: never used on path
    else:
        post = posterior_by_enumeration(cells, full_dist.probs, rule_values, member_index)

    def payoff(dist):
        total = ZERO
        for cell, p, d in zip(cells, dist.probs, rule_values):
            total += p * (d * cell[member_index] + (ONE - d) * post)
        return total

    return payoff(full_dist) - payoff(dev_dist)
