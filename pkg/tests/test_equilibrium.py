import random
from fractions import Fraction

import pytest

from team_disclosure.equilibrium import (
    FULL,
    INTERIOR,
    PARTIAL,
    EquilibriumError,
    SearchCapExceeded,
    StrategyProfile,
    TeamRule,
    classify_rule,
    consistent_with_deliberation,
    find_equilibria,
    full_disclosure_is_plausible,
    plausible_full_disclosure_by_search,
    team_rule,
    verify_equilibrium,
)
from team_disclosure.outcomes import (
    JointDistribution,
    binary_independent,
    binary_space,
    common_mixture,
    make_space,
    posterior_no_disclosure,
)
from team_disclosure.protocols import (
    all_protocols,
    make_consensus,
    make_k_majority,
    make_leader,
    make_protocol,
)

from oracles import posterior_by_enumeration

F = Fraction


def uniform_binary(n):
    return binary_independent([F(1, 2)] * n)


def random_dist(rng, n, sizes=(2, 3)):
    grids = [sorted(rng.sample(range(0, 8), rng.choice(sizes))) for _ in range(n)]
    space = make_space(grids)
    nums = [rng.randint(1, 20) for _ in space.cells]
    den = sum(nums)
    return JointDistribution(space, tuple(F(x, den) for x in nums))


class TestTeamRule:
    def test_all_ones_is_full_disclosure(self):
        d = uniform_binary(2)
        profile = StrategyProfile.constant(d.space, 1)
        for proto in all_protocols(2):
            assert team_rule(profile, proto).values == (F(1),) * 4

    def test_consensus_needs_both_high(self):
        d = uniform_binary(2)
        profile = StrategyProfile.from_votes(d.space, [[0, 1], [0, 1]])
        rule = team_rule(profile, make_consensus(2))
        assert rule.prob([1, 1]) == 1
        assert rule.prob([0, 1]) == rule.prob([1, 0]) == rule.prob([0, 0]) == 0

    def test_mixed_votes_use_multilinear_extension(self):
        d = uniform_binary(3)
        profile = StrategyProfile.from_votes(d.space, [[1, 1], [0, 0], [F(1, 2), F(1, 2)]])
        rule = team_rule(profile, make_k_majority(3, 2))
        assert rule.prob([0, 0, 0]) == F(1, 2)

    def test_dimension_mismatch(self):
        d = uniform_binary(2)
        with pytest.raises(EquilibriumError):
            team_rule(StrategyProfile.constant(d.space, 1), make_consensus(3))


class TestVerify:
    def test_full_disclosure_with_skeptical_beliefs(self):
        d = uniform_binary(2)
        profile = StrategyProfile.constant(d.space, 1)
        report = verify_equilibrium(profile, [0, 0], d, make_consensus(2))
        assert report.ok and report.off_path and not report.violations

    def test_consensual_threshold_equilibrium(self):
        d = uniform_binary(2)
        profile = StrategyProfile.from_votes(d.space, [[0, 1], [0, 1]])
        report = verify_equilibrium(profile, [F(1, 3), F(1, 3)], d, make_consensus(2))
        assert report.ok and not report.off_path

    def test_wrong_posteriors_reported(self):
        d = uniform_binary(2)
        profile = StrategyProfile.from_votes(d.space, [[0, 1], [0, 1]])
        report = verify_equilibrium(profile, [F(1, 2), F(1, 2)], d, make_consensus(2))
        assert not report.ok
        assert any(v.kind == "bayes" for v in report.violations)

    def test_coalition_deviation_reported(self):
        d = uniform_binary(2)
        # concealing everything is not stable: at (1,1) the pair would disclose
        profile = StrategyProfile.constant(d.space, 0)
        post = posterior_no_disclosure(d, team_rule(profile, make_consensus(2)))
        report = verify_equilibrium(profile, post, d, make_consensus(2))
        assert not report.ok
        assert any(v.kind == "deviation" for v in report.violations)


class TestWorkedSearches:
    def test_unilateral_only_full_class(self):
        eqs = find_equilibria(uniform_binary(2), make_k_majority(2, 1))
        assert all(e.classification == FULL for e in eqs)
        assert any(all(v == 1 for v in e.rule.values) for e in eqs)

    def test_consensual_interior_third(self):
        eqs = find_equilibria(uniform_binary(2), make_consensus(2))
        interior = [e for e in eqs if e.classification == INTERIOR]
        assert len(interior) == 1
        eq = interior[0]
        assert eq.posteriors == (F(1, 3), F(1, 3))
        assert eq.rule.prob([1, 1]) == 1 and eq.rule.prob([0, 0]) == 0
        # oracle: conceal everything but (1,1), then Bayes by enumeration
        rule = [F(1) if c == (1, 1) else F(0) for c in eq.space.cells]
        assert posterior_by_enumeration(eq.space.cells, uniform_binary(2).probs, rule, 0) == F(1, 3)

    def test_leader_partial_non_interior(self):
        eqs = find_equilibria(uniform_binary(2), make_leader(2, 1))
        partial = [e for e in eqs if e.classification != FULL]
        assert len(partial) == 1
        eq = partial[0]
        assert eq.classification == PARTIAL
        assert eq.posteriors == (F(0), F(1, 2))
        assert eq.rule.prob([0, 0]) == 0 and eq.rule.prob([0, 1]) == 0
        assert eq.rule.prob([1, 0]) == 1 and eq.rule.prob([1, 1]) == 1

    def test_equilibria_deduplicated_by_rule(self):
        eqs = find_equilibria(uniform_binary(2), make_consensus(2))
        rules = [e.rule.values for e in eqs]
        assert len(rules) == len(set(rules))

    def test_search_caps(self):
        space = make_space([[0, 1]] * 5)
        d = JointDistribution(space, tuple(F(1, 32) for _ in range(32)))
        with pytest.raises(SearchCapExceeded):
            find_equilibria(d, make_consensus(5))

    def test_ternary_grid_interior(self):
        space = make_space([[0, 1, 2], [0, 1, 2]])
        d = JointDistribution(space, tuple(F(1, 9) for _ in range(9)))
        eqs = find_equilibria(d, make_consensus(2))
        interior = [e for e in eqs if e.classification == INTERIOR]
        assert interior, "uniform ternary consensus should have an interior equilibrium"
        for eq in interior:
            assert eq.verification.ok


class TestClassification:
    def test_always_disclose_is_full(self):
        space = binary_space(2)
        assert classify_rule(TeamRule.constant(space, 1)) == FULL

    def test_single_concealed_cell_is_full(self):
        space = binary_space(2)
        vals = [F(1)] * 4
        vals[0] = F(0)
        assert classify_rule(TeamRule(space, tuple(vals))) == FULL

    def test_row_concealment_is_partial(self):
        space = binary_space(2)
        vals = [F(0) if cell[0] == 0 else F(1) for cell in space.cells]
        assert classify_rule(TeamRule(space, tuple(vals))) == PARTIAL

    def test_consensual_rule_is_interior(self):
        space = binary_space(2)
        vals = [F(1) if cell == (1, 1) else F(0) for cell in space.cells]
        assert classify_rule(TeamRule(space, tuple(vals))) == INTERIOR


class TestThresholdForm:
    def test_all_returned_profiles_are_thresholds(self):
        rng = random.Random(13)
        for _ in range(8):
            n = rng.choice((2, 3))
            d = random_dist(rng, n)
            for proto in all_protocols(n):
                for eq in find_equilibria(d, proto):
                    for i, grid in enumerate(d.space.grids):
                        for pos, value in enumerate(grid):
                            if value > eq.posteriors[i]:
                                assert eq.profile.values[i][pos] == 1
                            if value < eq.posteriors[i]:
                                assert eq.profile.values[i][pos] == 0


class TestBinaryInteriorRule:
    def test_interior_rule_is_high_set_vote(self):
        rng = random.Random(17)
        for _ in range(10):
            n = rng.choice((2, 3))
            d = random_dist(rng, n, sizes=(2,))
            for proto in all_protocols(n):
                expected = tuple(
                    F(1)
                    if proto.is_winning(
                        [i + 1 for i in range(n) if cell[i] == d.space.grids[i][1]]
                    )
                    else F(0)
                    for cell in d.space.cells
                )
                for eq in find_equilibria(d, proto):
                    if eq.classification == INTERIOR:
                        assert eq.rule.values == expected


class TestNestedProtocols:
    def test_wider_winning_discloses_more(self):
        rng = random.Random(19)
        for _ in range(10):
            n = rng.choice((2, 3))
            small = make_consensus(n)
            extra = [sorted(rng.sample(range(1, n + 1), rng.randint(1, n)))]
            big = make_protocol(n, list(small.minimal_winning) + extra)
            d = random_dist(rng, n, sizes=(2,))
            eqs_big = find_equilibria(d, big)
            for eq in find_equilibria(d, small):
                assert any(
                    all(b >= s for b, s in zip(other.rule.values, eq.rule.values))
                    for other in eqs_big
                )


class TestCorrelationStatics:
    def test_interior_rule_stable_and_masses_monotone(self):
        q = F(1, 2)
        f = common_mixture(2, F(1, 5), q, q)
        f_prime = common_mixture(2, F(3, 5), q, q)
        proto = make_consensus(2)
        space = f.space
        rule = tuple(F(1) if cell == (1, 1) else F(0) for cell in space.cells)
        assert any(e.rule.values == rule for e in find_equilibria(f, proto))
        assert any(e.rule.values == rule for e in find_equilibria(f_prime, proto))
        for i in range(2):
            hi_f = sum(p for c, p, d in zip(space.cells, f.probs, rule) if d == 1 and c[i] == 1)
            hi_fp = sum(p for c, p, d in zip(space.cells, f_prime.probs, rule) if d == 1 and c[i] == 1)
            lo_f = sum(p for c, p, d in zip(space.cells, f.probs, rule) if d == 0 and c[i] == 0)
            lo_fp = sum(p for c, p, d in zip(space.cells, f_prime.probs, rule) if d == 0 and c[i] == 0)
            assert hi_fp >= hi_f and lo_fp >= lo_f


class TestConsistency:
    def test_skeptical_beliefs_inconsistent_under_consensus(self):
        d = uniform_binary(2)
        assert not consistent_with_deliberation([0, 0], d, make_consensus(2))

    def test_leader_beliefs_consistent(self):
        d = uniform_binary(2)
        # the leader conceals only their worst draw; the partner never discloses
        assert consistent_with_deliberation([0, F(1, 2)], d, make_leader(2, 1))

    def test_prior_mean_always_consistent(self):
        rng = random.Random(23)
        for n in (2, 3):
            d = random_dist(rng, n, sizes=(2,))
            for proto in all_protocols(n):
                assert consistent_with_deliberation(d.mean_vector, d, proto)

    def test_profile_cap(self):
        space = make_space([[0, 1, 2, 3, 4]] * 4)
        probs = tuple(F(1, len(space.cells)) for _ in space.cells)
        d = JointDistribution(space, probs)
        with pytest.raises(SearchCapExceeded):
            consistent_with_deliberation(d.mean_vector, d, make_consensus(4))


class TestPlausibility:
    def test_k_majority_examples(self):
        d2 = uniform_binary(2)
        assert not full_disclosure_is_plausible(d2, make_consensus(2))
        d4 = uniform_binary(4)
        assert full_disclosure_is_plausible(d4, make_k_majority(4, 2))
        assert not full_disclosure_is_plausible(d4, make_k_majority(4, 3))

    def test_majority_of_three_is_plausible(self):
        # 2-of-3: the pair {1,2} can force disclosure and no strict subgroup
        # blocks it, so beliefs skeptical about that pair survive the search
        d = uniform_binary(3)
        assert full_disclosure_is_plausible(d, make_k_majority(3, 2))
        assert plausible_full_disclosure_by_search(d, make_k_majority(3, 2))

    def test_predicate_matches_search(self):
        rng = random.Random(29)
        for n in (2, 3):
            for _ in range(6):
                d = random_dist(rng, n, sizes=(2,))
                for proto in all_protocols(n):
                    assert full_disclosure_is_plausible(d, proto) == (
                        plausible_full_disclosure_by_search(d, proto)
                    )

    def test_search_shortcut_matches_generic_verifier(self):
        # the always-disclose support test inside the search is a specialized
        # encoding of the generic deviation check; cross-validate the two
        rng = random.Random(31)
        space = binary_space(2)
        d = uniform_binary(2)
        all_ones = StrategyProfile.constant(space, 1)
        for proto in all_protocols(2):
            blocking = [
                [i for i in range(2) if mask >> i & 1]
                for mask in range(1, 4)
                if not proto.wins(3 ^ mask)
            ]
            for _ in range(20):
                post = [F(rng.randint(0, 4), 4) for _ in range(2)]
                fast = all(any(post[i] <= 0 for i in grp) for grp in blocking)
                generic = verify_equilibrium(all_ones, post, d, proto).ok
                assert fast == generic


class TestExistenceSweep:
    def test_small_existence_sweep(self):
        rng = random.Random(37)
        for n in (2, 3):
            protos = all_protocols(n)
            for _ in range(4):
                d = random_dist(rng, n)
                for proto in protos:
                    eqs = find_equilibria(d, proto)
                    assert any(all(v == 1 for v in e.rule.values) for e in eqs)
                    partial = [e for e in eqs if e.classification != FULL]
                    assert bool(partial) == (not proto.all_unilateral)
                    if not proto.any_unilateral:
                        assert all(e.classification == INTERIOR for e in partial)
                    else:
                        assert not any(e.classification == INTERIOR for e in eqs)
                    assert all(e.verification.ok for e in eqs)


class TestIterationHeuristic:
    def test_converges_to_a_search_fixed_point(self):
        from team_disclosure.equilibrium import iterate_posteriors

        rng = random.Random(43)
        hits = 0
        for _ in range(12):
            n = rng.choice((2, 3))
            d = random_dist(rng, n, sizes=(2,))
            for proto in all_protocols(n):
                post, converged = iterate_posteriors(d, proto)
                if converged:
                    found = {e.posteriors for e in find_equilibria(d, proto)}
                    assert post in found
                    hits += 1
        assert hits > 0

    def test_consensual_pair_reaches_the_interior_point(self):
        from team_disclosure.equilibrium import iterate_posteriors

        post, converged = iterate_posteriors(uniform_binary(2), make_consensus(2))
        assert converged and post == (F(1, 3), F(1, 3))


class TestTwoMemberTaxonomy:
    def test_equilibrium_types_by_protocol_type(self):
        # two members admit three protocol types; each pins its equilibrium menu
        d = uniform_binary(2)
        menus = {}
        for proto in all_protocols(2):
            kinds = tuple(sorted(e.classification for e in find_equilibria(d, proto)))
            n_unilateral = sum(proto.can_unilaterally_disclose(i) for i in (1, 2))
            menus.setdefault(n_unilateral, set()).add(kinds)
        assert menus[2] == {("full", "full")}
        assert menus[1] == {("full", "partial")}
        assert menus[0] == {("full", "interior")}


class TestSearchCompleteness:
    def test_every_deterministic_equilibrium_rule_is_returned(self):
        # independent completeness oracle: enumerate all deterministic
        # own-outcome profiles, keep the ones that verify as equilibria with
        # their Bayes posteriors, and require each such team rule to appear in
        # the exhaustive search's output (threshold equivalence preserves rules)
        from itertools import product as iproduct
        from team_disclosure.outcomes import OffPathPosterior

        rng = random.Random(67)
        checked = 0
        for n in (2, 3):
            protos = all_protocols(n)
            for _ in range(3):
                d = random_dist(rng, n, sizes=(2,))
                space = d.space
                per_member = [
                    [tuple(map(F, bits)) for bits in iproduct((0, 1), repeat=len(g))]
                    for g in space.grids
                ]
                for proto in protos:
                    found = {e.rule.values for e in find_equilibria(d, proto)}
                    for rows in iproduct(*per_member):
                        profile = StrategyProfile(space, rows)
                        rule = team_rule(profile, proto)
                        try:
                            post = posterior_no_disclosure(d, rule)
                        except OffPathPosterior:
                            continue
                        if verify_equilibrium(profile, post, d, proto).ok:
                            checked += 1
                            assert rule.values in found
        assert checked > 50
