"""Effort incentives induced by equilibrium disclosure behavior.

Each member privately chooses costly binary effort before outcomes realize;
the outcome distribution depends on the effort vector and is productive in
the stochastic-dominance sense. Given a team rule fixed at its full-effort
equilibrium (observers never see effort, so posteriors are frozen at the
full-effort values), a member's gain from effort decomposes into the shift of
their own expected outcome minus a correction for how concealment filters
that shift.

Full-effort sets are unions of boxes anchored at the per-equilibrium gain
vectors, so protocol dominance reduces to exact corner comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .equilibrium import (
    StrategyProfile,
    TeamRule,
    find_equilibria,
    full_disclosure_is_plausible,
    team_rule,
    verify_equilibrium,
)
from .outcomes import (
    JointDistribution,
    conditional,
    fosd_dominates,
    fosd_dominates_everywhere,
    marginal,
    mix,
    posterior_no_disclosure,
)
from .protocols import DeliberationProtocol
from .rationals import Rational, as_fraction

ZERO = Fraction(0)
ONE = Fraction(1)

SELF_IMPROVING = "self_improving"
TEAM_IMPROVING = "team_improving"
NEITHER = "neither"


class IncentiveError(ValueError):
    """Raised for malformed effort models or queries."""


class OffPathBracket(IncentiveError):
    """Raised when the no-disclosure bracket is conditioned on an off-path event.

    Happens only if concealment has zero probability at full effort but
    positive probability at the deviation; callers opting into the skeptical
    convention replace the undefined full-effort posterior by the worst
    outcome.
    """


@dataclass(frozen=True)
class EffortModel:
    """Outcome distribution per effort vector, plus effort costs.

    All distributions share one outcome space and are monotone in effort:
    raising any member's effort moves the joint distribution up in
    first-order stochastic dominance.
    """

    n: int
    dists: tuple[tuple[tuple[int, ...], JointDistribution], ...]
    costs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.n < 2:
            raise IncentiveError("an effort model needs at least 2 members")
        table = dict(self.dists)
        expected = {tuple((v >> i) & 1 for i in range(self.n)) for v in range(1 << self.n)}
        if set(table) != expected:
            raise IncentiveError("need one distribution per effort vector in {0,1}^n")
        space = table[(1,) * self.n].space
        if space.n != self.n:
            raise IncentiveError("outcome space does not match the member count")
        for e, d in table.items():
            if d.space != space:
                raise IncentiveError("all effort vectors must share one outcome space")
            if not d.full_support:
                raise IncentiveError(f"distribution at effort {e} lacks full support")
        if len(self.costs) != self.n or any(c <= 0 for c in self.costs):
            raise IncentiveError("costs must be strictly positive, one per member")
        for e in table:
            for i in range(self.n):
                if e[i] == 0:
                    up = tuple(1 if j == i else e[j] for j in range(self.n))
                    if not fosd_dominates(table[up], table[e]):
                        raise IncentiveError(
                            f"effort is not productive: {up} does not dominate {e}"
                        )

    @staticmethod
    def build(
        n: int,
        dist_of: Callable[[tuple[int, ...]], JointDistribution] | Mapping[tuple[int, ...], JointDistribution],
        costs: Sequence[Rational],
    ) -> "EffortModel":
        table = {}
        for v in range(1 << n):
            e = tuple((v >> i) & 1 for i in range(n))
            table[e] = dist_of[e] if isinstance(dist_of, Mapping) else dist_of(e)
        return EffortModel(
            n,
            tuple(sorted(table.items())),
            tuple(as_fraction(c) for c in costs),
        )

    def dist_of(self, effort: Sequence[int]) -> JointDistribution:
        e = tuple(effort)
        for key, d in self.dists:
            if key == e:
                return d
        raise IncentiveError(f"no distribution for effort vector {e}")

    @property
    def full_effort(self) -> tuple[int, ...]:
        return (1,) * self.n

    def without(self, i: int) -> tuple[int, ...]:
        if not 1 <= i <= self.n:
            raise IncentiveError(f"member {i} out of range 1..{self.n}")
        return tuple(0 if j == i - 1 else 1 for j in range(self.n))

    def replace_full_effort(self, dist: JointDistribution) -> "EffortModel":
        table = {e: d for e, d in self.dists}
        table[self.full_effort] = dist
        return EffortModel(self.n, tuple(sorted(table.items())), self.costs)


def _nd_stats(dist: JointDistribution, rule: TeamRule, i: int) -> tuple[Fraction, Fraction]:
    """(P(conceal), E[member-i value on the concealed event], unnormalized)."""
    pnd = ZERO
    mass = ZERO
    for cell, p, d in zip(dist.space.cells, dist.probs, rule.values):
        w = (ONE - d) * p
        pnd += w
        mass += cell[i - 1] * w
    return pnd, mass


def effort_gain(
    model: EffortModel, rule: TeamRule, i: int, off_path: str = "error"
) -> Fraction:
    """Member i's gain from effort when the team discloses by ``rule``.

    The observer's posterior is held at its full-effort value (effort is
    covert). ``off_path`` picks the convention when concealment is off-path at
    full effort but on-path at the deviation: "error" raises, "skeptical"
    scores the full-effort concealment event at the member's worst outcome.
    """
    if rule.space != model.dist_of(model.full_effort).space:
        raise IncentiveError("rule and model live on different outcome spaces")
    if not 1 <= i <= model.n:
        raise IncentiveError(f"member {i} out of range 1..{model.n}")
    full = model.dist_of(model.full_effort)
    dev = model.dist_of(model.without(i))
    base = full.mean_vector[i - 1] - dev.mean_vector[i - 1]
    pnd_dev, mass_dev = _nd_stats(dev, rule, i)
    if pnd_dev == 0:
        return base
    pnd_full, mass_full = _nd_stats(full, rule, i)
    if pnd_full == 0:
        if off_path == "skeptical":
            post_full = rule.space.grids[i - 1][0]
        else:
            raise OffPathBracket(
                "concealment is off-path at full effort but on-path at the deviation"
            )
    else:
        post_full = mass_full / pnd_full
    post_dev = mass_dev / pnd_dev
    return base - pnd_dev * (post_full - post_dev)


def effort_gain_cov(model: EffortModel, rule: TeamRule, i: int) -> Fraction:
    """Covariance form of the same gain: the correction is the improvement of
    the covariance between member i's outcome and the disclosure event."""
    if not 1 <= i <= model.n:
        raise IncentiveError(f"member {i} out of range 1..{model.n}")
    full = model.dist_of(model.full_effort)
    dev = model.dist_of(model.without(i))

    def stats(dist: JointDistribution) -> tuple[Fraction, Fraction]:
        pd = ZERO  # E[d]
        cross = ZERO  # E[omega_i * d]
        for cell, p, d in zip(dist.space.cells, dist.probs, rule.values):
            pd += d * p
            cross += cell[i - 1] * d * p
        mean = dist.mean_vector[i - 1]
        return ONE - pd, cross - mean * pd  # (P(ND), Cov[omega_i, d])

    pnd_full, cov_full = stats(full)
    pnd_dev, cov_dev = stats(dev)
    if pnd_full == 0:
        raise OffPathBracket("covariance form needs on-path concealment at full effort")
    base = full.mean_vector[i - 1] - dev.mean_vector[i - 1]
    return (ONE - pnd_dev) * base + (pnd_dev / pnd_full) * cov_full - cov_dev


def full_effort_set_contains(
    costs: Sequence[Rational], rule: TeamRule, model: EffortModel
) -> bool:
    """Whether the cost vector lets every member weakly prefer exerting effort."""
    c = tuple(as_fraction(x) for x in costs)
    if len(c) != model.n:
        raise IncentiveError("cost vector has wrong length")
    if any(x <= 0 for x in c):
        raise IncentiveError("costs must be strictly positive")
    return all(
        c[i - 1] <= effort_gain(model, rule, i, off_path="skeptical")
        for i in range(1, model.n + 1)
    )


@dataclass(frozen=True)
class GainVector:
    """Gain per member under one equilibrium rule; its full-effort set is the
    box of positive cost vectors below it."""

    gains: tuple[Fraction, ...]
    classification: str
    rule: TeamRule

    @property
    def positive(self) -> bool:
        return all(g > 0 for g in self.gains)


def protocol_full_effort_corners(
    protocol: DeliberationProtocol,
    model: EffortModel,
    refine: bool = False,
    max_members: int = 4,
    max_grid: int = 5,
) -> tuple[GainVector, ...]:
    """Gain vectors of every equilibrium rule at the full-effort distribution.

    With ``refine`` set, the off-path full-disclosure equilibrium is kept only
    when it survives the deliberation-consistency refinement; on-path
    equilibria justify their own posteriors and always survive.
    """
    full = model.dist_of(model.full_effort)
    corners = []
    for eq in find_equilibria(full, protocol, max_members, max_grid):
        if refine and eq.off_path and not full_disclosure_is_plausible(full, protocol):
            continue
        gains = tuple(
            effort_gain(model, eq.rule, i, off_path="skeptical")
            for i in range(1, model.n + 1)
        )
        corners.append(GainVector(gains, eq.classification, eq.rule))
    uniq: dict[tuple[Fraction, ...], GainVector] = {}
    for gv in corners:
        uniq.setdefault(gv.gains, gv)
    return tuple(uniq[k] for k in sorted(uniq, reverse=True))


def _covered(corner: tuple[Fraction, ...], corners: Sequence[GainVector]) -> bool:
    return any(
        all(a <= b for a, b in zip(corner, gv.gains)) for gv in corners if gv.positive
    )


@dataclass(frozen=True)
class DominanceReport:
    dominates: bool
    strictly: bool
    witness: tuple[Fraction, ...] | None
    corners_a: tuple[GainVector, ...]
    corners_b: tuple[GainVector, ...]


def dominance_report(
    protocol_a: DeliberationProtocol,
    protocol_b: DeliberationProtocol,
    model: EffortModel,
    refine: bool = False,
) -> DominanceReport:
    """Whether protocol_a's full-effort set contains protocol_b's.

    Both sets are unions of boxes anchored at equilibrium gain corners, so
    containment holds iff every positive corner of b sits below some positive
    corner of a. Strictness is witnessed by a positive corner of a outside
    b's set (itself a cost vector implementing full effort only under a).
    """
    corners_a = protocol_full_effort_corners(protocol_a, model, refine)
    corners_b = protocol_full_effort_corners(protocol_b, model, refine)
    dominates = all(
        _covered(gv.gains, corners_a) for gv in corners_b if gv.positive
    )
    witness = None
    if dominates:
        for gv in corners_a:
            if gv.positive and not _covered(gv.gains, corners_b):
                witness = gv.gains
                break
    return DominanceReport(
        dominates=dominates,
        strictly=dominates and witness is not None,
        witness=witness,
        corners_a=corners_a,
        corners_b=corners_b,
    )


def dominates(
    protocol_a: DeliberationProtocol,
    protocol_b: DeliberationProtocol,
    model: EffortModel,
    refine: bool = False,
    strict: bool = False,
) -> bool:
    report = dominance_report(protocol_a, protocol_b, model, refine)
    return report.strictly if strict else report.dominates


# ---------------------------------------------------------------------------
# Effort types
# ---------------------------------------------------------------------------


def _subsets_containing(n: int, i: int):
    others = [j for j in range(1, n + 1) if j != i]
    for mask in range(1 << len(others)):
        yield [i] + [others[j] for j in range(len(others)) if mask >> j & 1]


def _effort_vector(n: int, members: Sequence[int]) -> tuple[int, ...]:
    return tuple(1 if j + 1 in members else 0 for j in range(n))


def _univariate_strict_gain(f: JointDistribution, g: JointDistribution) -> bool:
    """Strict first-order gain of f over g on every proper upper tail."""
    grid = f.space.grids[0]
    for t in range(1, len(grid)):
        pf = sum(p for cell, p in zip(f.space.cells, f.probs) if cell[0] >= grid[t])
        pg = sum(p for cell, p in zip(g.space.cells, g.probs) if cell[0] >= grid[t])
        if pf <= pg:
            return False
    return True


def classify_effort(model: EffortModel) -> str:
    """self_improving / team_improving / neither.

    Self-improving: a member's effort leaves the others' joint distribution
    untouched and strictly lifts their own conditional distribution at every
    conditioning outcome. Team-improving is the mirror image.
    """
    n = model.n
    space = model.dist_of(model.full_effort).space

    def self_ok(i: int, with_i: JointDistribution, without_i: JointDistribution) -> bool:
        others = [j for j in range(1, n + 1) if j != i]
        if marginal(with_i, others).probs != marginal(without_i, others).probs:
            return False
        other_space = marginal(with_i, others).space
        for cells in other_space.cells:
            given = dict(zip(others, cells))
            if not _univariate_strict_gain(
                conditional(with_i, given), conditional(without_i, given)
            ):
                return False
        return True

    def team_ok(i: int, with_i: JointDistribution, without_i: JointDistribution) -> bool:
        if marginal(with_i, [i]).probs != marginal(without_i, [i]).probs:
            return False
        for v in space.grids[i - 1]:
            if not fosd_dominates_everywhere(
                conditional(with_i, {i: v}), conditional(without_i, {i: v})
            ):
                return False
        return True

    is_self = True
    is_team = True
    for i in range(1, n + 1):
        for members in _subsets_containing(n, i):
            with_i = model.dist_of(_effort_vector(n, members))
            without_i = model.dist_of(_effort_vector(n, [j for j in members if j != i]))
            if is_self and not self_ok(i, with_i, without_i):
                is_self = False
            if is_team and not team_ok(i, with_i, without_i):
                is_team = False
            if not is_self and not is_team:
                return NEITHER
    if is_self:
        return SELF_IMPROVING
    if is_team:
        return TEAM_IMPROVING
    return NEITHER


def effective_team_leader(model: EffortModel, i: int) -> bool:
    """Whether every other member's effort tightens the link between their own
    outcome and member i's worst outcome: conditional on i's worst draw,
    member j's expected outcome is strictly lower when j exerts effort."""
    if not 1 <= i <= model.n:
        raise IncentiveError(f"member {i} out of range 1..{model.n}")
    space = model.dist_of(model.full_effort).space
    worst = space.grids[i - 1][0]
    for j in range(1, model.n + 1):
        if j == i:
            continue
        pos = j if j < i else j - 1  # member j's index after conditioning away i
        full_cond = conditional(model.dist_of(model.full_effort), {i: worst})
        dev_cond = conditional(model.dist_of(model.without(j)), {i: worst})
        if not full_cond.mean_vector[pos - 1] < dev_cond.mean_vector[pos - 1]:
            return False
    return True


# ---------------------------------------------------------------------------
# Correlation mixing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonBarResult:
    found: bool
    epsilon_bar: Fraction | None
    monotone_on_grid: bool
    grid: tuple[tuple[Fraction, bool], ...]


def _conceal_worst_profile(space) -> StrategyProfile:
    return StrategyProfile(
        space,
        tuple(
            tuple(ZERO if p == 0 else ONE for p in range(len(g))) for g in space.grids
        ),
    )


def find_epsilon_bar(
    model_base: EffortModel,
    g_comonotone: JointDistribution,
    protocol_other: DeliberationProtocol,
    tolerance: Rational = Fraction(1, 10**6),
    grid_steps: int = 100,
) -> EpsilonBarResult:
    """Smallest mixing weight toward the comonotone distribution above which
    the given protocol strictly dominates unilateral disclosure.

    Uses the conceal-only-your-worst-outcome equilibrium of the mixed
    full-effort distribution. The dominance indicator is scanned on a grid
    first; if it is not monotone there, that is reported rather than assumed
    away, and the bisection brackets its first switch to true.
    """
    if protocol_other.all_unilateral:
        raise IncentiveError("the comparison protocol must differ from unilateral disclosure")
    full = model_base.dist_of(model_base.full_effort)
    if g_comonotone.space != full.space:
        raise IncentiveError("comonotone distribution lives on a different space")
    if not fosd_dominates(g_comonotone, full):
        raise IncentiveError("the comonotone distribution must dominate the base")
    tolerance = as_fraction(tolerance)
    space = full.space
    profile = _conceal_worst_profile(space)
    rule = team_rule(profile, protocol_other)

    def indicator(eps: Fraction) -> bool:
        mixed = mix(full, g_comonotone, eps)
        post = posterior_no_disclosure(mixed, rule)
        if not verify_equilibrium(profile, post, mixed, protocol_other).ok:
            return False
        weak = True
        strict = False
        for i in range(1, model_base.n + 1):
            dev = model_base.dist_of(model_base.without(i))
            pnd_dev, mass_dev = _nd_stats(dev, rule, i)
            if pnd_dev == 0:
                continue
            post_dev = mass_dev / pnd_dev
            if post[i - 1] > post_dev:
                weak = False
                break
            if post[i - 1] < post_dev:
                strict = True
        return weak and strict

    grid = []
    for j in range(1, grid_steps):
        eps = Fraction(j, grid_steps)
        grid.append((eps, indicator(eps)))
    flags = [f for _, f in grid]
    monotone = all(flags[j] <= flags[j + 1] for j in range(len(flags) - 1))
    if True not in flags:
        return EpsilonBarResult(False, None, monotone, tuple(grid))
    first = flags.index(True)
    hi = grid[first][0]
    lo = grid[first - 1][0] if first > 0 else ZERO
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        if indicator(mid):
            hi = mid
        else:
            lo = mid
    return EpsilonBarResult(True, hi, monotone, tuple(grid))
