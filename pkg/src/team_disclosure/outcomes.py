"""Finite product outcome spaces and exact joint distributions.

Outcome grids are strictly increasing lists of rationals, one per member, and
a joint distribution is an explicit pmf over the product grid. Everything is
kept in exact rational arithmetic: marginals, conditionals, mixtures and
posteriors all sum to one exactly, which the equilibrium search relies on.

Multivariate first-order stochastic dominance is decided by enumerating upper
sets on small spaces and by an exact coupling-feasibility max-flow on larger
ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import lcm
from typing import Iterable, Mapping, Sequence

from ._flow import coupling_feasible, min_upper_set_sum
from .rationals import Rational, as_fraction

ZERO = Fraction(0)
ONE = Fraction(1)

UPPER_SET_ENUM_CELL_CAP = 12


class OutcomeError(ValueError):
    """Raised for malformed spaces, distributions or queries."""


class OffPathPosterior(OutcomeError):
    """Raised when a posterior is conditioned on a zero-probability event."""


@dataclass(frozen=True)
class OutcomeSpace:
    """Product grid of per-member outcome values."""

    grids: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if not self.grids:
            raise OutcomeError("need at least one member grid")
        for g in self.grids:
            if len(g) < 2:
                raise OutcomeError("each member grid needs at least 2 outcomes")
            if any(a >= b for a, b in zip(g, g[1:])):
                raise OutcomeError(f"grid {g} is not strictly increasing")

    @property
    def n(self) -> int:
        return len(self.grids)

    @cached_property
    def cells(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(product(*self.grids))

    @cached_property
    def cell_index(self) -> dict[tuple[Fraction, ...], int]:
        return {c: i for i, c in enumerate(self.cells)}

    @cached_property
    def positions(self) -> tuple[tuple[int, ...], ...]:
        """positions[i][c] = index of cell c's member-(i+1) value in grid i."""
        lookup = [{v: j for j, v in enumerate(g)} for g in self.grids]
        return tuple(
            tuple(lookup[i][cell[i]] for cell in self.cells) for i in range(self.n)
        )

    @property
    def min_vector(self) -> tuple[Fraction, ...]:
        return tuple(g[0] for g in self.grids)

    @property
    def max_vector(self) -> tuple[Fraction, ...]:
        return tuple(g[-1] for g in self.grids)

    def is_binary(self) -> bool:
        return all(len(g) == 2 for g in self.grids)


def make_space(grids: Sequence[Sequence[Rational]]) -> OutcomeSpace:
    return OutcomeSpace(tuple(tuple(as_fraction(v) for v in g) for g in grids))


def binary_space(n: int) -> OutcomeSpace:
    return make_space([[0, 1]] * n)


@dataclass(frozen=True)
class JointDistribution:
    """Exact pmf over the cells of an OutcomeSpace (lexicographic order)."""

    space: OutcomeSpace
    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.probs) != len(self.space.cells):
            raise OutcomeError("pmf length does not match the cell count")
        if any(p < 0 for p in self.probs):
            raise OutcomeError("probabilities must be nonnegative")
        if sum(self.probs) != ONE:
            raise OutcomeError("probabilities must sum to exactly 1")

    @cached_property
    def full_support(self) -> bool:
        return all(p > 0 for p in self.probs)

    def prob(self, cell: Sequence[Rational]) -> Fraction:
        key = tuple(as_fraction(v) for v in cell)
        try:
            return self.probs[self.space.cell_index[key]]
        except KeyError:
            raise OutcomeError(f"outcome {key} is not on the grid") from None

    @cached_property
    def mean_vector(self) -> tuple[Fraction, ...]:
        means = [ZERO] * self.space.n
        for cell, p in zip(self.space.cells, self.probs):
            for i, v in enumerate(cell):
                means[i] += v * p
        return tuple(means)


def from_pmf(
    space: OutcomeSpace, pmf: Mapping[tuple[Rational, ...], Rational]
) -> JointDistribution:
    probs = [ZERO] * len(space.cells)
    for cell, p in pmf.items():
        key = tuple(as_fraction(v) for v in cell)
        if key not in space.cell_index:
            raise OutcomeError(f"outcome {key} is not on the grid")
        probs[space.cell_index[key]] += as_fraction(p)
    return JointDistribution(space, tuple(probs))


def independent(marginals: Sequence[Mapping[Rational, Rational]]) -> JointDistribution:
    """Product distribution from per-member value->probability maps."""
    grids = []
    tables = []
    for m in marginals:
        items = sorted((as_fraction(v), as_fraction(p)) for v, p in m.items())
        grids.append([v for v, _ in items])
        tables.append(dict(items))
    space = make_space(grids)
    probs = tuple(
        _prod(tables[i][v] for i, v in enumerate(cell)) for cell in space.cells
    )
    return JointDistribution(space, probs)


def binary_independent(qs: Sequence[Rational]) -> JointDistribution:
    """Independent binary outcomes; qs[i] is member i+1's high probability."""
    return independent([{0: ONE - as_fraction(q), 1: as_fraction(q)} for q in qs])


def comonotone(values: Sequence[Rational], weights: Sequence[Rational], n: int) -> JointDistribution:
    """Distribution supported on the diagonal: all members share one outcome."""
    space = make_space([list(values)] * n)
    pmf = {
        tuple([v] * n): w for v, w in zip(values, weights)
    }
    return from_pmf(space, pmf)


def common_outcome_mixture(
    p: Rational, q_team: Rational, qs: Sequence[Rational]
) -> JointDistribution:
    """Binary mixture: with probability p all members share one high/low draw,
    otherwise each member i draws high independently with probability qs[i]."""
    p = as_fraction(p)
    q_team = as_fraction(q_team)
    qf = [as_fraction(q) for q in qs]
    n = len(qf)
    space = binary_space(n)
    probs = []
    for cell in space.cells:
        common = ZERO
        if all(v == ONE for v in cell):
            common = q_team
        elif all(v == ZERO for v in cell):
            common = ONE - q_team
        indep = _prod(qf[i] if v == ONE else ONE - qf[i] for i, v in enumerate(cell))
        probs.append(p * common + (ONE - p) * indep)
    return JointDistribution(space, tuple(probs))


def common_mixture(n: int, p: Rational, q_team: Rational, q: Rational) -> JointDistribution:
    """Symmetric common-outcome mixture: every member has the same independent q."""
    return common_outcome_mixture(p, q_team, [q] * n)


def _prod(xs: Iterable[Fraction]) -> Fraction:
    out = ONE
    for x in xs:
        out *= x
    return out


def marginal(dist: JointDistribution, members: Sequence[int]) -> JointDistribution:
    """Exact marginal over a nonempty subset of members (1-based, kept in order)."""
    members = list(members)
    if not members:
        raise OutcomeError("marginal needs a nonempty member subset")
    n = dist.space.n
    for i in members:
        if not 1 <= i <= n:
            raise OutcomeError(f"member {i} out of range 1..{n}")
    if len(set(members)) != len(members):
        raise OutcomeError("duplicate members in marginal subset")
    idx = [i - 1 for i in members]
    sub = make_space([dist.space.grids[i] for i in idx])
    probs = [ZERO] * len(sub.cells)
    for cell, p in zip(dist.space.cells, dist.probs):
        probs[sub.cell_index[tuple(cell[i] for i in idx)]] += p
    return JointDistribution(sub, tuple(probs))


def conditional(
    dist: JointDistribution, given: Mapping[int, Rational]
) -> JointDistribution:
    """Bayes-exact conditional over the members not pinned down by ``given``."""
    if not given:
        raise OutcomeError("conditional needs a nonempty assignment")
    n = dist.space.n
    fixed: dict[int, Fraction] = {}
    for i, v in given.items():
        if not 1 <= i <= n:
            raise OutcomeError(f"member {i} out of range 1..{n}")
        val = as_fraction(v)
        if val not in dist.space.grids[i - 1]:
            raise OutcomeError(f"value {val} is off member {i}'s grid")
        fixed[i - 1] = val
    rest = [i for i in range(n) if i not in fixed]
    if not rest:
        raise OutcomeError("conditional must leave at least one member free")
    sub = make_space([dist.space.grids[i] for i in rest])
    probs = [ZERO] * len(sub.cells)
    total = ZERO
    for cell, p in zip(dist.space.cells, dist.probs):
        if all(cell[i] == v for i, v in fixed.items()):
            probs[sub.cell_index[tuple(cell[i] for i in rest)]] += p
            total += p
    if total == 0:
        raise OffPathPosterior("conditioning event has zero probability")
    return JointDistribution(sub, tuple(p / total for p in probs))


# ---------------------------------------------------------------------------
# Stochastic orders
# ---------------------------------------------------------------------------


def _check_same_space(f: JointDistribution, g: JointDistribution) -> None:
    if f.space != g.space:
        raise OutcomeError("distributions live on different outcome spaces")


def _upper_masks_small(space: OutcomeSpace) -> list[int]:
    """All upper-set bitmasks; only for spaces with few cells."""
    cells = space.cells
    m = len(cells)
    ups = []
    up_of = []
    for i, c in enumerate(cells):
        mask = 0
        for j, d in enumerate(cells):
            if all(dv >= cv for cv, dv in zip(c, d)):
                mask |= 1 << j
        up_of.append(mask)
    for s in range(1 << m):
        ok = True
        t = s
        while t:
            j = (t & -t).bit_length() - 1
            if up_of[j] & ~s:
                ok = False
                break
            t &= t - 1
        if ok:
            ups.append(s)
    return ups


def _staircase_masks(space: OutcomeSpace) -> list[int]:
    """Upper sets of a two-member grid, as staircase column thresholds.

    Row r collects the cells where member 1 draws grid value r; an upper set
    keeps the columns from some threshold t(r) on, with t nonincreasing as r
    grows (higher member-1 outcomes admit weakly more columns).
    """
    n1, n2 = len(space.grids[0]), len(space.grids[1])
    masks: list[int] = []

    def build(row: int, min_t: int, acc: int) -> None:
        if row < 0:
            masks.append(acc)
            return
        # rows are filled top-down, so this row's threshold is >= the one above
        for t in range(min_t, n2 + 1):
            add = 0
            for j in range(t, n2):
                add |= 1 << (row * n2 + j)
            build(row - 1, t, acc | add)

    build(n1 - 1, 0, 0)
    return masks


def _upper_masks(space: OutcomeSpace) -> list[int] | None:
    if len(space.cells) <= UPPER_SET_ENUM_CELL_CAP:
        return _upper_masks_small(space)
    if space.n == 2:
        return _staircase_masks(space)
    return None


def _scaled_masses(f: JointDistribution, g: JointDistribution) -> tuple[list[int], list[int]]:
    denom = lcm(*(p.denominator for p in f.probs + g.probs))
    return (
        [int(p * denom) for p in f.probs],
        [int(p * denom) for p in g.probs],
    )


def _cover_edges(space: OutcomeSpace) -> list[list[int]]:
    """Immediate successors of each cell (one grid step up in one member)."""
    cells = space.cells
    idx = space.cell_index
    grids = space.grids
    succ: list[list[int]] = [[] for _ in cells]
    for i, c in enumerate(cells):
        for m, g in enumerate(grids):
            pos = g.index(c[m])
            if pos + 1 < len(g):
                up = list(c)
                up[m] = g[pos + 1]
                succ[i].append(idx[tuple(up)])
    return succ


def fosd_dominates(f: JointDistribution, g: JointDistribution, strict: bool = False) -> bool:
    """Multivariate first-order stochastic dominance of f over g.

    Weak: f assigns at least as much mass as g to every upper set of the
    product order. With ``strict`` set, additionally requires the two pmfs to
    differ (equivalently, some upper set gets strictly more mass).
    """
    _check_same_space(f, g)
    masks = _upper_masks(f.space)
    if masks is not None:
        for s in masks:
            pf = pg = ZERO
            t = s
            while t:
                j = (t & -t).bit_length() - 1
                pf += f.probs[j]
                pg += g.probs[j]
                t &= t - 1
            if pf < pg:
                return False
        weak = True
    else:
        fm, gm = _scaled_masses(f, g)
        cells = f.space.cells
        arcs = [
            (yi, xi)
            for yi, y in enumerate(cells)
            for xi, x in enumerate(cells)
            if all(xv >= yv for xv, yv in zip(x, y))
        ]
        weak = coupling_feasible(gm, fm, arcs)
    if not weak:
        return False
    if strict:
        return f.probs != g.probs
    return True


def fosd_dominates_everywhere(f: JointDistribution, g: JointDistribution) -> bool:
    """Strict dominance on every nonempty proper upper set.

    Stronger than ``fosd_dominates(..., strict=True)``: the mass gap must be
    strictly positive for each upper set other than the whole space and the
    empty set.
    """
    _check_same_space(f, g)
    masks = _upper_masks(f.space)
    full = (1 << len(f.space.cells)) - 1
    if masks is not None:
        for s in masks:
            if s == 0 or s == full:
                continue
            gap = ZERO
            t = s
            while t:
                j = (t & -t).bit_length() - 1
                gap += f.probs[j] - g.probs[j]
                t &= t - 1
            if gap <= 0:
                return False
        return True
    fm, gm = _scaled_masses(f, g)
    delta = [a - b for a, b in zip(fm, gm)]
    cells = f.space.cells
    top = cells.index(f.space.max_vector)
    bottom = cells.index(f.space.min_vector)
    best = min_upper_set_sum(delta, _cover_edges(f.space), top, bottom)
    return best > 0


def more_correlated(f_prime: JointDistribution, f: JointDistribution) -> bool:
    """Pairwise-conditional correlation order for binary spaces with equal marginals."""
    _check_same_space(f_prime, f)
    space = f.space
    if not space.is_binary():
        raise OutcomeError("the correlation order is defined for binary outcomes only")
    for i in range(1, space.n + 1):
        if marginal(f_prime, [i]).probs != marginal(f, [i]).probs:
            raise OutcomeError("the correlation order requires equal marginals")
    for i in range(1, space.n + 1):
        for j in range(1, space.n + 1):
            if i == j:
                continue
            lo_j, hi_j = space.grids[j - 1][0], space.grids[j - 1][1]
            lo_i, hi_i = space.grids[i - 1][0], space.grids[i - 1][1]
            for val_j, val_i in ((lo_j, lo_i), (hi_j, hi_i)):
                cp = conditional(f_prime, {j: val_j})
                c = conditional(f, {j: val_j})
                pos = i if i < j else i - 1  # member i's index inside the conditional
                if marginal(cp, [pos]).prob([val_i]) < marginal(c, [pos]).prob([val_i]):
                    return False
    return True


def mix(f: JointDistribution, g: JointDistribution, eps: Rational) -> JointDistribution:
    """Cellwise convex combination (1-eps) f + eps g; result must keep full support."""
    _check_same_space(f, g)
    e = as_fraction(eps)
    if not ZERO <= e <= ONE:
        raise OutcomeError(f"mixing weight {e} outside [0,1]")
    probs = tuple((ONE - e) * pf + e * pg for pf, pg in zip(f.probs, g.probs))
    out = JointDistribution(f.space, probs)
    if not out.full_support:
        raise OutcomeError("mixture loses full support")
    return out


def posterior_no_disclosure(dist: JointDistribution, rule) -> tuple[Fraction, ...]:
    """Componentwise mean outcome conditional on the team concealing.

    ``rule`` is a disclosure probability per cell (a TeamRule or any aligned
    sequence of values in [0,1]). Raises OffPathPosterior when concealment has
    zero probability.
    """
    values = getattr(rule, "values", rule)
    if len(values) != len(dist.space.cells):
        raise OutcomeError("rule length does not match the cell count")
    nd = ZERO
    sums = [ZERO] * dist.space.n
    for cell, p, d in zip(dist.space.cells, dist.probs, values):
        d = as_fraction(d)
        if not ZERO <= d <= ONE:
            raise OutcomeError(f"disclosure probability {d} outside [0,1]")
        w = (ONE - d) * p
        if w == 0:
            continue
        nd += w
        for i, v in enumerate(cell):
            sums[i] += v * w
    if nd == 0:
        raise OffPathPosterior("off-path posterior undefined: concealment never happens")
    return tuple(s / nd for s in sums)
