"""Extremal independence of a coordinate bipartition.

For an atomic exponent measure and a split (A, C) of the coordinates,
four equivalent formulations of independence are implemented side by side:

* support: no atom's face straddles both blocks;
* additivity: the tail exponent splits as a sum of block exponents;
* mixed margins: marginals onto subsets meeting both blocks put no mass
  on the all-positive part of their domain;
* distribution function: the induced max-stable df factorizes over blocks.

A fifth check, factorization of every conditional tail law, lives in
`facetail.conditional` and is folded into `full_report`.  The checks are
computed independently and never reconciled: a disagreement is reported
as data, since for exact atomic input it can only mean an implementation
bug.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from .conditional import conditional_factorization
from .measure import (
    ExponentMeasure,
    exponent_function_extended,
    exponent_function_grid,
    marginalize,
)
from .partition import Bipartition, check_dimension

#: relative tolerance for all additivity and factorization comparisons
ADDITIVITY_TOL = 1e-9

#: beyond this dimension, subset enumeration falls back to pairs
ENUM_CAP = 16

_GRID_AXIS = (0.5, 1.0, 2.0, 5.0)
_GRID_CAP = 4096
_GRID_RANDOM = 64
_GRID_SEED = 0


@lru_cache(maxsize=32)
def default_grid(d: int) -> np.ndarray:
    """Evaluation grid for numeric checks in dimension d.

    The tensor grid over ``{0.5, 1, 2, 5}`` per coordinate, truncated to
    4096 points, plus 64 reproducible uniform points in ``(0.1, 10)^d``.
    Deterministic in d, returned read-only.
    """
    if d < 1:
        raise ValueError("grid needs d >= 1")
    tensor = np.array(list(itertools.islice(
        itertools.product(_GRID_AXIS, repeat=d), _GRID_CAP)))
    rng = np.random.default_rng(_GRID_SEED)
    random_part = rng.uniform(0.1, 10.0, size=(_GRID_RANDOM, d))
    grid = np.vstack([tensor, random_part])
    grid.flags.writeable = False
    return grid


# ---- the individual criteria ----------------------------------------------


def check_support(measure: ExponentMeasure, part: Bipartition) -> tuple[bool, int | None]:
    """Does every atom's face lie within a single block?

    Returns ``(ok, witness)`` where the witness is the index of the first
    atom whose face meets both blocks, or None.
    """
    check_dimension(part, measure.d)
    for j, fmask in enumerate(measure.face_masks):
        if fmask & part.a_mask and fmask & part.c_mask:
            return False, j
    return True, None


@dataclass(frozen=True)
class AdditivityCheck:
    """Result of the numeric tail-exponent additivity check.

    ``numeric_ok`` is the grid verdict at the stated relative tolerance;
    ``structural_ok`` restates the exact support criterion, which for
    atomic measures additivity is equivalent to.  The two must agree; a
    mismatch is left visible rather than repaired.
    """

    numeric_ok: bool
    structural_ok: bool
    max_residual: float
    witness: np.ndarray | None = field(repr=False, default=None)
    tol: float = ADDITIVITY_TOL

    @property
    def ok(self) -> bool:
        return self.numeric_ok

    @property
    def consistent(self) -> bool:
        return self.numeric_ok == self.structural_ok


def check_additivity(
    measure: ExponentMeasure,
    part: Bipartition,
    grid: np.ndarray | None = None,
    tol: float = ADDITIVITY_TOL,
) -> AdditivityCheck:
    """Check ``exponent(x) == exponent_A(x_A) + exponent_C(x_C)`` on a grid.

    The residual is measured relative to ``1 + exponent(x)`` pointwise.
    ``grid`` defaults to `default_grid`; rows must be strictly positive.
    """
    check_dimension(part, measure.d)
    grid = default_grid(measure.d) if grid is None else np.asarray(grid, dtype=float)
    lam, lam_sum = _split_exponents(measure, part, grid)
    residuals = np.abs(lam - lam_sum) / (1.0 + np.abs(lam))
    worst = int(np.argmax(residuals)) if residuals.size else 0
    numeric_ok = bool(residuals.size == 0 or residuals[worst] <= tol)
    structural_ok = check_support(measure, part)[0]
    return AdditivityCheck(
        numeric_ok=numeric_ok,
        structural_ok=structural_ok,
        max_residual=float(residuals[worst]) if residuals.size else 0.0,
        witness=None if numeric_ok else grid[worst].copy(),
        tol=tol,
    )


def _split_exponents(measure, part, grid):
    # one pass shared by the additivity and df checks
    lam = exponent_function_grid(measure, grid)
    lam_a = _restricted_exponents(measure, part.a_sorted, grid)
    lam_c = _restricted_exponents(measure, part.c_sorted, grid)
    return lam, lam_a + lam_c


def _restricted_exponents(measure, coords, grid):
    sub = marginalize(measure, coords)
    return exponent_function_grid(sub, grid[:, list(coords)])


def check_df_factorization(
    measure: ExponentMeasure,
    part: Bipartition,
    grid: np.ndarray | None = None,
    tol: float = ADDITIVITY_TOL,
) -> tuple[bool, np.ndarray | None]:
    """Check that the induced df factorizes: F(x) = F_A(x_A) * F_C(x_C).

    Unlike `check_additivity` this accepts grid points with zero
    coordinates; a zero coordinate that carries mass sends the exponent to
    +inf and the df to exact 0 on both sides.  Returns ``(ok, witness)``.
    """
    check_dimension(part, measure.d)
    grid = default_grid(measure.d) if grid is None else np.asarray(grid, dtype=float)
    if np.all(grid > 0.0):
        lam, lam_sum = _split_exponents(measure, part, grid)
        diffs = np.abs(np.exp(-lam) - np.exp(-lam_sum)) / (1.0 + np.exp(-lam))
    else:
        diffs = np.array([_df_difference(measure, part, x) for x in grid])
    worst = int(np.argmax(diffs)) if diffs.size else 0
    ok = bool(diffs.size == 0 or diffs[worst] <= tol)
    return ok, (None if ok else grid[worst].copy())


def _df_difference(measure, part, x):
    import math

    x = np.asarray(x, dtype=float)
    lam = exponent_function_extended(measure, x)
    lam_a = exponent_function_extended(
        marginalize(measure, part.a_sorted), x[list(part.a_sorted)])
    lam_c = exponent_function_extended(
        marginalize(measure, part.c_sorted), x[list(part.c_sorted)])
    full = math.exp(-lam)
    split = math.exp(-lam_a) * math.exp(-lam_c)
    return abs(full - split) / (1.0 + full)


def check_mixed_margins(
    measure: ExponentMeasure,
    part: Bipartition,
    enum_cap: int = ENUM_CAP,
) -> tuple[bool, frozenset[int] | None, str]:
    """Do marginals onto block-straddling subsets avoid the interior?

    A subset I meeting both blocks violates the criterion when some atom's
    face contains all of I, because the I-marginal then charges the
    all-positive region of its domain.  Returns ``(ok, witness, mode)``
    with the witness the smallest violating subset in (size, lex) order.
    ``mode`` is "full" for d <= enum_cap, else "pairwise", where only
    two-element subsets are enumerated; the verdicts coincide since any
    violating subset contains a violating pair.
    """
    check_dimension(part, measure.d)
    d = measure.d
    masks = measure.face_masks
    mode = "full" if d <= enum_cap else "pairwise"
    sizes = range(2, d + 1) if mode == "full" else (2,)
    for size in sizes:
        for combo in itertools.combinations(range(d), size):
            imask = sum(1 << i for i in combo)
            if not (imask & part.a_mask and imask & part.c_mask):
                continue
            if any(fmask & imask == imask for fmask in masks):
                return False, frozenset(combo), mode
    return True, None, mode


# ---- proof-device region masses -------------------------------------------


def joint_exceedance_mass(measure: ExponentMeasure, part: Bipartition, x) -> float:
    """Mass of the region where both blocks are exceeded simultaneously.

    The region collects points with ``z_a > x_a`` for some a in A and
    ``z_c > x_c`` for some c in C.  On a ray it is a radial tail, giving
    ``sum_j mass_j * min(max_A omega_ja/x_a, max_C omega_jc/x_c)``.  The
    value is also the additivity defect ``exponent_A + exponent_C -
    exponent``, which makes it the exact certificate behind the numeric
    additivity check.
    """
    check_dimension(part, measure.d)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (measure.d,) or not np.all(x > 0.0):
        raise ValueError("need a strictly positive point of length d")
    if not measure.atoms:
        return 0.0
    ratios = measure.omega_matrix / x
    max_a = ratios[:, list(part.a_sorted)].max(axis=1)
    max_c = ratios[:, list(part.c_sorted)].max(axis=1)
    return float(np.minimum(max_a, max_c) @ measure.mass_vector)


def face_interior_mass(measure: ExponentMeasure, coords: Iterable[int],
                       threshold: float = 1.0) -> float:
    """Marginal mass above ``threshold`` in every coordinate of a subset.

    Marginalizing to ``coords`` and keeping only points that exceed the
    threshold in all kept coordinates leaves the atoms whose face contains
    the whole subset, each contributing ``mass_j * min_i(omega_ji) /
    threshold``.  Nondecreasing as the threshold drops; its divergence (or
    vanishing) as threshold -> 0 is what the mixed-margins criterion
    detects, so this is the finite, testable version of that quantity.
    """
    idx = sorted(set(int(i) for i in coords))
    if not idx:
        raise ValueError("need a nonempty coordinate subset")
    if idx[0] < 0 or idx[-1] >= measure.d:
        raise ValueError(f"coordinates out of range for d={measure.d}")
    if not threshold > 0.0:
        raise ValueError("threshold must be positive")
    imask = sum(1 << i for i in idx)
    total = 0.0
    for atom, fmask in zip(measure.atoms, measure.face_masks):
        if fmask & imask == imask:
            total += atom.mass * float(np.min(atom.omega[idx])) / threshold
    return total


# ---- combined report -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IndependenceReport:
    """All five independence verdicts for one (measure, bipartition) pair.

    ``agree`` is True when the five booleans coincide; ``witnesses`` holds
    one entry per failing check.  Atom indices are 0-based; `to_dict`
    renders coordinates 1-based for the serialized form.
    """

    cond_i: bool
    cond_ii: bool
    cond_iii: bool
    df: bool
    new_notion: bool
    agree: bool
    witnesses: dict

    @property
    def independent(self) -> bool:
        """The headline verdict (meaningful when ``agree`` is True)."""
        return self.cond_i

    def to_dict(self, one_based: bool = True) -> dict:
        shift = 1 if one_based else 0
        witnesses = {}
        for key, value in self.witnesses.items():
            value = dict(value)
            if "subset" in value:
                value["subset"] = [i + shift for i in value["subset"]]
            if "k" in value:
                value["k"] = value["k"] + shift
            witnesses[key] = value
        return {
            "cond_i": self.cond_i,
            "cond_ii": self.cond_ii,
            "cond_iii": self.cond_iii,
            "df": self.df,
            "new_notion": self.new_notion,
            "agree": self.agree,
            "witnesses": witnesses,
        }


def full_report(
    measure: ExponentMeasure,
    part: Bipartition,
    grid: np.ndarray | None = None,
    tol: float = ADDITIVITY_TOL,
    enum_cap: int = ENUM_CAP,
) -> IndependenceReport:
    """Run every independence check and collect the verdicts.

    Never raises on disagreement; the ``agree`` flag and the witnesses
    carry the evidence either way.
    """
    check_dimension(part, measure.d)
    grid = default_grid(measure.d) if grid is None else np.asarray(grid, dtype=float)

    support_ok, support_witness = check_support(measure, part)

    if np.all(grid > 0.0):
        lam, lam_sum = _split_exponents(measure, part, grid)
        add_residuals = np.abs(lam - lam_sum) / (1.0 + np.abs(lam))
        df_diffs = np.abs(np.exp(-lam) - np.exp(-lam_sum)) / (1.0 + np.exp(-lam))
    else:
        add = check_additivity(measure, part, grid[np.all(grid > 0.0, axis=1)], tol)
        add_residuals = np.array([add.max_residual])
        df_diffs = np.array([_df_difference(measure, part, x) for x in grid])
        lam = None

    witnesses: dict = {}
    if not support_ok:
        witnesses["cond_i"] = {"atom": support_witness}

    if add_residuals.size and add_residuals.max() > tol:
        cond_ii = False
        worst = int(np.argmax(add_residuals))
        point = grid[worst] if lam is not None else None
        witnesses["cond_ii"] = {
            "residual": float(add_residuals.max()),
            **({"point": point.tolist()} if point is not None else {}),
        }
    else:
        cond_ii = True

    mixed_ok, mixed_witness, mode = check_mixed_margins(measure, part, enum_cap)
    if not mixed_ok:
        witnesses["cond_iii"] = {"subset": sorted(mixed_witness), "mode": mode}

    if df_diffs.size and df_diffs.max() > tol:
        df_ok = False
        worst = int(np.argmax(df_diffs))
        witnesses["df"] = {
            "difference": float(df_diffs.max()),
            "point": grid[worst].tolist(),
        }
    else:
        df_ok = True

    factorization = conditional_factorization(measure, part)
    if not factorization.holds:
        bad = factorization.witness()
        witnesses["new_notion"] = {"k": bad.k, "atom": bad.witness}

    flags = (support_ok, cond_ii, mixed_ok, df_ok, factorization.holds)
    return IndependenceReport(
        cond_i=support_ok,
        cond_ii=cond_ii,
        cond_iii=mixed_ok,
        df=df_ok,
        new_notion=factorization.holds,
        agree=len(set(flags)) == 1,
        witnesses=witnesses,
    )


# ---- randomized agreement battery -----------------------------------------


@dataclass(frozen=True, eq=False)
class BatteryResult:
    """Aggregate outcome of `agreement_battery`.

    ``disagreements`` lists every (trial, blocks, flags) where the five
    verdicts failed to coincide; ``block_failures`` lists block-structured
    trials whose generating bipartition was not certified independent;
    ``notion_mismatches`` counts instances where the support criterion and
    the conditional-law factorization differed (a subset of
    disagreements, tracked separately because the two notions' equivalence
    is the headline claim).
    """

    d: int
    trials: int
    instances: int
    disagreements: tuple
    block_failures: tuple
    notion_mismatches: int

    @property
    def ok(self) -> bool:
        return not self.disagreements and not self.block_failures

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "trials": self.trials,
            "instances": self.instances,
            "disagreements": [
                {"trial": t, "A": sorted(i + 1 for i in a), "C": sorted(i + 1 for i in c),
                 "flags": flags}
                for (t, a, c, flags) in self.disagreements
            ],
            "block_failures": [
                {"trial": t, "A": sorted(i + 1 for i in a), "C": sorted(i + 1 for i in c)}
                for (t, a, c) in self.block_failures
            ],
            "notion_mismatches": self.notion_mismatches,
            "ok": self.ok,
        }


def agreement_battery(
    d: int,
    n_atoms: int,
    trials: int,
    seed: int,
    block_fraction: float = 0.5,
    bipartition_cap: int = 10,
    enumerate_up_to: int = 4,
) -> BatteryResult:
    """Random-measure battery for the equivalence of all five checks.

    Per trial a random standardized measure is drawn with between d and
    ``n_atoms`` atoms; every other trial is block structured along a random
    bipartition.  All bipartitions are tested for d <= ``enumerate_up_to``,
    otherwise ``bipartition_cap`` random ones (plus, for block trials, the
    generating split).  Deterministic in ``seed``.
    """
    from .measure import random_measure
    from .partition import all_bipartitions, random_bipartition

    if d < 2:
        raise ValueError("battery needs d >= 2")
    if trials < 1:
        raise ValueError("battery needs at least one trial")
    n_atoms = max(n_atoms, d)
    children = np.random.SeedSequence(seed).spawn(trials)

    disagreements = []
    block_failures = []
    notion_mismatches = 0
    instances = 0
    for t in range(trials):
        rng = np.random.default_rng(children[t])
        block = (t % max(1, round(1.0 / block_fraction))) == 0 if block_fraction > 0 else False
        atoms_t = int(rng.integers(d, n_atoms + 1))
        generating = random_bipartition(d, rng) if block else None
        measure = random_measure(d, atoms_t, split=None if generating is None
                                 else (generating.a_sorted, generating.c_sorted), seed=rng)

        if d <= enumerate_up_to:
            parts = list(all_bipartitions(d))
        else:
            parts = [random_bipartition(d, rng) for _ in range(bipartition_cap)]
        if generating is not None and generating not in parts:
            parts.insert(0, generating)

        for part in parts:
            rep = full_report(measure, part)
            instances += 1
            flags = {"cond_i": rep.cond_i, "cond_ii": rep.cond_ii,
                     "cond_iii": rep.cond_iii, "df": rep.df,
                     "new_notion": rep.new_notion}
            if not rep.agree:
                disagreements.append((t, part.a, part.c, flags))
            if rep.cond_i != rep.new_notion:
                notion_mismatches += 1
            if generating is not None and part == generating and not all(flags.values()):
                block_failures.append((t, part.a, part.c))

    return BatteryResult(
        d=d,
        trials=trials,
        instances=instances,
        disagreements=tuple(disagreements),
        block_failures=tuple(block_failures),
        notion_mismatches=notion_mismatches,
    )
