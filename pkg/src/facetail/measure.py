"""Atomic exponent measures on the punctured orthant.

The central object is a finite collection of spectral atoms: rays
``r * omega`` with ``r > 0``, each carrying mass ``h`` spread along the ray
with radial density ``r**-2``.  Summed over atoms this defines a measure on
``[0, inf)^d \\ {0}`` that is homogeneous of order -1 and induces a
multivariate max-stable distribution ``P(X <= x) = exp(-tail_mass(x))``.

Coordinates are 0-based throughout the Python API.  Serialization helpers
(`measure_to_dict`, `load_measure`) speak the JSON schema
``{"d": int, "atoms": [{"omega": [...], "mass": ...}]}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

#: entries of omega with absolute value at or below this are snapped to 0.0
#: at construction, so face membership is an exact zero test afterwards.
ZERO_TOL = 1e-12

#: two atoms are the same ray when their faces agree and their sup-norm
#: normalized directions differ by at most this, componentwise.
RAY_TOL = 1e-9


class MeasureFormatError(ValueError):
    """Raised when serialized measure data does not match the schema."""


class InvalidMeasureError(ValueError):
    """Raised when a structurally parseable measure fails validation."""

    def __init__(self, violations: "list[Violation]"):
        self.violations = list(violations)
        summary = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid measure: {summary}")


@dataclass(frozen=True, eq=False)
class SpectralAtom:
    """One ray of an atomic exponent measure.

    Parameters
    ----------
    omega : array_like
        Nonnegative direction vector of length d.  Entries with absolute
        value at or below ``ZERO_TOL`` are snapped to exact zeros.
    mass : float
        Total mass carried by the ray.

    The direction is stored as given (no normalization): every operation in
    this package depends only on the products ``mass * omega``, so the
    parameterization ``(c * omega, mass / c)`` describes the same measure.
    """

    omega: np.ndarray
    mass: float

    def __post_init__(self):
        om = np.array(self.omega, dtype=float).reshape(-1)
        with np.errstate(invalid="ignore"):
            om[np.abs(om) <= ZERO_TOL] = 0.0
        om.flags.writeable = False
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "mass", float(self.mass))

    @cached_property
    def face(self) -> frozenset[int]:
        """Indices of the strictly positive coordinates of ``omega``."""
        return frozenset(int(i) for i in np.nonzero(self.omega > 0.0)[0])

    def __repr__(self) -> str:  # compact, round-trippable enough for debugging
        return f"SpectralAtom(omega={self.omega.tolist()}, mass={self.mass})"


@dataclass(frozen=True, eq=False)
class ExponentMeasure:
    """Finite atomic exponent measure in dimension ``d``.

    Construction canonicalizes the atom list: directions are zero-snapped
    (see `SpectralAtom`) and atoms lying on the same ray are merged by
    adding masses, keeping the first occurrence's direction.  Equality of
    measures is therefore best tested with `measures_allclose`; the class
    itself uses identity semantics.
    """

    d: int
    atoms: tuple[SpectralAtom, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "atoms", _merge_rays(self.atoms))

    # ---- cached dense views ------------------------------------------------

    @cached_property
    def omega_matrix(self) -> np.ndarray:
        """Read-only (n_atoms, d) stack of directions; rows ragged in length
        raise, so only shape-consistent measures get a dense view."""
        if not self.atoms:
            out = np.zeros((0, self.d))
        else:
            out = np.vstack([a.omega for a in self.atoms])
        out.flags.writeable = False
        return out

    @cached_property
    def mass_vector(self) -> np.ndarray:
        out = np.array([a.mass for a in self.atoms], dtype=float)
        out.flags.writeable = False
        return out

    @cached_property
    def faces(self) -> tuple[frozenset[int], ...]:
        return tuple(a.face for a in self.atoms)

    @cached_property
    def face_masks(self) -> tuple[int, ...]:
        """Faces as bit masks (bit i set iff coordinate i is positive)."""
        return tuple(sum(1 << i for i in f) for f in self.faces)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        return f"ExponentMeasure(d={self.d}, atoms={list(self.atoms)!r})"


def _merge_rays(atoms: Iterable[SpectralAtom]) -> tuple[SpectralAtom, ...]:
    # first-occurrence order; the kept atom absorbs the other's intensity
    # contribution mass * omega, so its mass grows by the direction ratio
    kept: list[SpectralAtom] = []
    for atom in atoms:
        if not isinstance(atom, SpectralAtom):
            raise TypeError(f"expected SpectralAtom, got {type(atom).__name__}")
        merged = False
        if atom.face:
            peak = float(np.max(atom.omega))
            for idx, other in enumerate(kept):
                if other.face != atom.face or other.omega.shape != atom.omega.shape:
                    continue
                other_peak = float(np.max(other.omega))
                if np.max(np.abs(atom.omega / peak - other.omega / other_peak)) <= RAY_TOL:
                    scale = peak / other_peak
                    kept[idx] = SpectralAtom(other.omega, other.mass + atom.mass * scale)
                    merged = True
                    break
        if not merged:
            kept.append(atom)
    return tuple(kept)


# ---- validation ------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by `validate_measure`.

    ``code`` is machine readable; ``atom`` and ``coordinate`` locate the
    offender where that makes sense (0-based).
    """

    code: str
    atom: int | None = None
    coordinate: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        where = []
        if self.atom is not None:
            where.append(f"atom {self.atom}")
        if self.coordinate is not None:
            where.append(f"coordinate {self.coordinate}")
        loc = " at " + ", ".join(where) if where else ""
        msg = f"{self.code}{loc}"
        return f"{msg} ({self.detail})" if self.detail else msg


def validate_measure(measure: ExponentMeasure) -> list[Violation]:
    """Collect every invariant violation of ``measure``.

    Checks, in order: the dimension is a positive integer, every atom's
    direction has length d with nonnegative finite entries, every mass is
    strictly positive and finite, no direction is identically zero, and
    every coordinate is charged by at least one atom.  An empty list means
    the measure is valid.
    """
    out: list[Violation] = []
    if measure.d < 1:
        out.append(Violation("invalid_dimension", detail=f"d={measure.d}"))
        return out
    charged = np.zeros(measure.d, dtype=bool)
    for j, atom in enumerate(measure.atoms):
        om = atom.omega
        if om.shape != (measure.d,):
            out.append(Violation("dimension_mismatch", atom=j,
                                 detail=f"omega has length {om.shape[0]}, expected {measure.d}"))
            continue
        if not np.all(np.isfinite(om)):
            out.append(Violation("nonfinite_direction", atom=j))
            continue
        if np.any(om < 0.0):
            coord = int(np.nonzero(om < 0.0)[0][0])
            out.append(Violation("negative_direction", atom=j, coordinate=coord))
            continue
        if not math.isfinite(atom.mass) or atom.mass <= 0.0:
            out.append(Violation("nonpositive_mass", atom=j, detail=f"mass={atom.mass}"))
        if not atom.face:
            out.append(Violation("all_zero_direction", atom=j))
        else:
            charged |= om > 0.0
    for i in np.nonzero(~charged)[0]:
        out.append(Violation("dead_coordinate", coordinate=int(i),
                             detail="no atom charges this coordinate"))
    return out


def require_valid(measure: ExponentMeasure) -> ExponentMeasure:
    """Return ``measure`` unchanged, raising `InvalidMeasureError` if invalid."""
    violations = validate_measure(measure)
    if violations:
        raise InvalidMeasureError(violations)
    return measure


# ---- evaluation ------------------------------------------------------------


def exponent_function(measure: ExponentMeasure, x) -> float:
    """Tail mass of the complement of the box [0, x], for x > 0.

    For an atomic measure this is ``sum_j mass_j * max_i(omega_ji / x_i)``,
    the exponent of the induced max-stable distribution at x.  Homogeneous
    of order -1: scaling x by t divides the value by t.
    """
    x = _check_positive_point(measure, x)
    if not measure.atoms:
        return 0.0
    return float(np.max(measure.omega_matrix / x, axis=1) @ measure.mass_vector)


def exponent_function_grid(measure: ExponentMeasure, points: np.ndarray) -> np.ndarray:
    """Vectorized `exponent_function` over rows of a strictly positive (N, d) array."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != measure.d:
        raise ValueError(f"expected (N, {measure.d}) grid, got shape {pts.shape}")
    if not np.all(pts > 0.0):
        raise ValueError("grid points must be strictly positive")
    if not measure.atoms:
        return np.zeros(len(pts))
    # (N, J, d) broadcast; grids here are small (a few thousand points)
    ratios = measure.omega_matrix[None, :, :] / pts[:, None, :]
    return ratios.max(axis=2) @ measure.mass_vector


def exponent_function_extended(measure: ExponentMeasure, x) -> float:
    """`exponent_function` extended to x >= 0.

    A zero coordinate that some atom charges pushes the value to +inf
    (the corresponding box has probability zero).  Zero coordinates that
    no atom charges are neutral.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (measure.d,):
        raise ValueError(f"expected point of length {measure.d}, got {x.shape[0]}")
    if np.any(x < 0.0) or np.any(np.isnan(x)):
        raise ValueError("point must be componentwise >= 0")
    zero = x == 0.0
    if not np.any(zero):
        return exponent_function(measure, x)
    total = 0.0
    for atom in measure.atoms:
        if np.any(atom.omega[zero] > 0.0):
            return math.inf
        live = ~zero
        if np.any(live):
            total += atom.mass * float(np.max(atom.omega[live] / x[live], initial=0.0))
    return total


def distribution_function(measure: ExponentMeasure, x) -> float:
    """P(X <= x) = exp(-exponent) of the induced max-stable law, for x >= 0."""
    return math.exp(-exponent_function_extended(measure, x))


def rectangle_mass(measure: ExponentMeasure, x) -> float:
    """Mass of the closed upper rectangle [x, inf) for strictly positive x.

    An atom's ray meets the rectangle where ``r * omega >= x`` holds in every
    coordinate, which needs the full face and gives radial mass
    ``min_i(omega_ji / x_i)``.
    """
    x = _check_positive_point(measure, x)
    if not measure.atoms:
        return 0.0
    return float(np.min(measure.omega_matrix / x, axis=1) @ measure.mass_vector)


def _check_positive_point(measure: ExponentMeasure, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (measure.d,):
        raise ValueError(f"expected point of length {measure.d}, got {x.shape[0]}")
    if not np.all(x > 0.0):
        raise ValueError("point must be componentwise > 0")
    return x


# ---- structural operations -------------------------------------------------


def margins(measure: ExponentMeasure) -> np.ndarray:
    """Per-coordinate marginal masses ``m_i = sum_j mass_j * omega_ji``.

    Coordinate i of the induced max-stable vector is Frechet with scale
    ``m_i``; the measure is standardized when every ``m_i`` equals 1.
    """
    if not measure.atoms:
        return np.zeros(measure.d)
    return measure.mass_vector @ measure.omega_matrix


def marginalize(measure: ExponentMeasure, coords: Iterable[int]) -> ExponentMeasure:
    """Project the measure onto a nonempty subset of coordinates.

    Directions are restricted to ``coords`` (ascending order), masses kept,
    and atoms whose restriction is identically zero are dropped.  Note the
    projection of the domain is taken within the punctured orthant of the
    kept coordinates, hence the dropped atoms.
    """
    idx = sorted(set(int(i) for i in coords))
    if not idx:
        raise ValueError("cannot marginalize to an empty coordinate set")
    if idx[0] < 0 or idx[-1] >= measure.d:
        raise ValueError(f"coordinates out of range for d={measure.d}")
    sel = np.array(idx, dtype=int)
    atoms = []
    for atom in measure.atoms:
        om = atom.omega[sel]
        if np.any(om > 0.0):
            atoms.append(SpectralAtom(om, atom.mass))
    return ExponentMeasure(len(idx), tuple(atoms))


def standardize(measure: ExponentMeasure) -> ExponentMeasure:
    """Rescale coordinates so every marginal mass equals 1.

    Each direction entry is divided by its coordinate's marginal mass;
    masses are untouched, faces are preserved.  Requires a valid measure
    (in particular no dead coordinate, so every ``m_i`` is positive).
    """
    m = margins(measure)
    if np.any(~np.isfinite(m)) or np.any(m <= 0.0):
        raise ValueError("standardize needs strictly positive marginal masses")
    atoms = tuple(SpectralAtom(a.omega / m, a.mass) for a in measure.atoms)
    return ExponentMeasure(measure.d, atoms)


def is_standardized(measure: ExponentMeasure, tol: float = 1e-9) -> bool:
    """True when every marginal mass is within ``tol`` of 1."""
    m = margins(measure)
    return bool(m.size == measure.d and np.all(np.abs(m - 1.0) <= tol))


# ---- random generation -----------------------------------------------------

_COVERAGE_RETRIES = 10_000


def random_measure(
    d: int,
    n_atoms: int,
    split: "tuple[Iterable[int], Iterable[int]] | None" = None,
    seed: int | None = None,
) -> ExponentMeasure:
    """Draw a random valid standardized measure with ``n_atoms`` atoms.

    Faces are drawn uniformly among nonempty subsets of ``range(d)``;
    when ``split = (A, C)`` is given they are drawn uniformly among nonempty
    subsets of A or of C, so the result is block structured by construction.
    Positive direction entries are uniform on (0, 1], masses uniform on
    [0.25, 4], and the result is standardized.  The face multiset is redrawn
    until every coordinate is charged.

    Deterministic for a fixed ``seed``.
    """
    if d < 2:
        raise ValueError("random_measure needs d >= 2")
    if n_atoms < d:
        raise ValueError("need n_atoms >= d so every coordinate can be charged")
    rng = np.random.default_rng(seed)
    if split is not None:
        part_a = sorted(set(int(i) for i in split[0]))
        part_c = sorted(set(int(i) for i in split[1]))
        if not part_a or not part_c or set(part_a) & set(part_c) \
                or set(part_a) | set(part_c) != set(range(d)):
            raise ValueError("split must be a bipartition of range(d)")
        pools = [part_a, part_c]
    else:
        pools = [list(range(d))]

    for _ in range(_COVERAGE_RETRIES):
        faces = [_random_face(rng, pools) for _ in range(n_atoms)]
        if set().union(*faces) == set(range(d)):
            break
    else:
        raise ValueError("could not cover every coordinate; constraints unsatisfiable?")

    atoms = []
    for face in faces:
        om = np.zeros(d)
        om[sorted(face)] = 1.0 - rng.uniform(size=len(face))  # (0, 1]
        atoms.append(SpectralAtom(om, rng.uniform(0.25, 4.0)))
    return standardize(ExponentMeasure(d, tuple(atoms)))


def _random_face(rng: np.random.Generator, pools: Sequence[Sequence[int]]) -> frozenset[int]:
    # uniform over nonempty subsets of a pool, pools weighted by subset count
    counts = np.array([2 ** len(p) - 1 for p in pools], dtype=float)
    pool = pools[rng.choice(len(pools), p=counts / counts.sum())] if len(pools) > 1 else pools[0]
    while True:
        mask = rng.uniform(size=len(pool)) < 0.5
        if np.any(mask):
            return frozenset(p for p, keep in zip(pool, mask) if keep)


# ---- serialization ---------------------------------------------------------


def measure_to_dict(measure: ExponentMeasure) -> dict:
    return {
        "d": measure.d,
        "atoms": [{"omega": a.omega.tolist(), "mass": a.mass} for a in measure.atoms],
    }


def measure_from_dict(data: dict) -> ExponentMeasure:
    """Build a measure from the JSON schema, strictly.

    Rejects missing or extra structure, non-numeric entries, NaN or
    infinite values, and negative values.  The result is canonicalized but
    not validated; run `validate_measure` or use `load_measure` for that.
    """
    if not isinstance(data, dict):
        raise MeasureFormatError("top level must be an object")
    if set(data.keys()) != {"d", "atoms"}:
        raise MeasureFormatError('top level must have exactly the keys "d" and "atoms"')
    d = data["d"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise MeasureFormatError('"d" must be a positive integer')
    raw_atoms = data["atoms"]
    if not isinstance(raw_atoms, list):
        raise MeasureFormatError('"atoms" must be a list')
    atoms = []
    for j, entry in enumerate(raw_atoms):
        if not isinstance(entry, dict) or set(entry.keys()) != {"omega", "mass"}:
            raise MeasureFormatError(f'atom {j} must be an object with keys "omega" and "mass"')
        omega = entry["omega"]
        if not isinstance(omega, list) or len(omega) != d:
            raise MeasureFormatError(f'atom {j}: "omega" must be a list of length {d}')
        for i, v in enumerate(omega):
            _check_json_number(v, f'atom {j}, omega[{i}]')
        _check_json_number(entry["mass"], f'atom {j}, mass')
        atoms.append(SpectralAtom(np.array(omega, dtype=float), float(entry["mass"])))
    return ExponentMeasure(d, tuple(atoms))


def _check_json_number(v, where: str) -> None:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MeasureFormatError(f"{where}: not a number")
    v = float(v)
    if math.isnan(v) or math.isinf(v):
        raise MeasureFormatError(f"{where}: NaN and infinities are not allowed")
    if v < 0.0:
        raise MeasureFormatError(f"{where}: negative values are not allowed")


def load_measure(path) -> ExponentMeasure:
    """Read, parse, and validate a measure JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MeasureFormatError(f"not valid JSON: {exc}") from exc
    return require_valid(measure_from_dict(data))


def save_measure(measure: ExponentMeasure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(measure_to_dict(measure), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---- comparison ------------------------------------------------------------


def measures_allclose(a: ExponentMeasure, b: ExponentMeasure,
                      rtol: float = 1e-9, atol: float = 1e-12) -> bool:
    """Equality up to floating tolerance: same d, same atoms in order."""
    if a.d != b.d or a.n_atoms != b.n_atoms:
        return False
    for atom_a, atom_b in zip(a.atoms, b.atoms):
        if atom_a.omega.shape != atom_b.omega.shape:
            return False
        if not np.allclose(atom_a.omega, atom_b.omega, rtol=rtol, atol=atol):
            return False
        if not math.isclose(atom_a.mass, atom_b.mass, rel_tol=rtol, abs_tol=atol):
            return False
    return True
