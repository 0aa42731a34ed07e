"""
Atomic exponent measures: construction, faces, validation, serialization
========================================================================

An exponent measure here is a finite list of spectral atoms.  Each atom is
a direction omega in the nonnegative orthant together with a mass, and
spreads its mass along the ray r * omega with radial density r**-2.  The
induced max-stable distribution is P(X <= x) = exp(-tail_mass(x)).
"""

import numpy as np

import facetail as ft

# three atoms on three different faces of the orthant
measure = ft.ExponentMeasure(3, (
    ft.SpectralAtom(np.array([0.6, 0.4, 0.0]), 1.0),   # charges {0, 1}
    ft.SpectralAtom(np.array([0.0, 0.0, 1.0]), 1.0),   # the third axis
    ft.SpectralAtom(np.array([0.2, 0.2, 0.2]), 0.5),   # the interior
))

print("faces: ", [sorted(a.face) for a in measure.atoms])
print("margins:", ft.margins(measure))

# validation catches structural defects: a coordinate no atom charges,
# nonpositive masses, negative or nonfinite direction entries
bad = ft.ExponentMeasure(3, (ft.SpectralAtom(np.array([1.0, 0.5, 0.0]), 1.0),))
for violation in ft.validate_measure(bad):
    print("violation:", violation.code, "coordinate", violation.coordinate)

# standardize rescales directions so every margin is exactly 1; the
# measure describes the same dependence with unit Frechet margins
std = ft.standardize(measure)
print("standardized margins:", ft.margins(std))
print("is_standardized:", ft.is_standardized(std))

# the tail mass is -1-homogeneous: scaling the point by t divides it by t
x = np.array([1.0, 2.0, 1.0])
print("tail mass at x:   ", ft.exponent_function(std, x))
print("tail mass at 2x:  ", ft.exponent_function(std, 2 * x))
print("df at x:          ", ft.distribution_function(std, x))

# marginalization keeps a coordinate subset and drops atoms that vanish
pair = ft.marginalize(std, [0, 1])
print("pair atoms:", pair.n_atoms, "of", std.n_atoms)

# measures round-trip through a small JSON schema
ft.save_measure(std, "/tmp/demo_measure.json")
again = ft.load_measure("/tmp/demo_measure.json")
print("round trip equal:", ft.measures_allclose(std, again))

# atoms on the same ray are merged at construction; the merged mass keeps
# the total intensity contribution mass * omega
merged = ft.ExponentMeasure(2, (
    ft.SpectralAtom(np.array([0.5, 0.5]), 1.0),
    ft.SpectralAtom(np.array([1.0, 1.0]), 1.0),
))
print("merged:", merged.n_atoms, "atom with mass", merged.atoms[0].mass)
