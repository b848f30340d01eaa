"""Tour of the linkage-model (FOS) building blocks.

A family of subsets (FOS) is an ordered list of index masks whose union
covers every gene position.  Mixing walks the masks in listed order, so the
order is part of the model.
"""

import numpy as np

from omlab.fos import (
    Permutation,
    concat_fos,
    format_fos_text,
    make_homogeneous_fos,
    parse_fos_text,
    validate_fos,
)

# A homogeneous model chops the chromosome into disjoint width-k masks.
fos = make_homogeneous_fos(12, 4)
print("homogeneous, ell=12 k=4:")
for mask in fos:
    print("  ", mask.indices)

# A permutation shuffles which positions land in which mask.  This is how
# "problem structure known up to a relabeling" is expressed.
perm = Permutation(np.random.default_rng(0).permutation(12))
shuffled = make_homogeneous_fos(12, 4, perm)
print("same widths through a random permutation:")
for mask in shuffled:
    print("  ", mask.indices)

# Two-layer model: wide masks first, then every single bit.
two_layer = concat_fos([make_homogeneous_fos(12, 4), make_homogeneous_fos(12, 1)])
print(f"two-layer model holds {len(two_layer)} masks")

# The text format is 1-based, one mask per line, '#' comments allowed.
text = format_fos_text(two_layer)
print("serialized form (first three lines):")
print("\n".join(text.splitlines()[:3]))
assert parse_fos_text(text, 12) == two_layer

# Validation reports uncovered or out-of-range positions.
report = validate_fos(fos)
print("validation:", "ok" if report.ok else report.message())
