"""Family-of-subsets (FOS) linkage models and mask-level fragment operations.

A mask is a set of gene positions that are exchanged atomically during
mixing; a FOS is an ordered list of masks whose union covers every gene
position.  Mask identity is set-like (indices are stored sorted), while the
FOS itself is list-like: mask order is significant and duplicates are
allowed.

Indices are 0-based everywhere inside the library.  All file and CLI I/O is
1-based; the conversion happens only in :func:`parse_fos_text` /
:func:`format_fos_text`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Mask",
    "Fos",
    "Permutation",
    "FosValidation",
    "make_homogeneous_fos",
    "concat_fos",
    "validate_fos",
    "copy_fragment",
    "parse_fos_text",
    "format_fos_text",
    "resolve_fos",
]


@dataclass(frozen=True)
class Mask:
    """An immutable set of distinct gene positions, stored sorted ascending."""

    indices: tuple[int, ...]

    def __init__(self, indices: Iterable[int]):
        idx = tuple(sorted(int(i) for i in indices))
        if len(idx) == 0:
            raise ValueError("a mask must contain at least one index")
        if len(set(idx)) != len(idx):
            raise ValueError(f"mask indices must be distinct, got {idx}")
        if idx[0] < 0:
            raise ValueError(f"mask indices must be non-negative, got {idx}")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)


@dataclass(frozen=True)
class Fos:
    """Ordered list of masks over chromosome length ``ell``.

    The constructor only checks types and index ranges; coverage of the full
    index set is checked by :func:`validate_fos` so that invalid models can
    still be represented and reported on.
    """

    masks: tuple[Mask, ...]
    ell: int

    def __init__(self, masks: Iterable[Mask], ell: int):
        masks = tuple(masks)
        if ell < 1:
            raise ValueError(f"chromosome length must be >= 1, got {ell}")
        if not masks:
            raise ValueError("a FOS must contain at least one mask")
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "ell", int(ell))

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[Mask]:
        return iter(self.masks)

    def mask_sizes(self) -> list[int]:
        return [len(m) for m in self.masks]


@dataclass(frozen=True)
class Permutation:
    """A bijection on {0, ..., ell-1}, given as the image sequence."""

    mapping: tuple[int, ...]

    def __init__(self, mapping: Sequence[int]):
        mapping = tuple(int(i) for i in mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ValueError("mapping is not a bijection on {0..ell-1}")
        object.__setattr__(self, "mapping", mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    @staticmethod
    def identity(ell: int) -> "Permutation":
        return Permutation(range(ell))


@dataclass(frozen=True)
class FosValidation:
    """Outcome of :func:`validate_fos`: ok flag plus offending indices."""

    ok: bool
    uncovered: tuple[int, ...] = ()
    out_of_range: tuple[int, ...] = ()

    def message(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.uncovered:
            parts.append(f"uncovered indices: {list(self.uncovered)}")
        if self.out_of_range:
            parts.append(f"out-of-range indices: {list(self.out_of_range)}")
        return "; ".join(parts)


def make_homogeneous_fos(ell: int, k: int, perm: Permutation | None = None) -> Fos:
    """Build the homogeneous FOS of ell/k disjoint masks of size k.

    Mask i holds the permuted indices pi_j for (i-1)*k < j <= i*k; the
    identity permutation yields the contiguous partition.
    """
    if k < 1:
        raise ValueError(f"mask size must be >= 1, got {k}")
    if ell % k != 0:
        raise ValueError(f"mask size {k} does not divide chromosome length {ell}")
    if perm is None:
        perm = Permutation.identity(ell)
    if len(perm) != ell:
        raise ValueError(f"permutation has domain size {len(perm)}, expected {ell}")
    pi = perm.mapping
    masks = [Mask(pi[i * k : (i + 1) * k]) for i in range(ell // k)]
    return Fos(masks, ell)


def concat_fos(parts: Sequence[Fos]) -> Fos:
    """Concatenate FOS mask lists in order (how two-layer models are built)."""
    if not parts:
        raise ValueError("need at least one FOS to concatenate")
    ell = parts[0].ell
    for p in parts:
        if p.ell != ell:
            raise ValueError(f"cannot concatenate FOSs over lengths {ell} and {p.ell}")
    masks: list[Mask] = []
    for p in parts:
        masks.extend(p.masks)
    return Fos(masks, ell)


def validate_fos(fos: Fos) -> FosValidation:
    """Check coverage of {0..ell-1} and index ranges; report violations."""
    covered: set[int] = set()
    out_of_range: set[int] = set()
    for mask in fos.masks:
        for i in mask:
            if i >= fos.ell:
                out_of_range.add(i)
            else:
                covered.add(i)
    uncovered = sorted(set(range(fos.ell)) - covered)
    ok = not uncovered and not out_of_range
    return FosValidation(ok, tuple(uncovered), tuple(sorted(out_of_range)))


def copy_fragment(dest: np.ndarray, src: np.ndarray, mask: Mask) -> np.ndarray:
    """Return dest with the mask-covered positions replaced by src's."""
    dest = np.asarray(dest)
    src = np.asarray(src)
    if dest.shape != src.shape:
        raise ValueError(f"length mismatch: dest {dest.shape} vs src {src.shape}")
    idx = mask.as_array()
    if idx[-1] >= dest.shape[-1]:
        raise ValueError(f"mask index {idx[-1]} out of range for length {dest.shape[-1]}")
    out = dest.copy()
    out[idx] = src[idx]
    return out


def parse_fos_text(text: str, ell: int) -> Fos:
    """Parse the FOS text format: one mask per line, 1-based comma-separated
    indices, ``#`` starts a comment."""
    masks = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            one_based = [int(tok) for tok in line.split(",")]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: cannot parse mask {line!r}") from exc
        if any(i < 1 for i in one_based):
            raise ValueError(f"line {lineno}: indices are 1-based, got {one_based}")
        masks.append(Mask(i - 1 for i in one_based))
    if not masks:
        raise ValueError("FOS file contains no masks")
    fos = Fos(masks, ell)
    report = validate_fos(fos)
    if not report.ok:
        raise ValueError(f"invalid FOS: {report.message()}")
    return fos


def format_fos_text(fos: Fos) -> str:
    """Render a FOS in the 1-based text format accepted by parse_fos_text."""
    lines = [",".join(str(i + 1) for i in mask) for mask in fos.masks]
    return "\n".join(lines) + "\n"


def resolve_fos(name: str, ell: int, k: int | None = None) -> Fos:
    """Resolve the canonical shorthands ``f_k`` and ``f_k,1``.

    ``f_k`` is the homogeneous FOS of size-k masks; ``f_k,1`` concatenates it
    with the single-bit FOS.  k comes from the caller (the CLI --k flag).
    """
    canon = name.strip().lower()
    if canon == "f_k":
        if k is None:
            raise ValueError("FOS shorthand f_k needs a mask size (--k)")
        return make_homogeneous_fos(ell, k)
    if canon == "f_k,1":
        if k is None:
            raise ValueError("FOS shorthand f_k,1 needs a mask size (--k)")
        return concat_fos([make_homogeneous_fos(ell, k), make_homogeneous_fos(ell, 1)])
    raise ValueError(f"unknown FOS shorthand {name!r} (expected f_k or f_k,1)")
