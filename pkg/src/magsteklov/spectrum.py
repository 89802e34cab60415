"""Sorted eigenvalue multisets with optional enumeration and provenance."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class SpectrumSeq:
    """Nondecreasing eigenvalue list.

    ``index`` holds the enumeration (ℤ-valued for a single component, ``1..N``
    for a merged spectrum) and ``labels`` the component or branch each value
    came from.
    """

    values: np.ndarray
    index: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("spectrum values must be one dimensional")
        if len(v) > 1 and np.any(np.diff(v) < 0):
            raise ValueError("spectrum values must be nondecreasing")
        idx = np.asarray(self.index, dtype=np.int64)
        if idx.shape != v.shape or len(self.labels) != len(v):
            raise ValueError("index and labels must match the values")
        v.setflags(write=False)
        idx.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "index", idx)
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_values(
        cls,
        values: Iterable[float],
        index: Sequence[int] | None = None,
        labels: Sequence[str] | str | None = None,
    ) -> "SpectrumSeq":
        """Sort ``values`` (stably) carrying index and labels along.

        Without an explicit index the result is enumerated ``1..N``.
        """
        v = np.asarray(list(values), dtype=float)
        if labels is None:
            labels = [""] * len(v)
        elif isinstance(labels, str):
            labels = [labels] * len(v)
        order = np.argsort(v, kind="stable")
        labs = tuple(labels[i] for i in order)
        if index is None:
            idx = np.arange(1, len(v) + 1)
        else:
            idx = np.asarray(index, dtype=np.int64)[order]
        return cls(v[order], idx, labs)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def renumbered(self) -> "SpectrumSeq":
        """Same multiset enumerated ``1..N`` (the merged convention)."""
        return SpectrumSeq(self.values, np.arange(1, len(self) + 1), self.labels)

    def tail(self, head: int) -> "SpectrumSeq":
        return SpectrumSeq(self.values[head:], self.index[head:], self.labels[head:])

    def below(self, T: float) -> "SpectrumSeq":
        k = int(np.searchsorted(self.values, T, side="right"))
        return SpectrumSeq(self.values[:k], self.index[:k], self.labels[:k])

    def select(self, label: str) -> "SpectrumSeq":
        keep = [i for i, lab in enumerate(self.labels) if lab == label]
        return SpectrumSeq(self.values[keep], self.index[keep], tuple(self.labels[i] for i in keep))

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "value", "component"])
        for i, v, lab in zip(self.index, self.values, self.labels):
            w.writerow([int(i), f"{v:.12g}", lab])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> "SpectrumSeq":
        return cls.parse_csv(Path(path).read_text())

    @classmethod
    def parse_csv(cls, text: str) -> "SpectrumSeq":
        """Read ``index,value,component`` rows (header required)."""
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["index", "value", "component"]:
            raise ValueError("spectrum CSV must start with the header 'index,value,component'")
        idx, vals, labs = [], [], []
        for row in rows[1:]:
            if not row:
                continue
            idx.append(int(row[0]))
            vals.append(float(row[1]))
            labs.append(row[2] if len(row) > 2 else "")
        return cls.from_values(vals, idx, labs)


def merge_spectra(seqs: Sequence[SpectrumSeq], upto: float | None = None) -> SpectrumSeq:
    """Multiset union, enumerated ``1..N``; labels keep each value's provenance."""
    values = np.concatenate([s.values for s in seqs]) if seqs else np.zeros(0)
    labels = [lab for s in seqs for lab in s.labels]
    merged = SpectrumSeq.from_values(values, None, labels)
    if upto is not None:
        merged = merged.below(upto)
    return merged
