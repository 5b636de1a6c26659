"""Dataset ingestion and synthesis.

File formats:

* Dense CSV -- one example per row, ``label,f1,...,fd``, no header. The
  dimension is inferred from the first row.
* Sparse -- a header line ``#d=<dim> #k=<classes>`` followed by rows
  ``label idx:val idx:val ...`` with 0-based strictly increasing indices.

Synthetic generators draw their Gaussians by Box-Muller from the seeded
uniform stream so the whole pipeline shares one generator family.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .problems import Example, Problem, SparseVector


@dataclass(frozen=True)
class Dataset:
    """Examples plus enough metadata to rebuild them: dimension, class
    count, and a provenance string (file path or synthesis recipe)."""

    examples: list
    d: int
    num_classes: int
    provenance: str

    @property
    def n(self):
        return len(self.examples)

    def labels(self) -> np.ndarray:
        return np.array([ex.label for ex in self.examples], dtype=np.int64)

    def label_counts(self) -> np.ndarray:
        return np.bincount(self.labels(), minlength=self.num_classes)


def make_problem(dataset, kind, l2_lambda=0.0):
    return Problem(dataset.examples, kind, l2_lambda=l2_lambda,
                   num_classes=dataset.num_classes, d=dataset.d)


class DatasetFormatError(ValueError):
    """Malformed dataset file; carries the offending line number."""

    def __init__(self, path, line_no, message):
        super().__init__("%s:%d: %s" % (path, line_no, message))
        self.line_no = line_no


def load_dense_csv(path):
    """Parse a dense CSV dataset; aborts with the line number on the first
    malformed row."""
    examples = []
    d = None
    max_label = 0
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if d is None:
                d = len(fields) - 1
                if d < 1:
                    raise DatasetFormatError(path, line_no,
                                             "need a label and features")
            elif len(fields) - 1 != d:
                raise DatasetFormatError(
                    path, line_no, "expected %d feature values, got %d"
                    % (d, len(fields) - 1))
            try:
                label = int(fields[0])
                values = np.array([float(v) for v in fields[1:]])
            except ValueError as exc:
                raise DatasetFormatError(path, line_no,
                                         "non-numeric field (%s)" % exc) from None
            if label < 0:
                raise DatasetFormatError(path, line_no, "negative label")
            max_label = max(max_label, label)
            examples.append(Example(features=values, label=label))
    if not examples:
        raise DatasetFormatError(path, 0, "empty dataset file")
    return Dataset(examples=examples, d=d, num_classes=max_label + 1,
                   provenance=str(path))


_SPARSE_HEADER = re.compile(r"^#d=(\d+)\s+#k=(\d+)\s*$")


def load_sparse(path):
    """Parse a sparse dataset (header ``#d=<dim> #k=<classes>``)."""
    examples = []
    with open(path) as fh:
        header = fh.readline()
        m = _SPARSE_HEADER.match(header.strip())
        if not m:
            raise DatasetFormatError(path, 1,
                                     "missing '#d=<dim> #k=<classes>' header")
        d, k = int(m.group(1)), int(m.group(2))
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split()
            try:
                label = int(fields[0])
            except ValueError:
                raise DatasetFormatError(path, line_no,
                                         "non-numeric label") from None
            if not 0 <= label < k:
                raise DatasetFormatError(path, line_no, "label out of range")
            indices, values = [], []
            for tok in fields[1:]:
                try:
                    idx_s, val_s = tok.split(":")
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise DatasetFormatError(path, line_no,
                                             "malformed idx:val token %r"
                                             % tok) from None
                if indices and idx <= indices[-1]:
                    raise DatasetFormatError(
                        path, line_no, "indices must be strictly increasing")
                if idx < 0 or idx >= d:
                    raise DatasetFormatError(path, line_no,
                                             "index %d out of range" % idx)
                if val != 0.0:
                    indices.append(idx)
                    values.append(val)
            examples.append(Example(
                features=SparseVector(np.array(indices, dtype=np.int64),
                                      np.array(values)),
                label=label))
    if not examples:
        raise DatasetFormatError(path, 1, "empty dataset file")
    return Dataset(examples=examples, d=d, num_classes=k,
                   provenance=str(path))


def write_dense_csv(dataset, path):
    """Inverse of load_dense_csv, with round-trip exact float formatting."""
    with open(path, "w") as fh:
        for ex in dataset.examples:
            feats = np.asarray(ex.features)
            fh.write("%d,%s\n" % (ex.label,
                                  ",".join(format(v, ".17g") for v in feats)))


def box_muller(rng, size):
    """Standard normals from the uniform stream via Box-Muller."""
    n_pairs = (size + 1) // 2
    u1 = 1.0 - rng.random(n_pairs)  # (0, 1]: keeps log() finite
    u2 = rng.random(n_pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2.0 * np.pi * u2),
                        r * np.sin(2.0 * np.pi * u2)])
    return z[:size]


def synth_centroid(n, d, sigma, seed):
    """n i.i.d. Gaussian(0, sigma^2 I_d) feature points, labels all zero."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    X = sigma * box_muller(rng, n * d).reshape(n, d)
    examples = [Example(features=X[i], label=0) for i in range(n)]
    return Dataset(examples=examples, d=d, num_classes=1,
                   provenance="synth_centroid(n=%d,d=%d,sigma=%g,seed=%d)"
                              % (n, d, sigma, seed))


def synth_classification(n, d, num_classes, margin=4.0, sparsity=0.0, seed=0):
    """Gaussian class clusters with centers at pairwise distance >= margin,
    unit within-class noise, labels assigned round robin. With sparsity > 0
    each coordinate is independently zeroed at that rate and the features
    are stored sparse."""
    if not n >= num_classes >= 2:
        raise ValueError("need n >= num_classes >= 2")
    if margin < 0 or not 0.0 <= sparsity <= 1.0:
        raise ValueError("bad margin or sparsity")
    rng = np.random.default_rng(seed)
    centers = box_muller(rng, num_classes * d).reshape(num_classes, d)
    if num_classes > 1 and margin > 0:
        dists = [np.linalg.norm(centers[a] - centers[b])
                 for a in range(num_classes) for b in range(a + 1, num_classes)]
        closest = min(dists)
        if closest <= 0:
            raise ValueError("degenerate centers; pick another seed")
        # normalize so the closest pair sits exactly at the margin: the
        # margin then controls class overlap in both directions
        centers = centers * (margin / closest)

    labels = np.arange(n) % num_classes
    noise = box_muller(rng, n * d).reshape(n, d)
    X = centers[labels] + noise
    if sparsity > 0.0:
        keep = rng.random((n, d)) >= sparsity
        X = X * keep

    examples = []
    for i in range(n):
        if sparsity > 0.0:
            nz = np.flatnonzero(X[i])
            examples.append(Example(
                features=SparseVector(nz, X[i][nz]), label=int(labels[i])))
        else:
            examples.append(Example(features=X[i], label=int(labels[i])))
    return Dataset(
        examples=examples, d=d, num_classes=num_classes,
        provenance="synth_classification(n=%d,d=%d,K=%d,margin=%g,"
                   "sparsity=%g,seed=%d)" % (n, d, num_classes, margin,
                                             sparsity, seed))


def unbalance(dataset, drop_labels, keep_fraction, seed):
    """Keep each example of a dropped label independently with probability
    keep_fraction; other labels and the ordering are untouched."""
    if not 0.0 < keep_fraction <= 1.0:
        raise ValueError("keep_fraction must lie in (0, 1]")
    drop_labels = set(int(l) for l in drop_labels)
    rng = np.random.default_rng(seed)
    survivors = []
    for ex in dataset.examples:
        if ex.label in drop_labels and rng.random() >= keep_fraction:
            continue
        survivors.append(ex)
    if not survivors:
        raise ValueError("unbalancing removed every example")
    return Dataset(
        examples=survivors, d=dataset.d, num_classes=dataset.num_classes,
        provenance="%s|unbalance(drop=%s,keep=%g,seed=%d)"
                   % (dataset.provenance, sorted(drop_labels), keep_fraction,
                      seed))
