"""Flat feature encoding of a cohort for the tabular models.

Column layout: the 4 numerics, one-hot groups for each categorical (width
= declared category count), the 12 binary flags, then the 56 transition
indicators in fixed pair order. Event timestamps never enter; the
transition indicators carry only the order of events.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError
from ..pathway.generate import binarize_transitions
from ..pathway.vocab import (NUMERIC_FEATURES, CATEGORICAL_FEATURES, BINARY_FEATURES,
                             TRANSITION_PAIRS, OUTCOMES)

OUTCOME_TO_CLASS = {name: k for k, name in enumerate(OUTCOMES)}


@dataclass
class ColumnMeta:
    name: str
    kind: str        # numeric | onehot | binary | transition
    source: str      # the cohort feature or transition pair it encodes


@dataclass
class TabularMatrix:
    """Raw design matrix plus everything needed to standardize it safely."""

    X: np.ndarray
    y: np.ndarray
    columns: list
    numeric_cols: np.ndarray
    unseen_categories: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def n_patients(self):
        return self.X.shape[0]

    def standardized(self, train_index):
        """Copy of X with numeric columns scaled by training-split stats.

        The returned stats dict records the mean and standard deviation
        actually used, so tests can assert they came from the training
        rows alone. Constant columns are centered and left unscaled.
        """
        train_index = np.asarray(train_index, dtype=np.int64)
        if train_index.size == 0:
            raise UsageError("standardization needs a non-empty training index")
        out = self.X.copy()
        stats = {}
        for c in self.numeric_cols:
            mu = float(self.X[train_index, c].mean())
            sd = float(self.X[train_index, c].std())
            scale = sd if sd > 1e-12 else 1.0
            out[:, c] = (self.X[:, c] - mu) / scale
            stats[self.columns[c].name] = (mu, scale)
        return out, stats


def _column_plan(config):
    """Column metadata and the categorical level sets, from the config."""
    fmap = config.feature_map()
    columns = []
    for f in NUMERIC_FEATURES:
        columns.append(ColumnMeta(f, "numeric", f))
    levels = {}
    for f in CATEGORICAL_FEATURES:
        values = list(fmap[f].family().values)
        levels[f] = {v: i for i, v in enumerate(values)}
        for v in values:
            columns.append(ColumnMeta(f"{f}={v}", "onehot", f))
    for f in BINARY_FEATURES:
        columns.append(ColumnMeta(f, "binary", f))
    for a, b in TRANSITION_PAIRS:
        columns.append(ColumnMeta(f"trans_{a}_{b}", "transition", f"{a}->{b}"))
    return columns, levels


def encode_tabular(cohort, config):
    """Encode patient records into a TabularMatrix.

    Categories outside the declared level set leave their one-hot group
    all zero and bump the unseen_categories counter. An empty cohort
    yields a 0-row matrix that still carries the full column metadata.
    """
    columns, levels = _column_plan(config)
    d = len(columns)
    n = len(cohort)
    X = np.zeros((n, d))
    y = np.zeros(n, dtype=np.int64)
    unseen = 0

    onehot_base = {}
    pos = len(NUMERIC_FEATURES)
    for f in CATEGORICAL_FEATURES:
        onehot_base[f] = pos
        pos += len(levels[f])
    binary_base = pos
    trans_base = binary_base + len(BINARY_FEATURES)

    for i, rec in enumerate(cohort):
        for j, f in enumerate(NUMERIC_FEATURES):
            X[i, j] = float(rec.features[f])
        for f in CATEGORICAL_FEATURES:
            v = rec.features[f]
            slot = levels[f].get(v)
            if slot is None:
                unseen += 1
            else:
                X[i, onehot_base[f] + slot] = 1.0
        for j, f in enumerate(BINARY_FEATURES):
            X[i, binary_base + j] = float(rec.features[f])
        trans = binarize_transitions(rec)
        for j, pair in enumerate(TRANSITION_PAIRS):
            X[i, trans_base + j] = float(trans[pair])
        y[i] = OUTCOME_TO_CLASS[rec.outcome]

    numeric_cols = np.arange(len(NUMERIC_FEATURES), dtype=np.int64)
    return TabularMatrix(X, y, columns, numeric_cols, unseen)
