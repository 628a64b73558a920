"""Cohort CSV format: id, 22 features, 8 event-time columns (empty when the
event is absent), 56 direct-transition indicators, outcome. RFC-4180 quoting
via the csv module, UTF-8, header mandatory.
"""

import csv

from ..errors import UsageError
from .vocab import FEATURE_ORDER, EVENT_NAMES, TRANSITION_PAIRS, OUTCOMES
from .generate import PatientRecord, binarize_transitions


def cohort_header():
    return (
        ["id"]
        + list(FEATURE_ORDER)
        + list(EVENT_NAMES)
        + [f"trans_{a}_{b}" for a, b in TRANSITION_PAIRS]
        + ["outcome"]
    )


def _format_value(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_cohort_csv(cohort, path):
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(cohort_header())
        for rec in cohort:
            times = rec.event_times()
            trans = binarize_transitions(rec)
            row = [rec.id]
            row += [_format_value(rec.features[name]) for name in FEATURE_ORDER]
            row += [repr(times[e]) if e in times else "" for e in EVENT_NAMES]
            row += [str(trans[pair]) for pair in TRANSITION_PAIRS]
            row.append(rec.outcome)
            w.writerow(row)


def read_cohort_csv(path, config):
    """Rebuild PatientRecords; feature types come from the config's specs."""
    kinds = {fs.name: fs for fs in config.sampled_features()}
    records = []
    with open(path, encoding="utf-8", newline="") as f:
        r = csv.reader(f)
        header = next(r, None)
        if header != cohort_header():
            raise UsageError(f"unexpected cohort CSV header in {path}")
        for row in r:
            m = dict(zip(header, row))
            features = {}
            for name in FEATURE_ORDER:
                fs = kinds.get(name)
                raw = m[name]
                if fs is None or fs.kind == "categorical":
                    features[name] = raw
                elif fs.kind == "binary":
                    features[name] = int(raw)
                elif fs.distribution.get("family") == "poisson":
                    features[name] = int(raw)
                else:
                    features[name] = float(raw)
            events = sorted(
                ((e, float(m[e])) for e in EVENT_NAMES if m[e] != ""),
                key=lambda kv: kv[1],
            )
            if m["outcome"] not in OUTCOMES:
                raise UsageError(f"unknown outcome label {m['outcome']!r} in {path}")
            records.append(PatientRecord(
                id=m["id"], features=features, events=tuple(events), outcome=m["outcome"],
            ))
    return records
