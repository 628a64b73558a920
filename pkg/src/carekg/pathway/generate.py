"""Synthetic cohort generation.

Each patient owns an independent RNG substream derived from
``default_rng([config.seed, patient_index])`` (a SeedSequence spawn), so the
cohort is a pure function of the config and patients can be generated in any
order or in parallel without changing the result.

Feature marginals are drawn through a latent Gaussian copula: every sampled
feature consumes one standard normal; a linked feature mixes its parent's
latent with its own (z = rho * z_parent + sqrt(1-rho^2) * z_own) before the
inverse-CDF map, which preserves the configured marginal exactly while
inducing a monotone dependency.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from ..errors import ConfigurationError, GenerationError, UsageError
from .vocab import EVENT_NAMES, OUTCOMES, START, END, TRANSITION_PAIRS
from .distributions import Categorical

MAX_WALK_STEPS = 64


@dataclass(frozen=True)
class PatientRecord:
    id: str
    features: dict
    events: tuple     # ((event_name, hours_from_admission), ...) strictly increasing times
    outcome: str

    def event_times(self):
        return dict(self.events)

    def event_sequence(self):
        return tuple(name for name, _ in self.events)


def sample_event_sequence(tm, time_model, rng):
    """One START->...->END walk with exponential inter-event gaps.

    Repeated events collapse to their first occurrence; START/END are
    stripped; times are strictly increasing and >= 0. ``time_model`` is a
    callable (src, dst) -> mean gap hours. The caller guarantees tm validity.
    """
    states = tm.states
    cum = np.cumsum(tm.probs, axis=1)
    index = {s: i for i, s in enumerate(states)}
    current = START
    clock = 0.0
    seen = {}
    order = []
    for _ in range(MAX_WALK_STEPS):
        row = cum[index[current]]
        nxt = states[min(int(np.searchsorted(row, rng.random(), side="right")), len(states) - 1)]
        if nxt == END:
            return tuple((name, seen[name]) for name in order)
        # exponential gaps are almost surely positive; clamp the measure-zero
        # tie so recorded first-occurrence times stay strictly increasing
        clock += max(rng.exponential(time_model(current, nxt)), 1e-9)
        if nxt not in seen:
            seen[nxt] = clock
            order.append(nxt)
        current = nxt
    raise GenerationError(f"event walk exceeded {MAX_WALK_STEPS} steps without reaching END")


def binarize_transitions(record):
    """Direct-succession indicators for all 56 ordered event pairs."""
    seq = record.event_sequence()
    direct = set(zip(seq, seq[1:]))
    return {pair: (1 if pair in direct else 0) for pair in TRANSITION_PAIRS}


def _topo_order(specs):
    """Sampled features ordered so every link parent precedes its children."""
    by_name = {fs.name: fs for fs in specs}
    done, out = set(), []

    def visit(fs):
        if fs.name in done:
            return
        if fs.link is not None and fs.link["feature"] in by_name:
            visit(by_name[fs.link["feature"]])
        done.add(fs.name)
        out.append(fs)

    for fs in specs:
        visit(fs)
    return out


def _term_activation(term, features, record_events, direct_pairs):
    """Unweighted activation of one severity term."""
    kind = term["kind"]
    if kind == "numeric_linear":
        x = features[term["feature"]]
        return (x - term.get("center", 0.0)) / term.get("scale", 1.0)
    if kind == "numeric_hinge":
        x = features[term["feature"]]
        thr = term["threshold"]
        scale = term.get("scale", 1.0)
        gap = (x - thr) if term.get("above", False) else (thr - x)
        return max(0.0, gap / scale)
    if kind == "flag":
        return float(features[term["feature"]])
    if kind == "category":
        return 1.0 if features[term["feature"]] == term["value"] else 0.0
    if kind == "event":
        return 1.0 if term["event"] in record_events else 0.0
    if kind == "transition":
        return 1.0 if (term["source"], term["target"]) in direct_pairs else 0.0
    if kind == "event_before":
        ta = record_events.get(term["first"])
        tb = record_events.get(term["then"])
        return 1.0 if ta is not None and tb is not None and ta < tb else 0.0
    if kind == "event_early":
        t = record_events.get(term["event"])
        if t is None:
            return 0.0
        return max(0.0, 1.0 - t / term["horizon"])
    if kind == "conjunction":
        acts = [
            min(1.0, max(0.0, _term_activation(p, features, record_events, direct_pairs)))
            for p in term["parts"]
        ]
        return float(np.prod(acts))
    raise ConfigurationError(f"unknown severity term kind {kind!r}")


def severity_score(config, features, events):
    """Weighted sum of term activations (noise excluded)."""
    record_events = dict(events)
    seq = tuple(name for name, _ in events)
    direct_pairs = set(zip(seq, seq[1:]))
    total = 0.0
    for term in config.outcome_model.terms:
        total += term.get("weight", 1.0) * _term_activation(term, features, record_events, direct_pairs)
    return total


def outcome_logits(config, severity):
    om = config.outcome_model
    return np.array([
        0.0,
        om.base_logits["Rehabilitation"] + om.slopes["Rehabilitation"] * severity,
        om.base_logits["Death"] + om.slopes["Death"] * severity,
    ])


def _sample_patient(config, i, specs_in_order, families):
    rng = np.random.default_rng([config.seed, i])

    # one latent normal per sampled feature, consumed in config order
    z_raw = rng.standard_normal(len(specs_in_order))
    z_eff = {}
    features = {}
    for fs, z in zip(specs_in_order, z_raw):
        if fs.link is not None:
            rho = fs.link["rho"]
            z = rho * z_eff[fs.link["feature"]] + np.sqrt(1.0 - rho * rho) * z
        z_eff[fs.name] = z
        u = float(ndtr(z))
        fam = families[fs.name]
        if isinstance(fam, Categorical):
            features[fs.name] = fam.pick(u)
        elif fs.kind == "binary":
            features[fs.name] = int(fam.ppf(u))
        elif fs.distribution["family"] == "poisson":
            features[fs.name] = int(fam.ppf(min(u, 1.0 - 1e-12)))
        else:
            features[fs.name] = float(fam.ppf(u))

    events = sample_event_sequence(config.transition_matrix, config.gap_mean, rng)

    s = severity_score(config, features, events)
    s += rng.normal(0.0, config.outcome_model.noise_std)
    logits = outcome_logits(config, s)
    p = np.exp(logits - logits.max())
    p /= p.sum()
    outcome = OUTCOMES[min(int(np.searchsorted(np.cumsum(p), rng.random(), side="right")), 2)]

    return PatientRecord(id=f"p{i:06d}", features=features, events=events, outcome=outcome)


def generate_cohort(config):
    """Deterministically generate ``config.n_patients`` records."""
    config.validate()
    specs = _topo_order(config.sampled_features())
    families = {fs.name: fs.family() for fs in specs}
    return [_sample_patient(config, i, specs, families) for i in range(config.n_patients)]
