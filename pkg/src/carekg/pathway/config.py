"""Cohort configuration model: feature specs, transition matrix, outcome
mechanism, event-time model. Loaded from a JSON document (schema in README).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from .vocab import EVENT_NAMES, OUTCOMES, START, END
from .distributions import make_family, Categorical

_KINDS = ("numeric", "categorical", "binary", "event")
_NUMERIC_FAMILIES = ("generalized-extreme-value", "normal", "uniform", "poisson")

TERM_KINDS = (
    "numeric_linear", "numeric_hinge", "flag", "category",
    "event", "transition", "event_before", "event_early", "conjunction",
)


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str
    distribution: dict
    link: dict | None = None

    def validate(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"feature {self.name}: unknown kind {self.kind!r}")
        if self.kind == "event":
            return self  # events are produced by the transition walk, not a marginal draw
        fam = make_family(self.name, self.distribution)
        tag = self.distribution["family"]
        if self.kind == "binary" and tag != "bernoulli":
            raise ConfigurationError(f"feature {self.name}: binary features need a bernoulli family")
        if self.kind == "categorical" and tag != "categorical-with-probabilities":
            raise ConfigurationError(f"feature {self.name}: categorical features need explicit probabilities")
        if self.kind == "numeric" and tag not in _NUMERIC_FAMILIES:
            raise ConfigurationError(f"feature {self.name}: family {tag!r} not usable for numeric features")
        if self.link is not None:
            if "feature" not in self.link or "rho" not in self.link:
                raise ConfigurationError(f"feature {self.name}: link needs 'feature' and 'rho'")
            if isinstance(fam, Categorical):
                raise ConfigurationError(f"feature {self.name}: links apply to scalar features only")
            rho = self.link["rho"]
            if not -1.0 < rho < 1.0:
                raise ConfigurationError(f"feature {self.name}: link rho must lie in (-1, 1), got {rho}")
        return self

    def family(self):
        return make_family(self.name, self.distribution)


@dataclass(frozen=True)
class TransitionMatrix:
    states: tuple
    probs: np.ndarray  # row-stochastic, indexed like states

    @classmethod
    def from_rows(cls, rows, states=None):
        """Build from {source: {target: prob}}; END defaults to absorbing."""
        states = tuple(states) if states else (START,) + EVENT_NAMES + (END,)
        index = {s: i for i, s in enumerate(states)}
        probs = np.zeros((len(states), len(states)))
        for src, targets in rows.items():
            if src not in index:
                raise ConfigurationError(f"transition_matrix: unknown source state {src!r}")
            for dst, p in targets.items():
                if dst not in index:
                    raise ConfigurationError(f"transition_matrix: unknown target state {dst!r}")
                probs[index[src], index[dst]] = p
        if START not in rows:
            raise ConfigurationError("transition_matrix: a START row is required")
        # events without a configured row terminate immediately; END absorbs
        for s in states:
            if not probs[index[s]].any():
                probs[index[s], index[END]] = 1.0
        probs[index[END]] = 0.0
        probs[index[END], index[END]] = 1.0
        return cls(states, probs).validate()

    def validate(self):
        if START not in self.states or END not in self.states:
            raise ConfigurationError("transition_matrix: states must include START and END")
        idx = {s: i for i, s in enumerate(self.states)}
        if np.any(self.probs < 0) or np.any(self.probs > 1):
            raise ConfigurationError("transition_matrix: entries must lie in [0,1]")
        sums = self.probs.sum(axis=1)
        bad = [s for s, t in zip(self.states, sums) if abs(t - 1.0) > 1e-9]
        if bad:
            raise ConfigurationError(f"transition_matrix: rows {bad} do not sum to 1")
        if self.probs[:, idx[START]].any():
            raise ConfigurationError("transition_matrix: transitions into START are forbidden")
        end_row = self.probs[idx[END]].copy()
        end_row[idx[END]] = 0.0
        if end_row.any():
            raise ConfigurationError("transition_matrix: transitions out of END are forbidden")
        return self

    def row(self, state):
        return self.probs[self.states.index(state)]


def _validate_term(term, feature_map, i):
    kind = term.get("kind")
    where = f"outcome_model.terms[{i}]"
    if kind not in TERM_KINDS:
        raise ConfigurationError(f"{where}: unknown term kind {kind!r}")
    if kind in ("numeric_linear", "numeric_hinge", "flag", "category"):
        name = term.get("feature")
        if name not in feature_map:
            raise ConfigurationError(f"{where}: unknown feature {name!r}")
    if kind in ("event", "event_early"):
        if term.get("event") not in EVENT_NAMES:
            raise ConfigurationError(f"{where}: unknown event {term.get('event')!r}")
    if kind == "transition":
        if term.get("source") not in EVENT_NAMES or term.get("target") not in EVENT_NAMES:
            raise ConfigurationError(f"{where}: transition endpoints must be events")
    if kind == "event_before":
        if term.get("first") not in EVENT_NAMES or term.get("then") not in EVENT_NAMES:
            raise ConfigurationError(f"{where}: event_before endpoints must be events")
    if kind == "conjunction":
        parts = term.get("parts", [])
        if len(parts) < 2:
            raise ConfigurationError(f"{where}: conjunction needs at least 2 parts")
        for j, part in enumerate(parts):
            if part.get("kind") == "conjunction":
                raise ConfigurationError(f"{where}: nested conjunctions are not supported")
            _validate_term(part, feature_map, f"{i}.parts[{j}]")


@dataclass(frozen=True)
class OutcomeModel:
    """Severity-linked categorical outcome: severity is a weighted sum of
    term activations plus Gaussian noise; class logits are affine in it."""

    base_logits: dict      # logits for Rehabilitation / Death (BackHome is the reference)
    slopes: dict           # per-class severity slopes
    noise_std: float
    terms: tuple           # term dicts, see TERM_KINDS

    def validate(self, feature_map):
        for cls in ("Rehabilitation", "Death"):
            if cls not in self.base_logits or cls not in self.slopes:
                raise ConfigurationError(f"outcome_model: missing base_logits/slopes for {cls}")
        if self.noise_std < 0:
            raise ConfigurationError("outcome_model: noise_std must be >= 0")
        for i, term in enumerate(self.terms):
            _validate_term(term, feature_map, i)
        return self


@dataclass(frozen=True)
class CohortConfig:
    n_patients: int
    seed: int
    feature_specs: tuple
    transition_matrix: TransitionMatrix
    outcome_probs: tuple       # target marginals for (BackHome, Rehabilitation, Death)
    outcome_model: OutcomeModel
    event_time_model: dict = field(default_factory=dict)

    def validate(self):
        if self.n_patients < 0:
            raise ConfigurationError("n_patients must be >= 0")
        names = [fs.name for fs in self.feature_specs]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ConfigurationError(f"feature_specs: duplicate feature names {dup}")
        fmap = self.feature_map()
        for fs in self.feature_specs:
            fs.validate()
            if fs.link is not None and fs.link["feature"] not in fmap:
                raise ConfigurationError(f"feature {fs.name}: link references unknown feature {fs.link['feature']!r}")
        self._check_link_cycles(fmap)
        self.transition_matrix.validate()
        if len(self.outcome_probs) != len(OUTCOMES):
            raise ConfigurationError("outcome_probs must have 3 entries")
        if abs(sum(self.outcome_probs) - 1.0) > 1e-9:
            raise ConfigurationError(f"outcome_probs sum to {sum(self.outcome_probs)}, not 1")
        self.outcome_model.validate(fmap)
        mean = self.event_time_model.get("default_mean_hours", 12.0)
        if mean <= 0:
            raise ConfigurationError("event_time_model: default_mean_hours must be > 0")
        for key, m in self.event_time_model.get("transition_mean_hours", {}).items():
            if m <= 0:
                raise ConfigurationError(f"event_time_model: mean for {key!r} must be > 0")
        return self

    def _check_link_cycles(self, fmap):
        for start in fmap:
            seen = {start}
            cur = fmap[start].link
            while cur is not None:
                nxt = cur["feature"]
                if nxt in seen:
                    raise ConfigurationError(f"feature {start}: linkage cycle through {nxt!r}")
                seen.add(nxt)
                cur = fmap[nxt].link

    def feature_map(self):
        return {fs.name: fs for fs in self.feature_specs}

    def sampled_features(self):
        """Feature specs that get a marginal draw (everything except events)."""
        return [fs for fs in self.feature_specs if fs.kind != "event"]

    def gap_mean(self, src, dst):
        custom = self.event_time_model.get("transition_mean_hours", {})
        return custom.get(f"{src}->{dst}", self.event_time_model.get("default_mean_hours", 12.0))

    @classmethod
    def from_dict(cls, doc):
        try:
            specs = tuple(
                FeatureSpec(
                    name=f["name"], kind=f["kind"],
                    distribution=f.get("distribution", {}),
                    link=f.get("link"),
                )
                for f in doc["feature_specs"]
            )
            tm = TransitionMatrix.from_rows(doc["transition_matrix"], doc.get("states"))
            om = doc["outcome_model"]
            model = OutcomeModel(
                base_logits=dict(om["base_logits"]),
                slopes=dict(om["slopes"]),
                noise_std=float(om.get("noise_std", 0.0)),
                terms=tuple(om.get("terms", ())),
            )
            cfg = cls(
                n_patients=int(doc["n_patients"]),
                seed=int(doc["seed"]),
                feature_specs=specs,
                transition_matrix=tm,
                outcome_probs=tuple(float(p) for p in doc["outcome_probs"]),
                outcome_model=model,
                event_time_model=dict(doc.get("event_time_model", {})),
            )
        except KeyError as e:
            raise ConfigurationError(f"cohort config: missing field {e}") from None
        return cfg.validate()


def load_cohort_config(path, overrides=None):
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"cohort config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"cohort config {path} is not valid JSON: {e}") from None
    if overrides:
        doc.update(overrides)
    return CohortConfig.from_dict(doc)
