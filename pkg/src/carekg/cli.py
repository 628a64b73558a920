"""Command-line pipeline driver.

Subcommands:
    generate     sample a cohort and write the cohort CSV
    build-kg     read the cohort CSV and write one .nt file per variant
                 plus a labels/split sidecar JSON
    run          execute experiment specs, writing metrics.csv/summary.json
    report-data  emit flows.csv (observed care-event transition counts)

All paths inside the pipeline config resolve relative to the config file's
directory. Every artifact gets a .manifest.json sidecar recording its hash,
the config hash, the seed, and the tool version. Exit codes: 0 success,
1 runtime failure, 2 configuration or usage error.
"""

import argparse
import dataclasses
import json
import os
import sys
from collections import Counter

from . import __version__
from .errors import CareKGError, ConfigurationError, UsageError
from .pathway.config import CohortConfig
from .pathway.generate import generate_cohort
from .pathway.cohort_io import write_cohort_csv, read_cohort_csv
from .pathway.vocab import START, END, OUTCOMES
from .kg.builder import (SchemaVariant, VARIANT_NAMES, build_cohort_graph,
                         cohort_timestamp_quantiles, patient_iri)
from .rdf.ntriples import serialize_ntriples
from .evalharness.splits import make_split
from .evalharness.experiments import ExperimentSpec, run_experiments, write_manifest


def _load_json(path, what):
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"{what} file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{what} {path} is not valid JSON: {e}") from None


class Pipeline:
    """Resolved pipeline config: paths, cohort config, seed, experiments."""

    def __init__(self, doc, base_dir, seed_override=None):
        if not isinstance(doc, dict):
            raise ConfigurationError("pipeline config must be a JSON object")
        self.base_dir = base_dir
        self.seed = int(seed_override if seed_override is not None
                        else doc.get("seed", 0))

        cohort_cfg = doc.get("cohort_config")
        if isinstance(cohort_cfg, str):
            cohort_cfg = _load_json(self._resolve(cohort_cfg), "cohort config")
        if not isinstance(cohort_cfg, dict):
            raise ConfigurationError("pipeline config needs cohort_config (path or object)")
        self.cohort_config_doc = cohort_cfg

        self.cohort_csv = self._resolve(doc.get("cohort_csv", "out/cohort.csv"))
        self.graph_dir = self._resolve(doc.get("graph_dir", "out/graphs"))
        self.report_dir = self._resolve(doc.get("report_dir", "out/report"))
        self.experiment_paths = [self._resolve(p) for p in doc.get("experiments", [])]

    def _resolve(self, path):
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)

    def cohort_config(self):
        doc = dict(self.cohort_config_doc)
        doc["seed"] = self.seed
        return CohortConfig.from_dict(doc)

    def config_blob(self, extra=None):
        doc = {"cohort_config": self.cohort_config_doc, "seed": self.seed}
        if extra:
            doc.update(extra)
        return json.dumps(doc, sort_keys=True)


def _load_pipeline(args):
    if not args.config:
        raise ConfigurationError("--config is required")
    doc = _load_json(args.config, "pipeline config")
    base_dir = os.path.dirname(os.path.abspath(args.config))
    return Pipeline(doc, base_dir, seed_override=args.seed)


def cmd_generate(args):
    """Sample the cohort and write the CSV + manifest."""
    pipe = _load_pipeline(args)
    config = pipe.cohort_config()
    cohort = generate_cohort(config)
    out = args.out or pipe.cohort_csv
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    write_cohort_csv(cohort, out)
    write_manifest(out, pipe.config_blob(), pipe.seed)
    print(f"wrote {out} ({len(cohort)} patients)")
    return 0


def variant_filename(variant):
    """Filesystem-safe .nt name for a schema variant."""
    return variant.value.replace("*", "") + ".nt"


def cmd_build_kg(args):
    """Build each requested variant graph from the cohort CSV."""
    pipe = _load_pipeline(args)
    if args.variants and args.variants != "all":
        variants = [SchemaVariant.parse(v.strip()) for v in args.variants.split(",")]
    else:
        variants = list(SchemaVariant)

    config = pipe.cohort_config()
    if not os.path.exists(pipe.cohort_csv):
        raise ConfigurationError(
            f"cohort CSV not found: {pipe.cohort_csv} (run 'generate' first)")
    cohort = read_cohort_csv(pipe.cohort_csv, config)
    out_dir = args.out or pipe.graph_dir
    os.makedirs(out_dir, exist_ok=True)

    quantiles = cohort_timestamp_quantiles(cohort)
    files = {}
    for variant in variants:
        graph = build_cohort_graph(cohort, variant, timestamp_quantiles=quantiles)
        path = os.path.join(out_dir, variant_filename(variant))
        with open(path, "w", encoding="utf-8") as f:
            f.write(serialize_ntriples(graph))
        write_manifest(path, pipe.config_blob({"variant": variant.value}), pipe.seed)
        files[variant.value] = os.path.basename(path)
        print(f"wrote {path} ({len(graph.triples)} triples)")

    y = [OUTCOMES.index(rec.outcome) for rec in cohort]
    split = make_split(y, seed=pipe.seed)
    assignment = {}
    for name, idx in (("train", split.train), ("val", split.val), ("test", split.test)):
        for i in idx:
            assignment[patient_iri(cohort[i])] = name
    labels = {
        "files": files,
        "patients": {
            patient_iri(rec): {"outcome": rec.outcome,
                               "split": assignment[patient_iri(rec)]}
            for rec in cohort
        },
    }
    labels_path = os.path.join(out_dir, "labels.json")
    with open(labels_path, "w", encoding="utf-8") as f:
        json.dump(labels, f, indent=2, sort_keys=True)
        f.write("\n")
    write_manifest(labels_path, pipe.config_blob(), pipe.seed)
    print(f"wrote {labels_path}")
    return 0


def cmd_run(args):
    """Run every experiment spec and write the metric reports."""
    pipe = _load_pipeline(args)
    if not pipe.experiment_paths:
        raise ConfigurationError("pipeline config lists no experiments")
    specs = []
    for path in pipe.experiment_paths:
        spec = ExperimentSpec.from_file(path)
        if args.seed is not None:
            spec = dataclasses.replace(spec, base_seed=int(args.seed))
        specs.append(spec)
    out_dir = args.out or pipe.report_dir
    run_experiments(specs, out_dir)
    print(f"wrote {os.path.join(out_dir, 'metrics.csv')}")
    print(f"wrote {os.path.join(out_dir, 'summary.json')}")
    return 0


def transition_flows(cohort):
    """Observed direct-transition counts, including START and END."""
    counts = Counter()
    for rec in cohort:
        seq = (START,) + rec.event_sequence() + (END,)
        for pair in zip(seq, seq[1:]):
            counts[pair] += 1
    return counts


def cmd_report_data(args):
    """Write flows.csv for the report component."""
    pipe = _load_pipeline(args)
    config = pipe.cohort_config()
    if not os.path.exists(pipe.cohort_csv):
        raise ConfigurationError(
            f"cohort CSV not found: {pipe.cohort_csv} (run 'generate' first)")
    cohort = read_cohort_csv(pipe.cohort_csv, config)
    out_dir = args.out or pipe.report_dir
    os.makedirs(out_dir, exist_ok=True)

    counts = transition_flows(cohort)
    order = [START] + list(config.transition_matrix.states) + [END]
    rank = {s: i for i, s in enumerate(dict.fromkeys(order))}
    path = os.path.join(out_dir, "flows.csv")
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("source,target,weight\n")
        for (a, b) in sorted(counts, key=lambda p: (rank[p[0]], rank[p[1]])):
            f.write(f"{a},{b},{counts[(a, b)]}\n")
    write_manifest(path, pipe.config_blob(), pipe.seed)
    print(f"wrote {path} ({len(counts)} flows)")
    return 0


def _parser():
    parser = argparse.ArgumentParser(
        prog="carekg",
        description="Care-pathway knowledge-graph pipeline driver.")
    parser.add_argument("--version", action="version", version=f"carekg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="pipeline config JSON")
        p.add_argument("--seed", type=int, default=None,
                       help="override the pipeline seed")
        p.add_argument("--out", default=None, help="override the output path")

    p = sub.add_parser("generate", help="sample a cohort and write the CSV")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("build-kg", help="build variant graphs from the cohort CSV")
    common(p)
    p.add_argument("--variants", default="all",
                   help="comma-separated variant names (default: all)")
    p.set_defaults(func=cmd_build_kg)

    p = sub.add_parser("run", help="run experiment specs and write reports")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report-data", help="emit flows.csv for the report component")
    common(p)
    p.set_defaults(func=cmd_report_data)
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CareKGError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
