import json
import os

import pytest
from hypothesis import settings

from carekg.pathway import CohortConfig, generate_cohort

# Property tests shrink through model training code whose per-example runtime
# varies wildly with load, so wall-clock deadlines only produce flaky failures.
settings.register_profile("carekg", deadline=None)
settings.load_profile("carekg")

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIG_PATH = os.path.join(REPO_ROOT, "configs", "default_cohort.json")


@pytest.fixture(scope="session")
def default_doc():
    with open(CONFIG_PATH, encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture(scope="session")
def tiny_config(default_doc):
    doc = dict(default_doc)
    doc["n_patients"] = 120
    doc["seed"] = 7
    return CohortConfig.from_dict(doc)


@pytest.fixture(scope="session")
def tiny_cohort(tiny_config):
    return generate_cohort(tiny_config)
