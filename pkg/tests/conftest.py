import numpy as np
import pytest
from hypothesis import settings

from relfilter.data import DatasetManifest, ImageRecord, parse_timestamp
from relfilter.features import FeatureStore

settings.register_profile("suite", derandomize=True, max_examples=100,
                          deadline=None)
settings.load_profile("suite")


def unit_rows(rng, n, dim):
    """Random rows on the unit sphere, double precision."""
    m = rng.normal(size=(n, dim))
    return m / np.linalg.norm(m, axis=1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


@pytest.fixture
def small_store(rng):
    ids = [f"img{i:03d}" for i in range(20)]
    return FeatureStore.from_arrays(ids, unit_rows(rng, 20, 8),
                                    backend_tag="external")


def make_record(item_id, **kw):
    kw.setdefault("path", f"{item_id}.jpg")
    if isinstance(kw.get("timestamp"), str):
        kw["timestamp"] = parse_timestamp(kw["timestamp"])
    return ImageRecord(id=item_id, **kw)


def make_manifest(records):
    return DatasetManifest(records=tuple(records))
