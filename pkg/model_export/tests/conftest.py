import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import export_models  # noqa: E402


@pytest.fixture(scope="session")
def fixture_images(tmp_path_factory):
    """16 deterministic random photos, mixed landscape and portrait."""
    root = tmp_path_factory.mktemp("images")
    rng = np.random.default_rng(42)
    for k in range(16):
        size = (200, 150) if k % 3 else (120, 180)
        arr = rng.integers(0, 256, size=(size[1], size[0], 3), dtype=np.uint8)
        Image.fromarray(arr, "RGB").save(root / f"img{k:02d}.png")
    return root


@pytest.fixture(scope="session")
def resnet_export(tmp_path_factory):
    out = tmp_path_factory.mktemp("resnet_model")
    model_path, sidecar_path = export_models.export_backbone("resnet50", out)
    return model_path, sidecar_path
