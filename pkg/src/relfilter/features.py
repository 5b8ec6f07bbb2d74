"""Image preprocessing, embedding backends, and the binary feature store.

Store file layout (little-endian):

    magic "FVS1" | u32 version=1 | u32 count | u32 dim
    per record: u16 id-byte-length | UTF-8 id | dim * f32

The store itself never touches an inference runtime, so precomputed
feature files (e.g. externally produced retrieval descriptors) are
first-class inputs.  Embedding runs through a TorchScript interchange
module supplied externally together with a JSON sidecar holding the
preprocessing constants; torch is imported lazily and only needed on
that path.
"""

from __future__ import annotations

import json
import struct
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    BackendError,
    DataError,
    ShapeError,
    StoreFormatError,
    ValidationError,
)

STORE_MAGIC = b"FVS1"
STORE_VERSION = 1

# landscape (width >= height) and portrait target sizes, as (width, height)
LANDSCAPE_SIZE = (768, 512)
PORTRAIT_SIZE = (512, 768)


class FeatureStore:
    """Ordered id -> vector map with a fixed dimension.

    Vectors are held as float32 rows to match the on-disk format; use
    ``matrix64`` for double-precision math.
    """

    def __init__(self, dim: int, backend_tag: str = "external"):
        if dim < 1:
            raise ValidationError(f"dim must be >= 1, got {dim}")
        self.dim = int(dim)
        self.backend_tag = backend_tag
        self._ids: list[str] = []
        self._index: dict[str, int] = {}
        self._rows: list[np.ndarray] = []

    @classmethod
    def from_arrays(cls, ids, matrix, backend_tag: str = "external") -> "FeatureStore":
        matrix = np.atleast_2d(np.asarray(matrix))
        store = cls(dim=matrix.shape[1], backend_tag=backend_tag)
        for item_id, row in zip(ids, matrix):
            store.add(item_id, row)
        return store

    def add(self, item_id: str, vector: np.ndarray) -> None:
        if not item_id:
            raise ValidationError("feature id must be nonempty")
        if item_id in self._index:
            raise ValidationError(f"duplicate feature id '{item_id}'")
        vec = np.asarray(vector, dtype=np.float32).reshape(-1)
        if vec.shape[0] != self.dim:
            raise ShapeError(
                f"vector for '{item_id}' has dim {vec.shape[0]}, store dim {self.dim}")
        if not np.all(np.isfinite(vec)):
            raise DataError(f"vector for '{item_id}' contains non-finite values")
        self._index[item_id] = len(self._ids)
        self._ids.append(item_id)
        self._rows.append(vec)

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._index

    def ids(self) -> list[str]:
        return list(self._ids)

    def get(self, item_id: str) -> np.ndarray:
        try:
            return self._rows[self._index[item_id]]
        except KeyError:
            raise ValidationError(f"unknown feature id '{item_id}'") from None

    def matrix(self) -> np.ndarray:
        if not self._rows:
            return np.empty((0, self.dim), dtype=np.float32)
        return np.stack(self._rows)

    def matrix64(self) -> np.ndarray:
        return np.ascontiguousarray(self.matrix(), dtype=np.float64)

    def subset(self, ids) -> "FeatureStore":
        sub = FeatureStore(dim=self.dim, backend_tag=self.backend_tag)
        for item_id in ids:
            sub.add(item_id, self.get(item_id))
        return sub

    def sq_dists_to(self, vector: np.ndarray) -> np.ndarray:
        """Squared Euclidean distances via 2 - 2<x,q>, valid for unit vectors.

        Exposed so distance-based scores can be cross-checked against an
        inner-product route in tests.
        """
        q = np.asarray(vector, dtype=np.float64).reshape(-1)
        if q.shape[0] != self.dim:
            raise ShapeError(f"vector dim {q.shape[0]} does not match {self.dim}")
        d2 = 2.0 - 2.0 * (self.matrix64() @ q)
        return np.clip(d2, 0.0, 4.0)

    def unit_norm_violation(self) -> float:
        """Largest |norm - 1| over all vectors; 0.0 for an empty store."""
        if not self._rows:
            return 0.0
        norms = np.linalg.norm(self.matrix64(), axis=1)
        return float(np.max(np.abs(norms - 1.0)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureStore):
            return NotImplemented
        return (self.dim == other.dim
                and self.backend_tag == other.backend_tag
                and self._ids == other._ids
                and all(np.array_equal(a, b)
                        for a, b in zip(self._rows, other._rows)))


def _meta_path(path: str | Path) -> Path:
    return Path(str(path) + ".meta.json")


def save_store(store: FeatureStore, path: str | Path,
               extra_meta: dict | None = None) -> None:
    """Write the binary store plus a JSON sidecar with the backend tag."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(STORE_MAGIC)
        fh.write(struct.pack("<III", STORE_VERSION, len(store), store.dim))
        for item_id in store.ids():
            raw = item_id.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise ValidationError(f"id too long to serialize: '{item_id[:32]}...'")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(store.get(item_id).astype("<f4").tobytes())
    meta = {"backend_tag": store.backend_tag, "dim": store.dim,
            "count": len(store)}
    if extra_meta:
        meta.update(extra_meta)
    _meta_path(path).write_text(json.dumps(meta, sort_keys=True) + "\n",
                                encoding="utf-8")


def _read_exact(fh, n: int, what: str) -> bytes:
    raw = fh.read(n)
    if len(raw) != n:
        raise StoreFormatError(f"truncated store file while reading {what}")
    return raw


def load_store(path: str | Path) -> FeatureStore:
    """Read a binary store; the sidecar restores the backend tag if present."""
    path = Path(path)
    backend_tag = "external"
    meta_path = _meta_path(path)
    if meta_path.exists():
        try:
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            backend_tag = meta.get("backend_tag", backend_tag)
        except (json.JSONDecodeError, OSError):
            pass  # a broken sidecar must not block reading the store itself
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != STORE_MAGIC:
            raise StoreFormatError(f"bad magic {magic!r}, expected {STORE_MAGIC!r}")
        version, count, dim = struct.unpack("<III", _read_exact(fh, 12, "header"))
        if version != STORE_VERSION:
            raise StoreFormatError(f"unsupported store version {version}")
        if dim < 1:
            raise StoreFormatError(f"invalid dim {dim}")
        store = FeatureStore(dim=dim, backend_tag=backend_tag)
        for _ in range(count):
            (id_len,) = struct.unpack("<H", _read_exact(fh, 2, "id length"))
            item_id = _read_exact(fh, id_len, "id").decode("utf-8")
            vec = np.frombuffer(_read_exact(fh, 4 * dim, f"vector '{item_id}'"),
                                dtype="<f4")
            try:
                store.add(item_id, vec)
            except (ValidationError, DataError) as exc:
                raise StoreFormatError(str(exc)) from exc
        if fh.read(1):
            raise StoreFormatError("trailing bytes after last record")
    return store


def preprocess_image(image, mean=(0.485, 0.456, 0.406),
                     std=(0.229, 0.224, 0.225)) -> np.ndarray:
    """Resize-to-cover, center-crop, and normalize one image.

    Landscape inputs (width >= height) map to 768x512, portrait to
    512x768; the aspect ratio is preserved by scaling until the target is
    covered, then taking a center crop.  Grayscale inputs are replicated
    to three channels.  Returns a (3, H, W) float32 tensor normalized
    with the backend's channel mean/std.
    """
    if isinstance(image, np.ndarray):
        arr = image
        if arr.ndim == 2:
            arr = np.stack([arr] * 3, axis=-1)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise DataError(f"expected HxW or HxWx3 array, got shape {image.shape}")
        if arr.dtype != np.uint8:
            arr = np.clip(arr, 0, 255).astype(np.uint8)
        pil = Image.fromarray(arr, mode="RGB")
    elif isinstance(image, Image.Image):
        pil = image.convert("RGB")
    else:
        raise DataError(f"unsupported image type {type(image).__name__}")

    width, height = pil.size
    if width < 1 or height < 1:
        raise DataError("image has no pixels")
    target_w, target_h = LANDSCAPE_SIZE if width >= height else PORTRAIT_SIZE

    scale = max(target_w / width, target_h / height)
    new_w = max(target_w, round(width * scale))
    new_h = max(target_h, round(height * scale))
    pil = pil.resize((new_w, new_h), Image.Resampling.BILINEAR)
    left = (new_w - target_w) // 2
    top = (new_h - target_h) // 2
    pil = pil.crop((left, top, left + target_w, top + target_h))

    arr = np.asarray(pil, dtype=np.float32) / 255.0
    mean_arr = np.asarray(mean, dtype=np.float32).reshape(1, 1, 3)
    std_arr = np.asarray(std, dtype=np.float32).reshape(1, 1, 3)
    arr = (arr - mean_arr) / std_arr
    return np.ascontiguousarray(arr.transpose(2, 0, 1))


class EmbeddingBackend:
    """TorchScript module mapping a preprocessed image to a conv feature map.

    The sidecar JSON next to the model file (``<model>.json``) supplies
    the preprocessing constants and the tag:

        {"backend_tag": str, "mean": [r,g,b], "std": [r,g,b],
         "output_dim": int, "interchange": "torchscript-v1"}
    """

    def __init__(self, module, backend_tag: str, mean, std,
                 output_dim: int | None = None):
        self.module = module
        self.backend_tag = backend_tag
        self.mean = tuple(float(v) for v in mean)
        self.std = tuple(float(v) for v in std)
        self.output_dim = output_dim

    @classmethod
    def load(cls, model_path: str | Path) -> "EmbeddingBackend":
        try:
            import torch
        except ImportError as exc:
            raise BackendError(
                Path(model_path).name,
                "torch is required for embedding; install the 'embed' extra",
            ) from exc

        model_path = Path(model_path)
        sidecar = Path(str(model_path) + ".json")
        if not sidecar.exists():
            raise BackendError(model_path.name,
                               f"missing sidecar metadata {sidecar.name}")
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
        for key in ("backend_tag", "mean", "std"):
            if key not in meta:
                raise BackendError(model_path.name, f"sidecar lacks '{key}'")
        try:
            module = torch.jit.load(str(model_path), map_location="cpu")
        except Exception as exc:
            raise BackendError(model_path.name, f"cannot load model: {exc}") from exc
        module.eval()
        return cls(module=module, backend_tag=meta["backend_tag"],
                   mean=meta["mean"], std=meta["std"],
                   output_dim=meta.get("output_dim"))


def embed(backend: EmbeddingBackend, image) -> np.ndarray:
    """Embed one image: final conv map -> spatial mean -> L2 normalize."""
    import torch

    tensor = preprocess_image(image, mean=backend.mean, std=backend.std)
    try:
        with torch.no_grad():
            fmap = backend.module(torch.from_numpy(tensor[None]))
    except Exception as exc:
        raise BackendError(backend.backend_tag, f"inference failed: {exc}") from exc
    arr = fmap.detach().cpu().numpy()
    if arr.ndim != 4 or arr.shape[0] != 1:
        raise BackendError(backend.backend_tag,
                           f"expected (1,C,H,W) output, got {arr.shape}")
    pooled = arr[0].astype(np.float64).mean(axis=(1, 2))
    norm = np.linalg.norm(pooled)
    if norm == 0.0:
        raise BackendError(backend.backend_tag, "zero feature vector")
    vec = (pooled / norm).astype(np.float32)
    if backend.output_dim is not None and vec.shape[0] != backend.output_dim:
        raise BackendError(
            backend.backend_tag,
            f"output dim {vec.shape[0]} != sidecar dim {backend.output_dim}")
    return vec


def embed_manifest(backend: EmbeddingBackend, manifest, root: str | Path | None = None,
                   workers: int = 1, on_error=None) -> FeatureStore:
    """Embed every record with an image path into a feature store.

    Work may run on several threads; the store is assembled in manifest
    order afterwards, so the result does not depend on completion order.
    Per-image failures go to ``on_error(record_id, exception)`` when
    given, otherwise they propagate.
    """
    root = Path(root) if root is not None else None
    todo = [rec for rec in manifest.records if rec.path]

    def _one(rec):
        img_path = Path(rec.path)
        if root is not None and not img_path.is_absolute():
            img_path = root / img_path
        try:
            with Image.open(img_path) as img:
                return rec.id, embed(backend, img)
        except (OSError, DataError) as exc:
            raise DataError(f"cannot embed '{rec.id}': {exc}") from exc

    results: dict[str, np.ndarray] = {}
    failed: set[str] = set()

    def _collect(rec, outcome, error):
        if error is None:
            results[outcome[0]] = outcome[1]
        elif on_error is not None:
            failed.add(rec.id)
            on_error(rec.id, error)
        else:
            raise error

    if workers <= 1:
        for rec in todo:
            try:
                out = _one(rec)
            except Exception as exc:
                _collect(rec, None, exc)
            else:
                _collect(rec, out, None)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [(rec, pool.submit(_one, rec)) for rec in todo]
            for rec, fut in futures:
                try:
                    out = fut.result()
                except Exception as exc:
                    _collect(rec, None, exc)
                else:
                    _collect(rec, out, None)

    dims = {v.shape[0] for v in results.values()}
    if len(dims) > 1:
        raise ShapeError(f"backend produced mixed dims {sorted(dims)}")
    dim = dims.pop() if dims else (backend.output_dim or 1)
    store = FeatureStore(dim=dim, backend_tag=backend.backend_tag)
    for rec in todo:
        if rec.id in results:
            store.add(rec.id, results[rec.id])
    return store
