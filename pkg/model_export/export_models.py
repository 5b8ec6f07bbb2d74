#!/usr/bin/env python3
"""Convert torchvision backbones to the relfilter embedding format.

Truncates VGG16 or ResNet-50 after the last convolutional stage,
saves the trunk as TorchScript next to a preprocessing sidecar, and can
verify numerical parity between the source framework and the relfilter
embedder on a directory of sample images.

The relfilter package is deliberately NOT imported; the verification
path talks to it the way any consumer would, through the `relfilter
embed` subprocess and the published feature-store file format.

Usage:
    python3 export_models.py --backbone resnet50 --out models/ \
        --verify fixtures/images/

Without --pretrained the backbone keeps deterministic random weights
(seeded), which is enough for parity checking and for tests that must
not download anything. Pass --pretrained to export the ImageNet
weights for real use.
"""

from __future__ import annotations

import argparse
import json
import struct
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import torch
import torchvision
from PIL import Image

BACKBONES = ("vgg16", "resnet50")
CHANNELS = {"vgg16": 512, "resnet50": 2048}
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)
PARITY_TOLERANCE = 1e-3
LANDSCAPE = (768, 512)  # (width, height); square images count as landscape


class UsageError(Exception):
    pass


class ParityError(Exception):
    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


def build_backbone(name: str, pretrained: bool = False,
                   seed: int = 0) -> torch.nn.Module:
    """Eager trunk ending at the last conv stage, in eval mode.

    Seeding before construction makes the random-weight variant
    reproducible, so a verifier can rebuild the exact exported net.
    """
    torch.manual_seed(seed)
    if name == "vgg16":
        net = torchvision.models.vgg16(
            weights="IMAGENET1K_V1" if pretrained else None)
        # features[:30] stops after conv5_3 + ReLU, before the final pool
        trunk = net.features[:30]
    elif name == "resnet50":
        net = torchvision.models.resnet50(
            weights="IMAGENET1K_V1" if pretrained else None)
        trunk = torch.nn.Sequential(net.conv1, net.bn1, net.relu, net.maxpool,
                                    net.layer1, net.layer2, net.layer3,
                                    net.layer4)
    else:
        raise UsageError(f"unsupported backbone '{name}'; "
                         f"choose from {BACKBONES}")
    return trunk.eval()


def export_backbone(name: str, out_dir: str | Path, pretrained: bool = False,
                    seed: int = 0) -> tuple[Path, Path]:
    """Write <name>.pt (TorchScript) and its .json sidecar; returns paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trunk = build_backbone(name, pretrained=pretrained, seed=seed)
    scripted = torch.jit.script(trunk)
    model_path = out_dir / f"{name}.pt"
    scripted.save(str(model_path))
    sidecar = {
        "backend_tag": name,
        "mean": list(IMAGENET_MEAN),
        "std": list(IMAGENET_STD),
        "output_dim": CHANNELS[name],
        "interchange": "torchscript-v1",
        "source": "torchvision",
        "pretrained": pretrained,
        "seed": seed,
        "truncation": "last conv stage, pre-pool",
    }
    sidecar_path = out_dir / f"{name}.pt.json"
    sidecar_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True)
                            + "\n", encoding="utf-8")
    return model_path, sidecar_path


# --------------------------------------------------------- source-side embed


def preprocess(img: Image.Image, mean, std) -> torch.Tensor:
    """Replicates the documented relfilter preprocessing contract."""
    if img.mode != "RGB":
        img = img.convert("RGB")
    w, h = img.size
    target = LANDSCAPE if w >= h else (LANDSCAPE[1], LANDSCAPE[0])
    img = img.resize(target, Image.BILINEAR)
    arr = np.asarray(img, dtype=np.float32) / 255.0
    arr = (arr - np.asarray(mean, dtype=np.float32)) / np.asarray(
        std, dtype=np.float32)
    return torch.from_numpy(np.ascontiguousarray(arr.transpose(2, 0, 1)))


def pooled_feature(module: torch.nn.Module, img: Image.Image,
                   mean, std) -> np.ndarray:
    """Forward, average-pool over space, L2-normalize; float32 vector."""
    with torch.no_grad():
        fmap = module(preprocess(img, mean, std)[None, :])
    pooled = fmap[0].numpy().astype(np.float64).mean(axis=(1, 2))
    norm = np.linalg.norm(pooled)
    if norm > 0.0:
        pooled /= norm
    return pooled.astype(np.float32)


# -------------------------------------------------- relfilter-side interface


def read_feature_store(path: Path) -> dict[str, np.ndarray]:
    """Parse the published FVS1 binary layout into id -> float32 vector."""
    raw = path.read_bytes()
    if raw[:4] != b"FVS1":
        raise UsageError(f"{path} is not a feature store")
    version, count, dim = struct.unpack_from("<III", raw, 4)
    if version != 1:
        raise UsageError(f"unsupported store version {version}")
    out = {}
    offset = 16
    for _ in range(count):
        (id_len,) = struct.unpack_from("<H", raw, offset)
        offset += 2
        item_id = raw[offset:offset + id_len].decode("utf-8")
        offset += id_len
        vec = np.frombuffer(raw, dtype="<f4", count=dim, offset=offset)
        offset += 4 * dim
        out[item_id] = vec.copy()
    return out


def run_relfilter_embed(model_path: Path, images: list[Path], workdir: Path,
                        relfilter_cmd=("relfilter",)) -> dict[str, np.ndarray]:
    manifest_path = workdir / "manifest.jsonl"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        for img_path in images:
            fh.write(json.dumps({"id": img_path.name,
                                 "path": str(img_path.resolve())}) + "\n")
    store_path = workdir / "features.fvs"
    cmd = list(relfilter_cmd) + ["embed", "--model", str(model_path),
                                 "--manifest", str(manifest_path),
                                 "--out", str(store_path)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"relfilter embed failed ({proc.returncode}):\n"
                           f"{proc.stderr}")
    return read_feature_store(store_path)


# --------------------------------------------------------------- verification


def list_images(images_dir: str | Path) -> list[Path]:
    images_dir = Path(images_dir)
    if not images_dir.is_dir():
        raise UsageError(f"image directory does not exist: {images_dir}")
    exts = {".png", ".jpg", ".jpeg", ".bmp", ".webp"}
    images = sorted(p for p in images_dir.iterdir()
                    if p.suffix.lower() in exts)
    if not images:
        raise UsageError(f"no images found in {images_dir}")
    return images


def verify_parity(model_path: str | Path, images_dir: str | Path,
                  relfilter_cmd=("relfilter",)) -> dict:
    """Compare source-framework features with the relfilter embedder.

    The source side always normalizes with the canonical torchvision
    constants, while relfilter follows the sidecar; a sidecar that
    misstates the preprocessing therefore shows up as a deviation.
    Returns a report dict; raises ParityError (report attached) when any
    image deviates by PARITY_TOLERANCE or more.
    """
    model_path = Path(model_path)
    images = list_images(images_dir)
    sidecar = json.loads(
        Path(str(model_path) + ".json").read_text(encoding="utf-8"))
    trunk = build_backbone(sidecar["backend_tag"],
                           pretrained=sidecar.get("pretrained", False),
                           seed=sidecar.get("seed", 0))

    with tempfile.TemporaryDirectory() as tmp:
        theirs = run_relfilter_embed(model_path, images, Path(tmp),
                                     relfilter_cmd)
    per_image = {}
    for img_path in images:
        if img_path.name not in theirs:
            raise RuntimeError(f"relfilter produced no vector for "
                               f"{img_path.name}")
        with Image.open(img_path) as img:
            ours = pooled_feature(trunk, img, IMAGENET_MEAN, IMAGENET_STD)
        got = theirs[img_path.name]
        if got.shape != ours.shape:
            raise RuntimeError(f"dimension mismatch for {img_path.name}: "
                               f"{got.shape} vs {ours.shape}")
        per_image[img_path.name] = float(np.abs(got - ours).max())

    report = {
        "model": str(model_path),
        "images": len(images),
        "dim": int(theirs[images[0].name].shape[0]),
        "tolerance": PARITY_TOLERANCE,
        "max_abs_dev": max(per_image.values()),
        "per_image": per_image,
    }
    if report["max_abs_dev"] >= PARITY_TOLERANCE:
        worst = sorted(per_image.items(), key=lambda kv: -kv[1])[:5]
        lines = ", ".join(f"{name}: {dev:.3e}" for name, dev in worst)
        raise ParityError(
            f"parity failure: max |delta| {report['max_abs_dev']:.3e} "
            f">= {PARITY_TOLERANCE} (worst: {lines})", report)
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--backbone", choices=BACKBONES, required=True)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--verify", default=None,
                        help="directory of sample images for a parity check")
    parser.add_argument("--pretrained", action="store_true",
                        help="export ImageNet weights instead of seeded "
                             "random initialization")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--relfilter", default="relfilter",
                        help="relfilter executable for the parity check")
    args = parser.parse_args(argv)

    try:
        model_path, sidecar_path = export_backbone(
            args.backbone, args.out, pretrained=args.pretrained,
            seed=args.seed)
        print(f"wrote {model_path} and {sidecar_path.name}")
        if args.verify:
            report = verify_parity(model_path, args.verify,
                                   relfilter_cmd=(args.relfilter,))
            print(json.dumps(report, indent=2, sort_keys=True))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(json.dumps(exc.report, indent=2, sort_keys=True),
              file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
