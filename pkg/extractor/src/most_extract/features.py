"""Image -> MOSTFEAT extraction pipeline.

Resize policy, patch-multiple padding, a single deterministic forward pass,
and one ``.mfeat`` file per image. Recorded image dimensions are the
pre-padding (post-resize) pixel size, so padding slack clips away at the
image boundary downstream.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from most_extract.mfeat import write_mfeat
from most_extract.vit import VisionTransformer

logger = logging.getLogger(__name__)

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)
RESIZE_POLICIES = ("keep", "short480")
IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".gif"}


@dataclass(frozen=True)
class ExtractConfig:
    resize: str = "keep"

    def __post_init__(self):
        if self.resize not in RESIZE_POLICIES:
            raise ValueError(f"resize must be one of {RESIZE_POLICIES}")


def load_image(path, resize: str = "keep") -> Image.Image:
    img = Image.open(path).convert("RGB")
    if resize == "short480":
        w, h = img.size
        scale = 480 / min(w, h)
        img = img.resize((round(w * scale), round(h * scale)), Image.BICUBIC)
    return img


def to_padded_tensor(img: Image.Image, patch: int) -> tuple[torch.Tensor, int, int]:
    """Normalize and zero-pad bottom/right so both sides are patch multiples.

    Returns the (1, 3, H', W') tensor plus the pre-padding pixel size.
    """
    arr = np.asarray(img, dtype=np.float32) / 255.0
    arr = (arr - np.array(IMAGENET_MEAN, dtype=np.float32)) / np.array(
        IMAGENET_STD, dtype=np.float32
    )
    h, w = arr.shape[:2]
    pad_h = (-h) % patch
    pad_w = (-w) % patch
    if pad_h or pad_w:
        arr = np.pad(arr, ((0, pad_h), (0, pad_w), (0, 0)))
    tensor = torch.from_numpy(arr).permute(2, 0, 1).unsqueeze(0)
    return tensor, h, w


@torch.no_grad()
def extract_image(model: VisionTransformer, path, cfg: ExtractConfig, out_path) -> dict:
    """Extract one image to a MOSTFEAT file; returns the written geometry."""
    img = load_image(path, cfg.resize)
    patch = model.cfg.patch_size
    tensor, img_h, img_w = to_padded_tensor(img, patch)
    keys, grid_h, grid_w = model.last_layer_keys(tensor)
    data = keys[0].cpu().numpy().astype(np.float32)
    write_mfeat(out_path, data, grid_h, grid_w, patch, img_h, img_w)
    return {
        "grid_h": grid_h, "grid_w": grid_w, "dim": data.shape[1],
        "patch": patch, "img_h": img_h, "img_w": img_w,
    }


def extract_directory(model: VisionTransformer, images_dir, out_dir, cfg: ExtractConfig) -> dict:
    """Extract every readable image; unreadable files are logged and skipped."""
    images_dir, out_dir = Path(images_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    done, skipped = 0, []
    files = sorted(
        p for p in images_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
    )
    for path in files:
        try:
            extract_image(model, path, cfg, out_dir / f"{path.stem}.mfeat")
            done += 1
        except Exception as exc:
            logger.warning("skipped %s: %s", path.name, exc)
            skipped.append(path.name)
    logger.info("extracted %d images, skipped %d", done, len(skipped))
    return {"extracted": done, "skipped": skipped}
