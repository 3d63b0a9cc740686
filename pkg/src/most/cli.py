"""Command-line interface: ``most localize | eval | viz | discover``.

Owns every on-disk schema:

* boxes JSON: ``{"images": {image_id: [{x1,y1,x2,y2,pool_id,core_token,
  pool_size}, ...]}, "errors": {image_id: reason}}``, canonically sorted and
  byte-identical across runs and worker counts.
* ground-truth JSON: ``{"images": [{"id", "width", "height",
  "boxes": [[x1,y1,x2,y2], ...]}]}``.
* metrics JSON: ``{"corloc", "recall_at_k": {k: value},
  "mean_boxes_per_image", "num_images"}``.
* discovery labels JSON: ``{"k", "k_values", "inertias",
  "regions": [{"image_id", "box", "cluster"}]}``.

``MOST_WORKERS`` overrides ``--workers``. Every flag can be captured with
``--print-config`` and replayed with ``--config``.
"""

from __future__ import annotations

import argparse
import base64
import json
import logging
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from most import __version__, discovery
from most.boxer import BoxerConfig, localize_image
from most.eba import EbaConfig
from most.feature_store import read_feature_file
from most.metrics import EvalRecord, corloc, mean_boxes_per_image, recall_at_k
from most.pooler import ClusterConfig

logger = logging.getLogger("most")

_UNSET = object()

PALETTE = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
    "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080",
    "#9a6324", "#800000", "#808000", "#000075", "#e6beff",
]

_REGION_STEM = re.compile(r"^(?P<image>.+)__(?P<x1>\d+)_(?P<y1>\d+)_(?P<x2>\d+)_(?P<y2>\d+)$")


class SchemaError(ValueError):
    """Schema violation with a JSON-path diagnostic."""


def canonical_json(doc) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# flag plumbing: builtin defaults < --config file < explicit flags


_DEFAULTS: dict[str, dict[str, object]] = {
    "localize": {
        "input": None,
        "output": "boxes.json",
        "kernels": [1, 2, 3, 4, 5],
        "tau_a": 1.0,
        "tau_b": 0.5,
        "bins": 256,
        "eps": 2,
        "min_pts": 1,
        "cluster_metric": "manhattan",
        "min_area": 256,
        "whole_image_frac": 0.95,
        "connectivity": 4,
        "workers": 1,
        "seed": 0,
    },
    "eval": {
        "pred": None,
        "gt": None,
        "iou_thresh": 0.5,
        "recall_ks": [1, 10, 100],
        "output": None,
    },
    "viz": {
        "boxes": None,
        "images": None,
        "out": "overlays",
    },
    "discover": {
        "regions": None,
        "output": "labels.json",
        "k_range": "2:150:8",
        "seed": 0,
        "sample_size": 10000,
        "restarts": 4,
    },
}


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _resolve(args: argparse.Namespace, command: str) -> dict:
    cfg = dict(_DEFAULTS[command])
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            loaded = json.load(fh)
        for key, value in loaded.items():
            if key in ("command",):
                continue
            if key not in cfg:
                raise SchemaError(f"{config_path}: unknown config key {key!r}")
            cfg[key] = value
    for key in cfg:
        value = getattr(args, key, _UNSET)
        if value is not _UNSET and value is not None:
            cfg[key] = value
    return cfg


def _print_config(cfg: dict, command: str) -> int:
    doc = {"command": command, **cfg}
    sys.stdout.write(canonical_json(doc).decode("utf-8"))
    return 0


def _pipeline_configs(cfg: dict) -> tuple[EbaConfig, ClusterConfig, BoxerConfig]:
    return (
        EbaConfig(
            kernels=tuple(cfg["kernels"]),
            tau_a=float(cfg["tau_a"]),
            tau_b=float(cfg["tau_b"]),
            bins=int(cfg["bins"]),
        ),
        ClusterConfig(
            epsilon=int(cfg["eps"]),
            min_pts=int(cfg["min_pts"]),
            metric=cfg["cluster_metric"],
        ),
        BoxerConfig(
            min_area=int(cfg["min_area"]),
            whole_image_fraction=float(cfg["whole_image_frac"]),
            connectivity=int(cfg["connectivity"]),
        ),
    )


# ---------------------------------------------------------------------------
# localize


def _localize_one(task) -> tuple[str, list[dict]]:
    path, eba_cfg, cluster_cfg, boxer_cfg = task
    fmap = read_feature_file(path)
    boxes = localize_image(fmap, eba_cfg, cluster_cfg, boxer_cfg)
    return Path(path).stem, [b.to_dict() for b in boxes]


def cmd_localize(cfg: dict) -> int:
    input_dir = Path(cfg["input"])
    files = sorted(input_dir.glob("*.mfeat"))
    if not files:
        logger.error("no inputs: no .mfeat files in %s", input_dir)
        return 2

    eba_cfg, cluster_cfg, boxer_cfg = _pipeline_configs(cfg)
    workers = int(os.environ.get("MOST_WORKERS", cfg["workers"]))
    tasks = [(str(path), eba_cfg, cluster_cfg, boxer_cfg) for path in files]

    images: dict[str, list[dict]] = {}
    errors: dict[str, str] = {}
    if workers <= 1:
        for task in tasks:
            image_id = Path(task[0]).stem
            try:
                image_id, boxes = _localize_one(task)
                images[image_id] = boxes
            except Exception as exc:  # per-image failures never abort the batch
                errors[image_id] = str(exc)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_localize_one, task): Path(task[0]).stem for task in tasks}
            for future, image_id in futures.items():
                try:
                    image_id, boxes = future.result()
                    images[image_id] = boxes
                except Exception as exc:
                    errors[image_id] = str(exc)

    doc = {"images": images, "errors": errors}
    Path(cfg["output"]).write_bytes(canonical_json(doc))
    logger.info(
        "localized %d/%d images -> %s", len(images), len(files), cfg["output"]
    )
    if not images:
        logger.error("all %d inputs failed", len(files))
        return 1
    return 0


# ---------------------------------------------------------------------------
# eval


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(f"{path}: {message}")


def load_ground_truth(path) -> dict[str, dict]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    _require(isinstance(doc, dict), "$", "expected an object")
    _require(isinstance(doc.get("images"), list), "$.images", "expected a list")
    out: dict[str, dict] = {}
    for i, entry in enumerate(doc["images"]):
        where = f"$.images[{i}]"
        _require(isinstance(entry, dict), where, "expected an object")
        for key in ("id", "width", "height", "boxes"):
            _require(key in entry, f"{where}.{key}", "missing field")
        _require(isinstance(entry["boxes"], list), f"{where}.boxes", "expected a list")
        for j, box in enumerate(entry["boxes"]):
            _require(
                isinstance(box, list) and len(box) == 4,
                f"{where}.boxes[{j}]",
                "expected [x1, y1, x2, y2]",
            )
            x1, y1, x2, y2 = box
            _require(
                x1 < x2 and y1 < y2,
                f"{where}.boxes[{j}]",
                "expected x1 < x2 and y1 < y2",
            )
            _require(
                x1 >= 0 and y1 >= 0 and x2 <= entry["width"] and y2 <= entry["height"],
                f"{where}.boxes[{j}]",
                f"box exceeds the {entry['width']}x{entry['height']} image",
            )
        out[str(entry["id"])] = entry
    return out


def load_predictions(path) -> dict[str, list[dict]]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    _require(isinstance(doc, dict), "$", "expected an object")
    _require(isinstance(doc.get("images"), dict), "$.images", "expected an object")
    for image_id, boxes in doc["images"].items():
        where = f"$.images.{image_id}"
        _require(isinstance(boxes, list), where, "expected a list")
        for j, box in enumerate(boxes):
            _require(isinstance(box, dict), f"{where}[{j}]", "expected an object")
            for key in ("x1", "y1", "x2", "y2", "pool_id", "core_token", "pool_size"):
                _require(key in box, f"{where}[{j}].{key}", "missing field")
    return doc["images"]


def _to_bounding_boxes(dicts: list[dict]):
    from most.boxer import BoundingBox

    return [
        BoundingBox(
            d["x1"], d["y1"], d["x2"], d["y2"],
            d["pool_id"], d["core_token"], d["pool_size"],
        )
        for d in dicts
    ]


def cmd_eval(cfg: dict) -> int:
    preds = load_predictions(cfg["pred"])
    gts = load_ground_truth(cfg["gt"])
    if not set(preds) & set(gts):
        logger.error("prediction and ground-truth image ids do not overlap")
        return 1

    records = [
        EvalRecord(
            image_id=image_id,
            predictions=_to_bounding_boxes(preds.get(image_id, [])),
            ground_truth=[tuple(b) for b in entry["boxes"]],
        )
        for image_id, entry in sorted(gts.items())
        if entry["boxes"]
    ]
    thresh = float(cfg["iou_thresh"])
    ks = [int(k) for k in cfg["recall_ks"]]
    report = {
        "corloc": corloc(records, thresh),
        "recall_at_k": {str(k): recall_at_k(records, k, thresh) for k in ks},
        "mean_boxes_per_image": mean_boxes_per_image([len(b) for b in preds.values()]),
        "num_images": len(records),
    }

    print(f"{'corloc':<24}{report['corloc']:.4f}")
    for k in ks:
        print(f"{f'recall@{k}':<24}{report['recall_at_k'][str(k)]:.4f}")
    print(f"{'mean_boxes_per_image':<24}{report['mean_boxes_per_image']:.4f}")
    print(f"{'num_images':<24}{report['num_images']}")

    if cfg["output"]:
        Path(cfg["output"]).write_bytes(canonical_json(report))
    return 0


# ---------------------------------------------------------------------------
# viz


_MIME = {"JPEG": "image/jpeg", "PNG": "image/png", "GIF": "image/gif", "BMP": "image/bmp"}


def _find_image(images_dir: Path, image_id: str) -> Path | None:
    for ext in (".jpg", ".jpeg", ".png", ".gif", ".bmp", ".JPG", ".PNG"):
        cand = images_dir / f"{image_id}{ext}"
        if cand.exists():
            return cand
    return None


def render_svg(image_path: Path, boxes: list[dict]) -> str:
    from PIL import Image

    with Image.open(image_path) as img:
        width, height = img.size
        mime = _MIME.get(img.format or "", "application/octet-stream")
    payload = base64.b64encode(image_path.read_bytes()).decode("ascii")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'  <image width="{width}" height="{height}" href="data:{mime};base64,{payload}"/>',
    ]
    for box in boxes:
        color = PALETTE[box["pool_id"] % len(PALETTE)]
        parts.append(
            f'  <rect x="{box["x1"]}" y="{box["y1"]}" width="{box["x2"] - box["x1"]}" '
            f'height="{box["y2"] - box["y1"]}" fill="none" stroke="{color}" stroke-width="3"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_viz(cfg: dict) -> int:
    preds = load_predictions(cfg["boxes"])
    images_dir = Path(cfg["images"])
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for image_id, boxes in sorted(preds.items()):
        image_path = _find_image(images_dir, image_id)
        if image_path is None:
            logger.warning("no image file for %s, skipped", image_id)
            continue
        (out_dir / f"{image_id}.svg").write_text(render_svg(image_path, boxes))
        written += 1
    logger.info("wrote %d overlays to %s", written, out_dir)
    return 0


# ---------------------------------------------------------------------------
# discover


def load_regions(regions_dir: Path) -> list[discovery.RegionFeature]:
    """Region descriptors: 1x1-grid MOSTFEAT files, box encoded in the name.

    A stem ``<image_id>__<x1>_<y1>_<x2>_<y2>`` carries the source box; any
    other stem is treated as a bare region id with no box.
    """
    regions = []
    for path in sorted(regions_dir.glob("*.mfeat")):
        fmap = read_feature_file(path)
        if fmap.n_tokens != 1:
            raise SchemaError(f"{path}: region descriptor must have a 1x1 grid")
        match = _REGION_STEM.match(path.stem)
        if match:
            image_id = match.group("image")
            box = tuple(int(match.group(g)) for g in ("x1", "y1", "x2", "y2"))
        else:
            image_id, box = path.stem, None
        regions.append(discovery.RegionFeature(image_id, box, fmap.data[0]))
    return regions


def _parse_k_range(text: str) -> list[int]:
    parts = [int(tok) for tok in str(text).split(":")]
    if len(parts) == 2:
        start, stop, step = parts[0], parts[1], 1
    elif len(parts) == 3:
        start, stop, step = parts
    else:
        raise SchemaError(f"--k-range expects start:stop[:step], got {text!r}")
    if start < 1 or stop < start or step < 1:
        raise SchemaError(f"invalid k range {text!r}")
    return list(range(start, stop + 1, step))


def cmd_discover(cfg: dict) -> int:
    regions = load_regions(Path(cfg["regions"]))
    if not regions:
        logger.error("no inputs: no .mfeat region files in %s", cfg["regions"])
        return 2
    dims = {r.vector.shape[0] for r in regions}
    if len(dims) > 1:
        logger.error("region descriptors have mixed dimensions: %s", sorted(dims))
        return 1

    seed = int(cfg["seed"])
    sample = discovery.subsample(regions, m=int(cfg["sample_size"]), seed=seed)
    matrix = np.stack([r.vector for r in sample]).astype(np.float64)
    k_values = [k for k in _parse_k_range(cfg["k_range"]) if k <= len(sample)]
    if len(k_values) < 3:
        logger.error(
            "need at least 3 usable k values <= %d regions; got %s", len(sample), k_values
        )
        return 1

    restarts = int(cfg["restarts"])
    inertias = discovery.inertia_curve(matrix, k_values, seed=seed, restarts=restarts)
    best_k = discovery.kneedle(k_values, inertias)
    model = discovery.kmeans_best_of(matrix, best_k, seed=seed, restarts=restarts)

    all_matrix = np.stack([r.vector for r in regions]).astype(np.float64)
    labels = discovery.assign(all_matrix, model.centroids)

    doc = {
        "k": int(best_k),
        "k_values": k_values,
        "inertias": inertias,
        "regions": [
            {
                "image_id": r.image_id,
                "box": list(r.box) if r.box is not None else None,
                "cluster": int(lab),
            }
            for r, lab in zip(regions, labels)
        ],
    }
    Path(cfg["output"]).write_bytes(canonical_json(doc))
    logger.info("clustered %d regions into %d groups -> %s", len(regions), best_k, cfg["output"])
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="most", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"most {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config produced by --print-config")
        p.add_argument(
            "--print-config", action="store_true",
            help="print the resolved configuration as replayable JSON and exit",
        )

    p = sub.add_parser("localize", help="run the box pipeline over a feature directory")
    p.add_argument("--input", help="directory of .mfeat files")
    p.add_argument("--output", help="boxes JSON path")
    p.add_argument("--kernels", type=_int_list, help="pooling sizes, e.g. 1,2,3,4,5")
    p.add_argument("--tau-a", dest="tau_a", type=float, help="entropy threshold intercept")
    p.add_argument("--tau-b", dest="tau_b", type=float, help="entropy threshold slope")
    p.add_argument("--bins", type=int, help="histogram bins for the entropy pmf")
    p.add_argument("--eps", type=int, help="clustering neighborhood radius")
    p.add_argument("--min-pts", dest="min_pts", type=int, help="clustering core density")
    p.add_argument(
        "--cluster-metric", dest="cluster_metric", choices=("manhattan", "chebyshev"),
        help="clustering distance",
    )
    p.add_argument("--min-area", dest="min_area", type=int, help="minimum box area, px")
    p.add_argument(
        "--whole-image-frac", dest="whole_image_frac", type=float,
        help="drop boxes covering at least this image fraction",
    )
    p.add_argument("--connectivity", type=int, choices=(4, 8), help="island connectivity")
    p.add_argument("--workers", type=int, help="parallel workers (MOST_WORKERS overrides)")
    p.add_argument("--seed", type=int, help="reserved for config replay")
    add_common(p)

    p = sub.add_parser("eval", help="score predicted boxes against ground truth")
    p.add_argument("--pred", help="boxes JSON from localize")
    p.add_argument("--gt", help="ground-truth JSON")
    p.add_argument("--iou-thresh", dest="iou_thresh", type=float, help="match threshold")
    p.add_argument("--recall-ks", dest="recall_ks", type=_int_list, help="recall cutoffs")
    p.add_argument("--output", help="optional metrics JSON path")
    add_common(p)

    p = sub.add_parser("viz", help="render SVG overlays of predicted boxes")
    p.add_argument("--boxes", help="boxes JSON from localize")
    p.add_argument("--images", help="directory of source images")
    p.add_argument("--out", help="output directory for .svg files")
    add_common(p)

    p = sub.add_parser("discover", help="group region descriptors into clusters")
    p.add_argument("--regions", help="directory of 1x1-grid .mfeat descriptors")
    p.add_argument("--output", help="labels JSON path")
    p.add_argument("--k-range", dest="k_range", help="start:stop[:step] cluster counts")
    p.add_argument("--seed", type=int, help="sampling and clustering seed")
    p.add_argument("--sample-size", dest="sample_size", type=int, help="subsample cap")
    p.add_argument("--restarts", type=int, help="k-means restarts per k")
    add_common(p)

    return parser


_COMMANDS = {
    "localize": cmd_localize,
    "eval": cmd_eval,
    "viz": cmd_viz,
    "discover": cmd_discover,
}

_REQUIRED = {
    "localize": ("input",),
    "eval": ("pred", "gt"),
    "viz": ("boxes", "images"),
    "discover": ("regions",),
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = _resolve(args, args.command)
        if args.print_config:
            return _print_config(cfg, args.command)
        for key in _REQUIRED[args.command]:
            if not cfg.get(key):
                logger.error("--%s is required", key.replace("_", "-"))
                return 2
        return _COMMANDS[args.command](cfg)
    except SchemaError as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
