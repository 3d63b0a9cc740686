"""Console entry points: ``most-extract`` and ``most-gt``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from most_extract import __version__
from most_extract.annotations import convert_coco, convert_voc
from most_extract.features import RESIZE_POLICIES, ExtractConfig, extract_directory
from most_extract.vit import MODEL_CONFIGS, ViTConfig, build_model

logger = logging.getLogger("most_extract")


def main_extract(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="most-extract",
        description="Write one MOSTFEAT file per image using a pretrained backbone.",
    )
    parser.add_argument("--model", default="vit_s16", choices=sorted(MODEL_CONFIGS))
    parser.add_argument("--images", required=True, help="directory of images")
    parser.add_argument("--out", required=True, help="output directory for .mfeat files")
    parser.add_argument("--resize", default="keep", choices=RESIZE_POLICIES)
    parser.add_argument("--weights", help="local checkpoint instead of the published one")
    parser.add_argument(
        "--model-config", dest="model_config",
        help="JSON file overriding the architecture (testing/extension hook)",
    )
    parser.add_argument(
        "--untrained", action="store_true",
        help="randomly initialized backbone (smoke tests only)",
    )
    parser.add_argument("--version", action="version", version=f"most-extract {__version__}")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    if args.model_config:
        with open(args.model_config, encoding="utf-8") as fh:
            arch = ViTConfig(**json.load(fh))
    else:
        arch = args.model
    if args.untrained and not args.weights:
        logger.warning("running with an UNTRAINED backbone; outputs are not meaningful")
    try:
        model = build_model(arch, weights=args.weights, pretrained=not args.untrained)
    except Exception as exc:
        logger.error("could not build model: %s", exc)
        return 1
    result = extract_directory(model, args.images, args.out, ExtractConfig(resize=args.resize))
    return 0 if result["extracted"] else 1


def main_gt(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="most-gt",
        description="Convert dataset annotations to the evaluation ground-truth JSON.",
    )
    parser.add_argument("--format", required=True, choices=("voc", "coco"))
    parser.add_argument("--dataset", help="VOC root directory (voc format)")
    parser.add_argument("--split", default="trainval", help="VOC image-set name")
    parser.add_argument("--annotations", help="COCO instances JSON (coco format)")
    parser.add_argument("--split-list", dest="split_list", help="optional COCO split file")
    parser.add_argument("--out", required=True, help="output JSON path")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.format == "voc":
            if not args.dataset:
                parser.error("--dataset is required for voc")
            doc = convert_voc(args.dataset, args.split)
        else:
            if not args.annotations:
                parser.error("--annotations is required for coco")
            doc = convert_coco(args.annotations, args.split_list)
    except Exception as exc:
        logger.error("conversion failed: %s", exc)
        return 1
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    logger.info("wrote %d image entries to %s", len(doc["images"]), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main_extract())
