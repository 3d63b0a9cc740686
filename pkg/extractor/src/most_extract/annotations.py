"""Dataset annotation conversion to the evaluation ground-truth JSON schema.

Target schema: ``{"images": [{"id", "width", "height",
"boxes": [[x1, y1, x2, y2], ...]}]}`` with half-open pixel boxes.
"""

from __future__ import annotations

import json
import logging
import xml.etree.ElementTree as ET
from pathlib import Path

logger = logging.getLogger(__name__)


def convert_voc(dataset_root, split: str = "trainval") -> dict:
    """VOC-style directory (Annotations/ + ImageSets/Main/<split>.txt) -> schema.

    VOC boxes are 1-based inclusive, converted to 0-based half-open. Malformed
    annotation files are listed and skipped.
    """
    root = Path(dataset_root)
    split_file = root / "ImageSets" / "Main" / f"{split}.txt"
    ids = [line.strip().split()[0] for line in split_file.read_text().splitlines() if line.strip()]

    entries = []
    skipped = []
    for image_id in ids:
        xml_path = root / "Annotations" / f"{image_id}.xml"
        try:
            entries.append(_parse_voc_xml(xml_path, image_id))
        except Exception as exc:
            logger.warning("skipped %s: %s", xml_path.name, exc)
            skipped.append(image_id)
    doc = {"images": sorted(entries, key=lambda e: e["id"])}
    if skipped:
        doc["skipped"] = skipped
    return doc


def _parse_voc_xml(xml_path: Path, image_id: str) -> dict:
    tree = ET.parse(xml_path)
    size = tree.find("size")
    width = int(size.findtext("width"))
    height = int(size.findtext("height"))
    boxes = []
    for obj in tree.iter("object"):
        bb = obj.find("bndbox")
        x1 = int(float(bb.findtext("xmin"))) - 1
        y1 = int(float(bb.findtext("ymin"))) - 1
        x2 = int(float(bb.findtext("xmax")))
        y2 = int(float(bb.findtext("ymax")))
        boxes.append([max(0, x1), max(0, y1), min(x2, width), min(y2, height)])
    return {"id": image_id, "width": width, "height": height, "boxes": boxes}


def convert_coco(annotations_json, split_list=None) -> dict:
    """COCO instances JSON -> schema, optionally restricted to a split list.

    The split list holds one image per line, either the numeric id or the
    file name; the output carries exactly one entry per split line. COCO
    ``bbox`` is [x, y, w, h], converted to half-open corners.
    """
    with open(annotations_json, encoding="utf-8") as fh:
        coco = json.load(fh)

    by_id: dict[int, dict] = {}
    stem_to_id: dict[str, int] = {}
    for image in coco["images"]:
        by_id[image["id"]] = {
            "id": Path(image["file_name"]).stem,
            "width": image["width"],
            "height": image["height"],
            "boxes": [],
        }
        stem_to_id[Path(image["file_name"]).stem] = image["id"]

    for ann in coco.get("annotations", []):
        entry = by_id.get(ann["image_id"])
        if entry is None or ann.get("iscrowd"):
            continue
        x, y, w, h = ann["bbox"]
        box = [
            max(0, int(x)), max(0, int(y)),
            min(int(x + w + 0.5), entry["width"]), min(int(y + h + 0.5), entry["height"]),
        ]
        if box[0] < box[2] and box[1] < box[3]:
            entry["boxes"].append(box)

    if split_list is not None:
        wanted = []
        for line in Path(split_list).read_text().splitlines():
            token = line.strip()
            if not token:
                continue
            if token.isdigit():
                wanted.append(int(token))
            else:
                stem = Path(token).stem
                if stem not in stem_to_id:
                    raise KeyError(f"split entry {token!r} not in annotation file")
                wanted.append(stem_to_id[stem])
        missing = [i for i in wanted if i not in by_id]
        if missing:
            raise KeyError(f"split ids not in annotation file: {missing[:5]}")
        entries = [by_id[i] for i in wanted]
    else:
        entries = list(by_id.values())

    return {"images": sorted(entries, key=lambda e: e["id"])}
