from __future__ import annotations

import json

import pytest

from most_extract.annotations import convert_coco, convert_voc

VOC_XML = """\
<annotation>
  <filename>{name}.jpg</filename>
  <size><width>{w}</width><height>{h}</height><depth>3</depth></size>
  {objects}
</annotation>
"""

VOC_OBJECT = """\
<object>
  <name>{cls}</name>
  <bndbox><xmin>{x1}</xmin><ymin>{y1}</ymin><xmax>{x2}</xmax><ymax>{y2}</ymax></bndbox>
</object>
"""


def write_voc(root, entries, split="trainval"):
    (root / "Annotations").mkdir(parents=True)
    (root / "ImageSets" / "Main").mkdir(parents=True)
    ids = []
    for name, (w, h), boxes in entries:
        objs = "".join(
            VOC_OBJECT.format(cls="thing", x1=b[0], y1=b[1], x2=b[2], y2=b[3]) for b in boxes
        )
        (root / "Annotations" / f"{name}.xml").write_text(
            VOC_XML.format(name=name, w=w, h=h, objects=objs)
        )
        ids.append(name)
    (root / "ImageSets" / "Main" / f"{split}.txt").write_text("\n".join(ids) + "\n")


class TestVoc:
    def test_split_selection_and_counts(self, tmp_path):
        write_voc(tmp_path, [
            ("000001", (500, 375), [(49, 30, 420, 346)]),
            ("000002", (320, 240), [(1, 1, 100, 100), (50, 60, 200, 200)]),
        ])
        doc = convert_voc(tmp_path, "trainval")
        assert len(doc["images"]) == 2
        assert [e["id"] for e in doc["images"]] == ["000001", "000002"]
        assert doc["images"][1]["boxes"] == [[0, 0, 100, 100], [49, 59, 200, 200]]

    def test_one_based_inclusive_becomes_half_open(self, tmp_path):
        # A VOC box (1,1,10,10) covers pixels 0..9 half-open: (0,0,10,10).
        write_voc(tmp_path, [("img", (20, 20), [(1, 1, 10, 10)])])
        doc = convert_voc(tmp_path)
        assert doc["images"][0]["boxes"] == [[0, 0, 10, 10]]

    def test_malformed_annotation_listed_and_skipped(self, tmp_path):
        write_voc(tmp_path, [("ok", (50, 50), [(1, 1, 20, 20)])])
        (tmp_path / "Annotations" / "broken.xml").write_text("<annotation><size>")
        split = tmp_path / "ImageSets" / "Main" / "trainval.txt"
        split.write_text("ok\nbroken\n")
        doc = convert_voc(tmp_path)
        assert [e["id"] for e in doc["images"]] == ["ok"]
        assert doc["skipped"] == ["broken"]

    def test_only_split_members_converted(self, tmp_path):
        write_voc(tmp_path, [("a", (10, 10), []), ("b", (10, 10), [])], split="test")
        (tmp_path / "ImageSets" / "Main" / "test.txt").write_text("a\n")
        assert [e["id"] for e in convert_voc(tmp_path, "test")["images"]] == ["a"]


def coco_doc():
    return {
        "images": [
            {"id": 10, "file_name": "COCO_train_000010.jpg", "width": 100, "height": 80},
            {"id": 11, "file_name": "COCO_train_000011.jpg", "width": 50, "height": 50},
            {"id": 12, "file_name": "COCO_train_000012.jpg", "width": 60, "height": 60},
        ],
        "annotations": [
            {"image_id": 10, "bbox": [10, 10, 30, 20], "iscrowd": 0},
            {"image_id": 10, "bbox": [0, 0, 5, 5], "iscrowd": 0},
            {"image_id": 11, "bbox": [1, 2, 10, 10], "iscrowd": 0},
            {"image_id": 11, "bbox": [0, 0, 50, 50], "iscrowd": 1},
        ],
    }


class TestCoco:
    def test_bbox_conversion(self, tmp_path):
        path = tmp_path / "instances.json"
        path.write_text(json.dumps(coco_doc()))
        doc = convert_coco(path)
        entry = next(e for e in doc["images"] if e["id"] == "COCO_train_000010")
        assert [10, 10, 40, 30] in entry["boxes"]
        assert len(doc["images"]) == 3

    def test_crowd_annotations_dropped(self, tmp_path):
        path = tmp_path / "instances.json"
        path.write_text(json.dumps(coco_doc()))
        doc = convert_coco(path)
        entry = next(e for e in doc["images"] if e["id"] == "COCO_train_000011")
        assert entry["boxes"] == [[1, 2, 11, 12]]

    def test_split_list_controls_entry_count(self, tmp_path):
        path = tmp_path / "instances.json"
        path.write_text(json.dumps(coco_doc()))
        split = tmp_path / "split.txt"
        split.write_text("COCO_train_000010.jpg\n11\n")
        doc = convert_coco(path, split_list=split)
        assert len(doc["images"]) == 2  # exactly the split lines

    def test_unknown_split_entry_rejected(self, tmp_path):
        path = tmp_path / "instances.json"
        path.write_text(json.dumps(coco_doc()))
        split = tmp_path / "split.txt"
        split.write_text("COCO_train_999999.jpg\n")
        with pytest.raises(KeyError):
            convert_coco(path, split_list=split)
