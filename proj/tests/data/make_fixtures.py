#!/usr/bin/env python3
"""Regenerates the offline OpenML cache fixtures in tests/data/openml.

11 (balance-scale) is enumerated from its definition. 15 (breast-w) is
converted from the MASS 'biopsy' table (same 699 Wisconsin records), path
given as the first argument.
"""
import csv
import hashlib
import itertools
import json
import sys
from pathlib import Path

OUT = Path(__file__).resolve().parent / "openml"


def write(dataset_id, name, target, arff):
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / f"{dataset_id}.arff").write_text(arff)
    meta = {
        "id": dataset_id,
        "name": name,
        "url": f"https://api.openml.org/data/v1/download/{dataset_id}",
        "format": "ARFF",
        "default_target_attribute": target,
        "md5_checksum": hashlib.md5(arff.encode()).hexdigest(),
    }
    (OUT / f"{dataset_id}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def balance_scale():
    lines = ["@relation balance-scale", ""]
    for a in ["left-weight", "left-distance", "right-weight", "right-distance"]:
        lines.append(f"@attribute '{a}' numeric")
    lines += ["@attribute 'class' {L,B,R}", "", "@data"]
    for lw, ld, rw, rd in itertools.product(range(1, 6), repeat=4):
        left, right = lw * ld, rw * rd
        cls = "L" if left > right else ("B" if left == right else "R")
        lines.append(f"{lw},{ld},{rw},{rd},{cls}")
    write(11, "balance-scale", "class", "\n".join(lines) + "\n")


def breast_w(biopsy_csv):
    names = ["Clump_Thickness", "Cell_Size_Uniformity", "Cell_Shape_Uniformity", "Marginal_Adhesion",
             "Single_Epi_Cell_Size", "Bare_Nuclei", "Bland_Chromatin", "Normal_Nucleoli", "Mitoses"]
    lines = ["@relation wisconsin-breast-cancer", ""]
    lines += [f"@attribute {n} numeric" for n in names]
    lines += ["@attribute Class {benign,malignant}", "", "@data"]
    with open(biopsy_csv, newline="") as f:
        for row in csv.DictReader(f):
            values = [row[f"V{i}"] for i in range(1, 10)]
            values = ["?" if v == "NA" else v for v in values]
            lines.append(",".join(values + [row["class"]]))
    write(15, "breast-w", "Class", "\n".join(lines) + "\n")


if __name__ == "__main__":
    balance_scale()
    if len(sys.argv) > 1:
        breast_w(sys.argv[1])
