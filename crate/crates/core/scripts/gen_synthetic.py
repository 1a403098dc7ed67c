#!/usr/bin/env python3
"""Regenerate fixtures/synthetic/{ontology.obo,labeled.jsonl}.

Two disease groups, each split into subgroups of leaf terms. Every case gets
its own leaf and carries that leaf's synonym as a keyword, so without the
ontology no two cases share a diagnosis or a disease keyword. Ages, stages
and the remaining keywords are drawn independently of the label. A small
share of cases is labeled against its group.
"""
import json
import pathlib
import random

SEED = 20261017
GROUPS = {"A": "alpha", "B": "beta"}
SUBGROUPS = 5
LEAVES = 20
FLIP_RATE = 0.08
NOISE = [
    "fatigue", "weight loss", "fever", "night sweats", "nausea", "headache",
    "anemia", "cough", "back pain", "insomnia", "pruritus", "dizziness",
]
STAGES = ["I", "IIa", "IIb", "IIIa", "IIIb", "IV"]

out = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "synthetic"
out.mkdir(parents=True, exist_ok=True)
rng = random.Random(SEED)

obo = [
    "format-version: 1.2",
    "ontology: synthetic-two-group",
    "",
    "[Term]\nid: SYN:0000\nname: disease\n",
]
leaves = []
for g, word in GROUPS.items():
    gid = f"SYN:{g}000"
    obo.append(f"[Term]\nid: {gid}\nname: {word} disorder\nis_a: SYN:0000 ! disease\n")
    for s in range(1, SUBGROUPS + 1):
        sid = f"SYN:{g}{s}00"
        obo.append(f"[Term]\nid: {sid}\nname: {word} disorder type {s}\nis_a: {gid}\n")
        for leaf in range(1, LEAVES + 1):
            lid = f"SYN:{g}{s}{leaf:02d}"
            syn = f"{word[0]}{s}{leaf:02d} syndrome"
            obo.append(
                f"[Term]\nid: {lid}\nname: {word} disorder variant {s}-{leaf}\n"
                f'synonym: "{syn}" EXACT []\nis_a: {sid}\n'
            )
            leaves.append((g, lid, syn))
(out / "ontology.obo").write_text("\n".join(obo))

rng.shuffle(leaves)
with open(out / "labeled.jsonl", "w") as f:
    for n, (g, lid, syn) in enumerate(leaves):
        positive = g == "A"
        if rng.random() < FLIP_RATE:
            positive = not positive
        case = {
            "case_id": f"S{n:03d}",
            "environment": {
                "age": rng.randint(30, 80),
                "sex": rng.choice(["male", "female"]),
                "findings": sorted(rng.sample(NOISE, 2)),
            },
            "problem": {"keywords": sorted([syn] + rng.sample(NOISE, 1))},
            "diagnosis": {"term_id": lid, "stage": rng.choice(STAGES)},
        }
        row = {"label": "positive" if positive else "negative", "case": case}
        f.write(json.dumps(row) + "\n")
print(f"{len(leaves)} cases written to {out}")
