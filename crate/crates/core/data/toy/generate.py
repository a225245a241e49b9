"""Regenerates the toy fixtures in this directory. Deterministic."""

import json
import math
import random
from pathlib import Path

HERE = Path(__file__).parent
DIM = 16

SEEDS = [
    l.split("\t")[2].split(",") if l.count("\t") >= 2 else [l.split("\t")[0]]
    for l in (HERE.parent / "seeds.txt").read_text().splitlines()
    if l and not l.startswith("#")
]
SEED_FORMS = [f for forms in SEEDS for f in forms]

SHARED = [
    "questionable", "speculative", "unsubstantiated", "contradicting", "unresolved",
    "disputed", "unproven", "equivocal", "enigmatic", "unconfirmed", "problematic",
    "doubtfully", "contested",
]
ONLY = {
    "google-toy": ["strange", "weird", "odd", "confused", "mistaken"],
    "pubmed-toy": ["nonsignificant", "heterogeneous", "discordant", "conflicting_results", "equivocally"],
}
NEAR = ["consistent", "certain", "clear", "expected", "known"]
FILLER = """protein cell river table gene enzyme patient dose tumor liver kidney
heart membrane receptor ligand plasma serum sample cohort trial mouse rat
model network signal pathway neuron cortex brain muscle bone blood vessel
tissue culture medium buffer assay antibody antigen vaccine virus bacteria
strain species habitat forest soil water carbon nitrogen oxygen energy solar
wind turbine engine metal alloy crystal polymer fiber concrete bridge road
city market price stock bank loan credit policy school student teacher book
paper journal author review method result figure table_2 value mean median
variance error estimate analysis regression survey interview response group
child adult elder gender income region country nation state law court""".split()


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def jitter(rng, base, scale):
    return unit([b + rng.gauss(0, scale) for b in base])


def model(name, seed):
    rng = random.Random(seed)
    axis = unit([rng.gauss(0, 1) for _ in range(DIM)])
    rows = []
    for w in SEED_FORMS:
        rows.append((w, jitter(rng, axis, 0.12)))
    for w in SHARED + ONLY[name]:
        rows.append((w, jitter(rng, axis, 0.16)))
    for w in NEAR:
        rows.append((w, jitter(rng, axis, 0.45)))
    for w in FILLER:
        rows.append((w, unit([rng.gauss(0, 1) for _ in range(DIM)])))
    # Case variants exercise folding.
    rows.append(("Unclear", jitter(rng, axis, 0.12)))
    rows.append(("Protein", unit([rng.gauss(0, 1) for _ in range(DIM)])))
    scale = rng.uniform(1.5, 3.0)
    lines = [f"{len(rows)} {DIM}"]
    for w, v in rows:
        lines.append(w + " " + " ".join(f"{x * scale:.6f}" for x in v))
    (HERE / f"{name}.txt").write_text("\n".join(lines) + "\n")


CUES = ["unclear", "uncertain", "inconsistent", "conflicting", "controversial",
        "inconclusive", "puzzling", "questionable", "speculative", "unresolved",
        "disputed", "contradicting", "unexpected", "paradoxical"]
INDICATORS = ["inconsistent", "contradict", "contradicts", "disagree", "conflicting"]
TOPICS = {
    "biology": ["gene", "protein", "enzyme", "cell", "receptor", "pathway"],
    "medicine": ["patient", "dose", "tumor", "trial", "cohort", "vaccine"],
    "psychology": ["child", "adult", "response", "interview", "survey", "group"],
    "engineering": ["alloy", "turbine", "bridge", "polymer", "engine", "concrete"],
}
CUE_RATE = {"biology": 0.3, "medicine": 0.25, "psychology": 0.5, "engineering": 0.1}


def sentence(rng, topic, cue):
    a, b = rng.sample(TOPICS[topic], 2)
    if cue is None:
        return rng.choice([
            f"The {a} was measured in each {b}.",
            f"We report the {a} for every {b}.",
            f"Each {b} showed a stable {a}.",
            f"Our knowledge of the {a} in each {b} is growing.",
        ])
    return rng.choice([
        f"The role of the {a} in the {b} remains {cue}.",
        f"Evidence linking {a} and {b} is {cue}.",
        f"Results for the {a} were {cue} across each {b}.",
        f"Whether the {a} affects the {b} is {cue}, e.g. in small samples.",
    ])


def corpus():
    rng = random.Random(7)
    manifest = {}
    all_docs = []
    for topic in TOPICS:
        docs = []
        for d in range(12):
            sents = []
            for _ in range(rng.randint(3, 6)):
                cue = rng.choice(CUES) if rng.random() < CUE_RATE[topic] else None
                sents.append(sentence(rng, topic, cue))
                if rng.random() < 0.15:
                    ind = rng.choice(INDICATORS)
                    c2 = rng.choice(CUES) if rng.random() < 0.6 else "clear"
                    sents.append(f"These findings {ind} earlier work and the mechanism is {c2}.")
            docs.append({"id": f"{topic}-{d:02}", "text": " ".join(sents)})
        path = f"{topic}.jsonl"
        (HERE / path).write_text("".join(json.dumps(x) + "\n" for x in docs))
        manifest[topic] = path
        all_docs.extend(docs)
    (HERE / "corpus.jsonl").write_text("".join(json.dumps(x) + "\n" for x in all_docs))
    (HERE / "collections.json").write_text(json.dumps(manifest, indent=2) + "\n")
    (HERE / "indicators.txt").write_text("\n".join(INDICATORS) + "\n")


def annotations():
    rng = random.Random(11)
    rows = ["word,judge1,judge2"]
    for w in SHARED + ONLY["pubmed-toy"]:
        j1 = "pos" if rng.random() < 0.9 else "neg"
        j2 = "pos" if rng.random() < 0.85 else "neg"
        rows.append(f"{w},{j1},{j2}")
    for w in NEAR + ONLY["google-toy"]:
        j1 = "neg" if rng.random() < 0.85 else "pos"
        j2 = "neg" if rng.random() < 0.8 else "pos"
        rows.append(f"{w},{j1},{j2}")
    (HERE / "annotations.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    model("google-toy", 1)
    model("pubmed-toy", 2)
    corpus()
    annotations()
