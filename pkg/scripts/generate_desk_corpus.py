"""Generate the bundled desk-scale corpus under data/desk_corpus/.

The corpus is 30 synthetic English-like documents (8-64KB each), written
deterministically from a fixed seed and dedicated to the public domain
(CC0).  Every document mixes a shared core vocabulary with its own topical
word set and a bank of recurring multi-word phrases, mimicking how real
authors reuse terminology: text from one document compresses noticeably
better against the rest of that document than against the others, which is
the signal the retrieval experiments need.

Each document gets one or two subject labels recorded in a .meta.json
sidecar, so the corpus also serves subject-affinity experiments.

Running this script again reproduces the same files byte for byte.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

MASTER_SEED = 20137
DOC_COUNT = 30
MIN_BYTES = 8 * 1024
MAX_BYTES = 64 * 1024

CORE_WORDS = (
    "the of and to in a is that for it as was with be by on not he this are "
    "or his from at which but have an they you were her she all their one we "
    "can has there been if more when will would who so no out up into them "
    "then its only some could time these two may first any my now such like "
    "our over man me even most made after also did many before must through "
    "back years where much your way well down should because each just those "
    "people how too little state good very make world still own see men work "
    "long here get both between life being under never day same another know "
    "while last might us great old year off come since against go came right "
    "used take three states himself few house use during without again place "
    "american around however home small found thought went say part once "
    "general high upon school every dont does got united left number course "
    "war until always away something fact though water less public put think "
    "almost hand enough far took head yet government system better set told "
    "nothing night end why called didnt eyes find going look asked later "
    "point knew city next program give side days toward young let form given "
    "order early means face rather per often among case large need four "
    "within along turn members want black show power followed whole seemed "
    "want area felt along best week second company group problem am toward"
).split()

SUBJECTS = {
    "signal-processing": (
        "waveform spectrum filter sampling aliasing convolution amplitude "
        "phase oscillator bandwidth resonance harmonic modulation envelope "
        "transducer decibel impedance attenuation"
    ).split(),
    "marine-biology": (
        "plankton reef coral kelp salinity tide estuary spawning larvae "
        "bioluminescence crustacean mollusk pelagic benthic upwelling "
        "chlorophyll foraging migration"
    ).split(),
    "civil-engineering": (
        "girder truss abutment culvert rebar formwork slump aggregate "
        "cantilever deflection shear torsion foundation pile geotextile "
        "asphalt surveying drainage"
    ).split(),
    "medieval-history": (
        "charter fief vassal seneschal tithe abbey cloister chronicle "
        "heraldry parchment guild burgess crusade reliquary manor serf "
        "palisade chancery"
    ).split(),
    "astronomy": (
        "nebula quasar parallax occultation perihelion albedo magnitude "
        "spectrograph pulsar accretion ecliptic bolide zenith declination "
        "photometry corona transit"
    ).split(),
    "culinary-arts": (
        "braise julienne roux emulsion proofing fermentation zest marinade "
        "reduction caramelize sear blanch whisk ganache brine mirepoix "
        "umami garnish"
    ).split(),
    "railway-operations": (
        "ballast signalbox turnout pantograph coupling bogie timetable "
        "interlocking gradient siding locomotive gauge semaphore shunting "
        "axle dispatcher overhead"
    ).split(),
    "textile-craft": (
        "warp weft loom bobbin selvage dyeing mordant carding spinning "
        "twill jacquard heddle shuttle felting skein gauge brocade"
    ).split(),
}


def build_document(doc_index: int) -> tuple[bytes, list[str]]:
    rng = np.random.default_rng([MASTER_SEED, doc_index])
    names = sorted(SUBJECTS)
    primary = names[int(rng.integers(len(names)))]
    labels = [primary]
    if rng.random() < 0.35:
        secondary = names[int(rng.integers(len(names)))]
        if secondary != primary:
            labels.append(secondary)
    topical = []
    for label in labels:
        topical.extend(SUBJECTS[label])
    extra = [CORE_WORDS[int(i)] for i in rng.integers(0, len(CORE_WORDS), 30)]
    vocab = CORE_WORDS + topical * 4 + extra

    phrases = []
    for _ in range(28):
        length = int(rng.integers(2, 6))
        phrases.append(" ".join(
            vocab[int(i)] for i in rng.integers(0, len(vocab), length)
        ))

    target = int(rng.integers(MIN_BYTES, MAX_BYTES + 1))
    pieces: list[str] = []
    size = 0
    sentence_budget = int(rng.integers(3, 8))
    while size < target:
        words: list[str] = []
        for _ in range(int(rng.integers(2, 6))):
            if rng.random() < 0.55:
                words.append(phrases[int(rng.integers(len(phrases)))])
            else:
                words.append(vocab[int(rng.integers(len(vocab)))])
        sentence = " ".join(words).capitalize() + ". "
        pieces.append(sentence)
        size += len(sentence)
        sentence_budget -= 1
        if sentence_budget == 0:
            pieces.append("\n\n")
            size += 2
            sentence_budget = int(rng.integers(3, 8))
    text = "".join(pieces)[:target]
    return text.encode("ascii"), sorted(set(labels))


def main(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    total = 0
    for d in range(DOC_COUNT):
        data, labels = build_document(d)
        name = f"doc_{d:02d}"
        (out_dir / f"{name}.txt").write_bytes(data)
        (out_dir / f"{name}.meta.json").write_text(
            json.dumps(
                {"subjects": labels, "source_uri": f"generated://desk-corpus/{d}"},
                indent=2,
            )
            + "\n"
        )
        total += len(data)
    (out_dir / "README.md").write_text(
        "# Desk corpus\n\n"
        f"{DOC_COUNT} deterministic synthetic English-like documents "
        f"({MIN_BYTES // 1024}-{MAX_BYTES // 1024}KB each, {total} bytes total), "
        "produced by scripts/generate_desk_corpus.py from a fixed seed.\n\n"
        "These texts are original generated content dedicated to the public "
        "domain (CC0 1.0). Subject labels live in the .meta.json sidecars.\n"
    )
    print(f"wrote {DOC_COUNT} documents, {total} bytes total, to {out_dir}")


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).parent.parent / "data" / "desk_corpus"
    )
    main(target)
