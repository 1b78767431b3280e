import numpy as np
import pytest

from ncdsearch.config import EngineConfig
from ncdsearch.corpus import CorpusIndex, IngestConfig
from ncdsearch.outliers import GTable

# A small but realistic vocabulary; per-document word subsets make documents
# statistically distinct while sharing ordinary English connective tissue.
_CORE_WORDS = (
    "the of and to in a is that for it as was with be by on not he this are "
    "or his from at which but have an they you were her she all their one we "
    "can has there been if more when will would who so no out up into them "
    "then its only some could time these two may first any my now such like "
    "our over man me even most made after also did many before must through "
    "back years where much your way well down should because each just those "
    "people how too little state good very make world still own see men work "
    "long here get both between life being under never day same another know "
    "while last might us great old year off come since against go came right "
    "used take three"
).split()

_TOPIC_WORDS = (
    "compression distance entropy corpus query ranking index block overlap "
    "outlier median deviation vote retrieval document fragment similarity "
    "kernel lattice tensor gradient photon neuron protein enzyme glacier "
    "sediment basalt nebula quasar orbit violin sonata tempo harvest "
    "irrigation orchard ledger tariff auction verdict statute treaty harbor "
    "voyage cargo compass summit ridge tundra monsoon reef plankton falcon "
    "burrow prairie turbine reactor alloy solvent polymer catalyst"
).split()


def word_salad(rng: np.random.Generator, nbytes: int, topic_count: int = 12,
               phrase_count: int = 24) -> bytes:
    """English-like filler text with a per-document topical vocabulary and a
    bank of recurring multi-word phrases, so text from one document stays
    more compressible against that document than against others."""
    topics = [
        _TOPIC_WORDS[int(i)]
        for i in rng.choice(len(_TOPIC_WORDS), size=topic_count, replace=False)
    ]
    vocab = _CORE_WORDS + topics * 3
    phrases = []
    for _ in range(phrase_count):
        length = int(rng.integers(2, 5))
        phrases.append(" ".join(
            vocab[int(i)] for i in rng.integers(0, len(vocab), length)
        ))
    pieces = []
    size = 0
    while size < nbytes:
        sentence = []
        for _ in range(int(rng.integers(2, 5))):
            if rng.random() < 0.55:
                sentence.append(phrases[int(rng.integers(phrase_count))])
            else:
                sentence.append(vocab[int(rng.integers(len(vocab)))])
        text = " ".join(sentence).capitalize() + ". "
        if rng.random() < 0.12:
            text += "\n\n"
        pieces.append(text)
        size += len(text)
    return "".join(pieces).encode()[:nbytes]


def build_text_corpus(seed: int, docs: int, size_range=(4096, 12288),
                      n_max_bins: int = 4, overlap: float = 0.10) -> CorpusIndex:
    rng = np.random.default_rng(seed)
    index = CorpusIndex(IngestConfig(n_max_bins=n_max_bins, overlap_fraction=overlap))
    for d in range(docs):
        doc_rng = np.random.default_rng([seed, d])
        nbytes = int(rng.integers(size_range[0], size_range[1] + 1))
        index.add_document(f"doc{d:02d}", word_salad(doc_rng, nbytes))
    return index


def build_planted_corpus(seed: int, query_bytes: bytes, decoys: int = 29,
                         doc_size: int = 8192, n_max_bins: int = 4) -> CorpusIndex:
    """Random decoy documents plus one document containing the query verbatim."""
    rng = np.random.default_rng(seed)
    index = CorpusIndex(IngestConfig(n_max_bins=n_max_bins))
    for d in range(decoys):
        data = bytes(rng.integers(0, 256, doc_size, dtype=np.uint8))
        index.add_document(f"decoy{d:02d}", data)
    pad = doc_size - len(query_bytes)
    head = bytes(rng.integers(0, 256, pad // 2, dtype=np.uint8))
    tail = bytes(rng.integers(0, 256, pad - pad // 2, dtype=np.uint8))
    index.add_document("planted", head + query_bytes + tail)
    return index


@pytest.fixture(scope="session")
def fast_config() -> EngineConfig:
    """Engine config sized for unit tests: few bins, light Monte Carlo."""
    return EngineConfig(n_max_bins=4, gtable_replicates=1500, rng_seed=11)


@pytest.fixture(scope="session")
def shared_gtable(fast_config) -> GTable:
    return GTable(replicates=fast_config.gtable_replicates,
                  rng_seed=fast_config.rng_seed)
