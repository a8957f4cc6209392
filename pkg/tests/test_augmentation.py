from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewlens.augmentation import (
    AugmentationConfig,
    SynonymLexicon,
    augment_dataset,
    load_lexicon,
    minority_class,
    oversample,
    random_delete,
    synonym_replace,
)
from skewlens.corpus_io import CorpusFormatError, LabeledDataset, Sentence

LEX = SynonymLexicon({"good": ("fine",), "big": ("large", "huge"), "fast": ("quick",)})


def labeled(n_minority, n_majority, minority=1):
    out = []
    for i in range(n_minority + n_majority):
        out.append(Sentence("1", i + 1, f"sentence number {i} is good", minority if i < n_minority else 1 - minority))
    return LabeledDataset(tuple(out), "fx")


def test_oversample_to_balance():
    out = oversample(labeled(3, 9), 1.0, seed=0)
    assert out.class_counts().tolist() == [9, 9]
    assert out.sentences[:12] == labeled(3, 9).sentences


def test_oversample_balanced_is_identity():
    ds = labeled(5, 5)
    assert oversample(ds, 1.0, seed=3) == ds


def test_oversample_full_size_counts():
    ds = LabeledDataset(
        tuple(Sentence("1", i + 1, "x", 1 if i < 4720 else 0) for i in range(4720 + 12245)), "big"
    )
    assert oversample(ds, 1.0, seed=1).class_counts().tolist() == [12245, 12245]


def test_oversample_partial_ratio():
    assert oversample(labeled(3, 9), 0.5, seed=0).class_counts().tolist() == [9, 5]


def test_oversample_requires_both_classes():
    with pytest.raises(ValueError):
        oversample(labeled(0, 4), 1.0, 0)


def test_minority_tie_goes_to_class_one():
    assert minority_class(labeled(4, 4)) == 1
    assert minority_class(labeled(2, 5, minority=0)) == 0


def test_synonym_forced_single_candidate():
    s = Sentence("1", 1, "good riddance", 1)
    assert synonym_replace(s, SynonymLexicon({"good": ("fine",)}), 1, seed=5).text == "fine riddance"


def test_synonym_keeps_punctuation_and_label():
    s = Sentence("1", 1, '"Good," she said.', 1)
    out = synonym_replace(s, LEX, 1, seed=0)
    assert out.text == '"fine," she said.' and out.label == 1 and out.key == s.key


def test_synonym_no_hits_unchanged():
    s = Sentence("1", 1, "nothing to see here", 0)
    assert synonym_replace(s, LEX, 2, seed=1) == s


def test_synonym_skips_stopwords():
    s = Sentence("1", 1, "good fast", 0)
    assert synonym_replace(s, LEX, 2, stopwords={"good"}, seed=1).text == "good quick"


def test_synonym_positions_uniform():
    s = Sentence("1", 1, "a good and fast car", 0)
    hits = Counter()
    for seed in range(1000):
        out = synonym_replace(s, LEX, 1, seed=seed).text.split()
        hits["good" if out[1] != "good" else "fast"] += 1
    assert abs(hits["good"] / 1000 - 0.5) <= 0.05


def test_random_delete_identity_at_zero():
    s = Sentence("1", 1, "one two three", 0)
    assert random_delete(s, 0.0, seed=4) == s


def test_random_delete_mean_survival():
    s = Sentence("1", 1, " ".join(f"t{i}" for i in range(10)), 0)
    lengths = [len(random_delete(s, 0.3, seed=k).text.split()) for k in range(10_000)]
    assert abs(np.mean(lengths) - 7.0) <= 0.15


@given(st.lists(st.sampled_from(["a", "b", "good", "big"]), min_size=1, max_size=12), st.floats(0.0, 0.99), st.integers(0, 2**32))
def test_random_delete_keeps_one_and_order(tokens, p, seed):
    s = Sentence("1", 1, " ".join(tokens), 1)
    out = random_delete(s, p, seed)
    kept = out.text.split()
    assert 1 <= len(kept) <= len(tokens) and out.label == 1
    it = iter(tokens)
    assert all(t in it for t in kept)


@pytest.mark.parametrize("p", [-0.1, 1.0])
def test_random_delete_rejects_p(p):
    with pytest.raises(ValueError):
        random_delete(Sentence("1", 1, "x", 0), p)


def test_augment_none_is_identity():
    ds = labeled(3, 9)
    assert augment_dataset(ds, AugmentationConfig("none")) is ds


def test_augment_oversample_balances():
    ds = labeled(28, 72)
    assert augment_dataset(ds, AugmentationConfig("oversample", seed=2)).class_counts().tolist() == [72, 72]


def test_augment_delete_bookkeeping():
    ds = labeled(100, 300)
    out = augment_dataset(ds, AugmentationConfig("delete", deletion_prob=0.1, seed=1))
    # originals, then one perturbed copy per minority sentence, then balancing draws
    assert out.sentences[:400] == ds.sentences
    copies = out.sentences[400:500]
    assert [c.key for c in copies] == [s.key for s in ds.sentences[:100]]
    assert out.class_counts().tolist() == [300, 300]


def test_augment_synonym_needs_lexicon():
    with pytest.raises(ValueError):
        augment_dataset(labeled(2, 4), AugmentationConfig("synonym"))
    out = augment_dataset(labeled(2, 4), AugmentationConfig("synonym", seed=0), LEX)
    assert [s.text for s in out.sentences[6:8]] == ["sentence number 0 is fine", "sentence number 1 is fine"]


def test_augment_is_seeded():
    ds = labeled(10, 30)
    cfg = AugmentationConfig("delete", deletion_prob=0.3, seed=9)
    assert augment_dataset(ds, cfg) == augment_dataset(ds, cfg)


@pytest.mark.parametrize(
    "kwargs",
    [{"technique": "mixup"}, {"technique": "delete", "deletion_prob": 1.0}, {"technique": "synonym", "synonyms_per_sentence": 0}, {"technique": "oversample", "oversample_ratio": 0.0}],
)
def test_augmentation_config_validation(kwargs):
    with pytest.raises(ValueError):
        AugmentationConfig(**kwargs)


def test_bundled_lexicon_and_parse_errors(tmp_path):
    lex = load_lexicon()
    assert "good" in lex and all(w == w.lower() for w in lex.entries)
    bad = tmp_path / "lex.tsv"
    bad.write_text("Good\tfine\n")
    with pytest.raises(CorpusFormatError, match=r"lex\.tsv:1"):
        load_lexicon(bad)
    bad.write_text("good\tgood\n")
    with pytest.raises(CorpusFormatError):
        load_lexicon(bad)
