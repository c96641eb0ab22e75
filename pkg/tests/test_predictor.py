import itertools

import numpy as np
import pytest

from keyecho import synth
from keyecho.errors import CandidateExplosion, NoCandidates
from keyecho.lexicon import make_lexicon
from keyecho.model import tolerance, train
from keyecho.predictor import (PredictSettings, build_tree, enumerate_words,
                               filter_dictionary, predict)
from keyecho.segmenter import IntervalSequence


def naive_words(model, deltas, pct, std_coeff, alphabet):
    """Oracle: filter the full Cartesian product on adjacent-pair matching."""
    def pair_ok(a, b, delta):
        s = model.stats.get((a, b))
        if s is None:
            return False
        t_f = tolerance(model, delta, pct, std_coeff)
        return s.mean_ms - t_f <= delta <= s.mean_ms + t_f

    k = len(deltas) + 1
    return sorted(
        "".join(w) for w in itertools.product(alphabet, repeat=k)
        if all(pair_ok(w[i], w[i + 1], deltas[i]) for i in range(k - 1))
    )


def tree_words(model, deltas, pct, std_coeff):
    try:
        tree = build_tree(model, IntervalSequence(deltas), pct, std_coeff)
    except NoCandidates:
        return []
    return enumerate_words(tree)


class TestBuildTree:
    def test_single_chain(self):
        model = train([("t", "o", 300), ("t", "o", 310),
                       ("b", "o", 475), ("b", "o", 485),
                       ("o", "p", 400)])
        words = tree_words(model, (300, 400), pct=0.05, std_coeff=0.0)
        assert words == ["top"]

    def test_second_branch_survives(self):
        model = train([("t", "o", 305), ("b", "o", 300), ("o", "p", 400)])
        words = tree_words(model, (300, 400), pct=0.05, std_coeff=0.0)
        assert words == ["bop", "top"]

    def test_dead_branch_pruned(self):
        # (b,a) matches the first interval but nothing continues from 'a'.
        model = train([("t", "o", 300), ("b", "a", 305), ("o", "p", 400)])
        words = tree_words(model, (300, 400), pct=0.05, std_coeff=0.0)
        assert words == ["top"]

    def test_no_candidates_raises_with_step(self):
        model = train([("t", "o", 300)])
        with pytest.raises(NoCandidates) as exc:
            build_tree(model, IntervalSequence((300, 900)), 0.05, 0.0)
        assert exc.value.step == 2

    def test_explosion_guard(self, monkeypatch):
        monkeypatch.setattr("keyecho.predictor.MAX_LIVE_PATHS", 10)
        pairs = [(a, b, 300) for a in "abcdef" for b in "abcdef"]
        model = train(pairs)
        with pytest.raises(CandidateExplosion):
            build_tree(model, IntervalSequence((300, 300)), 0.05, 0.0)

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_naive_oracle(self, seed):
        rng = np.random.default_rng(seed)
        alphabet = "abcde"
        pairs = []
        for a in alphabet:
            for b in alphabet:
                if rng.random() < 0.5:
                    mean = float(rng.integers(100, 500))
                    reps = int(rng.integers(1, 3))
                    for _ in range(reps):
                        pairs.append((a, b, mean + float(rng.normal(0, 5))))
        if not pairs:
            pairs = [("a", "b", 200.0)]
        model = train(pairs)
        k = int(rng.integers(2, 6))
        deltas = tuple(float(rng.integers(100, 500)) for _ in range(k - 1))
        pct = float(rng.uniform(0.0, 0.3))
        std_coeff = float(rng.choice([0.0, 1.0, 3.0]))
        assert tree_words(model, deltas, pct, std_coeff) == \
               naive_words(model, deltas, pct, std_coeff, alphabet)

    @pytest.mark.parametrize("seed", range(10))
    def test_widening_tolerance_only_adds_words(self, seed):
        rng = np.random.default_rng(1000 + seed)
        pairs = [(a, b, float(rng.integers(150, 400)))
                 for a in "abcd" for b in "abcd" if rng.random() < 0.7]
        if not pairs:
            pairs = [("a", "b", 200.0)]
        model = train(pairs)
        deltas = tuple(float(rng.integers(150, 400)) for _ in range(3))
        narrow = set(tree_words(model, deltas, 0.05, 0.0))
        wide = set(tree_words(model, deltas, 0.10, 0.0))
        assert narrow <= wide

    def test_soundness_of_every_word(self):
        rng = np.random.default_rng(42)
        pairs = [(a, b, float(rng.integers(150, 400)))
                 for a in "abcde" for b in "abcde"]
        model = train(pairs)
        deltas = (200.0, 250.0, 300.0)
        pct = 0.15
        words = tree_words(model, deltas, pct, 0.0)
        assert words
        for word in words:
            for i, (a, b) in enumerate(zip(word, word[1:])):
                t_f = tolerance(model, deltas[i], pct, 0.0)
                assert abs(model.stats[(a, b)].mean_ms - deltas[i]) <= t_f


class TestEnumerateWords:
    def test_single_chain(self):
        model = train([("t", "o", 300), ("o", "p", 400)])
        assert tree_words(model, (300, 400), 0.0, 0.0) == ["top"]

    def test_sorted_output(self):
        model = train([("t", "o", 300), ("b", "o", 300), ("o", "p", 400)])
        assert tree_words(model, (300, 400), 0.05, 0.0) == ["bop", "top"]


class TestFilterDictionary:
    def test_membership(self):
        lex = make_lexicon({"top", "work"})
        assert filter_dictionary(["bop", "top"], lex) == ["top"]

    def test_empty_input(self):
        assert filter_dictionary([], make_lexicon({"top"})) == []

    def test_all_absent(self):
        lex = make_lexicon({"zzz"})
        assert filter_dictionary(["bop", "top"], lex) == []


class TestPredict:
    @pytest.fixture()
    def setup(self):
        profile = synth.profile_for_words(["top"], base_ms=250,
                                          spacing_ms=100, std_ms=0.0)
        syn = synth.synth_session(profile, ["top"])
        onsets = syn.word_onsets_ms[0]
        signal = synth.synth_audio(onsets, profile, 1000,
                                   onsets[-1] + 300.0)
        from keyecho.keylog import session_to_pairs
        model = train(session_to_pairs(syn.session))
        lex = make_lexicon({"top", "work"})
        return model, signal, lex

    def test_end_to_end(self, setup):
        model, signal, lex = setup
        settings = PredictSettings(lexicon=lex)
        result = predict(model, signal, 3, settings)
        assert result.words_dict == ("top",)
        assert result.params["k"] == 3
        assert len(result.onsets_ms) == 3
        assert len(result.deltas_ms) == 2

    def test_exact_match_mode(self, setup):
        model, signal, lex = setup
        settings = PredictSettings(tolerance_pct=0.0, std_coeff=0.0,
                                   lexicon=lex)
        result = predict(model, signal, 3, settings)
        assert result.words_dict == ("top",)

    def test_unmodeled_pair(self, setup):
        _, signal, lex = setup
        other = train([("x", "y", 5000)])
        with pytest.raises(NoCandidates):
            predict(other, signal, 3, PredictSettings(lexicon=lex))

    def test_json_serialization(self, setup):
        import json
        model, signal, lex = setup
        result = predict(model, signal, 3, PredictSettings(lexicon=lex))
        doc = json.loads(result.to_json())
        assert doc["words_dict"] == ["top"]
        assert doc["params"]["tolerance_pct"] == 0.05

    def test_k_too_small(self, setup):
        model, signal, lex = setup
        with pytest.raises(ValueError):
            predict(model, signal, 1, PredictSettings(lexicon=lex))
