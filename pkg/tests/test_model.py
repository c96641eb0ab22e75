import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from keyecho.errors import (ConsistencyFailure, NonPositiveDelta,
                            SchemaMismatch)
from keyecho.model import candidates, load_model, save_model, tolerance, train

pair_lists = st.lists(
    st.tuples(st.sampled_from("abct"), st.sampled_from("opxz"),
              st.floats(min_value=1.0, max_value=2000.0,
                        allow_nan=False, allow_infinity=False)),
    max_size=40,
)


class TestTrain:
    def test_hand_computed_stats(self):
        model = train([("t", "o", 300), ("t", "o", 310), ("o", "p", 400)])
        to = model.stats[("t", "o")]
        assert to.mean_ms == 305
        assert to.std_ms == pytest.approx(7.0710678, abs=1e-6)
        assert to.count == 2
        op = model.stats[("o", "p")]
        assert (op.mean_ms, op.std_ms, op.count) == (400, 0.0, 1)
        assert model.asd_ms == pytest.approx(7.0710678, abs=1e-6)

    def test_empty(self):
        model = train([])
        assert model.stats == {}
        assert model.asd_ms == 0.0

    def test_singleton_excluded_from_asd(self):
        model = train([("a", "b", 200)])
        assert model.stats[("a", "b")].std_ms == 0.0
        assert model.asd_ms == 0.0

    def test_non_positive_delta(self):
        with pytest.raises(NonPositiveDelta):
            train([("a", "b", 0.0)])
        with pytest.raises(NonPositiveDelta):
            train([("a", "b", -5.0)])

    @given(pair_lists, st.randoms())
    @settings(max_examples=50, deadline=None)
    def test_order_invariant(self, pairs, rnd):
        shuffled = list(pairs)
        rnd.shuffle(shuffled)
        a, b = train(pairs), train(shuffled)
        assert a.stats == b.stats
        assert a.asd_ms == b.asd_ms

    @given(pair_lists, st.floats(min_value=0.1, max_value=8.0))
    @settings(max_examples=50, deadline=None)
    def test_scale_consistent(self, pairs, c):
        base = train(pairs)
        scaled = train([(a, b, d * c) for a, b, d in pairs])
        for key, s in base.stats.items():
            assert scaled.stats[key].mean_ms == pytest.approx(s.mean_ms * c, rel=1e-12)
            assert scaled.stats[key].std_ms == pytest.approx(s.std_ms * c, rel=1e-9, abs=1e-9)
        assert scaled.asd_ms == pytest.approx(base.asd_ms * c, rel=1e-9, abs=1e-9)


class TestTolerance:
    def test_bare_five_percent(self):
        model = train([])
        assert tolerance(model, 300, 0.05, 0.0) == 15.0

    def test_asd_term(self):
        model = train([("t", "o", 300), ("t", "o", 310)])  # asd = sqrt(50)
        t_f = tolerance(model, 300, 0.05, 1.0)
        assert t_f == pytest.approx(15.0 + math.sqrt(50), abs=1e-9)

    def test_exact_match_mode(self):
        model = train([("t", "o", 300), ("t", "o", 310)])
        assert tolerance(model, 123, 0.0, 0.0) == 0.0


class TestCandidates:
    @pytest.fixture()
    def model(self):
        return train([("t", "o", 305), ("b", "o", 500)])

    def test_single_match(self, model):
        full = set("abcdefghijklmnopqrstuvwxyz")
        assert candidates(model, 300, 10, full) == [("t", "o", 305)]

    def test_huge_tolerance_saturates(self, model):
        full = set("abcdefghijklmnopqrstuvwxyz")
        assert candidates(model, 400, 1e6, full) == \
               [("b", "o", 500), ("t", "o", 305)]

    def test_empty_filter(self, model):
        assert candidates(model, 305, 1e6, set()) == []

    def test_first_key_filter(self, model):
        assert candidates(model, 400, 1e6, {"b"}) == [("b", "o", 500)]

    @given(pair_lists,
           st.floats(min_value=1, max_value=2000),
           st.floats(min_value=0, max_value=500))
    @settings(max_examples=50, deadline=None)
    def test_matches_brute_force(self, pairs, delta, t_f):
        model = train(pairs)
        allowed = set("abct")
        got = candidates(model, delta, t_f, allowed)
        want = sorted(
            (s.key_a, s.key_b, s.mean_ms) for s in model.stats.values()
            if s.key_a in allowed and abs(s.mean_ms - delta) <= t_f
        )
        assert got == want


class TestPersistence:
    def test_roundtrip(self, tmp_path):
        model = train([("t", "o", 300), ("t", "o", 310), ("o", "p", 400)])
        path = tmp_path / "model.json"
        save_model(model, path)
        back = load_model(path)
        assert back.observations == model.observations
        assert back.stats == model.stats
        assert back.asd_ms == model.asd_ms

    def test_empty_roundtrip(self, tmp_path):
        path = tmp_path / "empty.json"
        save_model(train([]), path)
        back = load_model(path)
        assert back.stats == {} and back.asd_ms == 0.0

    def test_tampered_mean_detected(self, tmp_path):
        model = train([("t", "o", 305)])
        path = tmp_path / "model.json"
        save_model(model, path)
        doc = json.loads(path.read_text())
        doc["analysis"][0]["mean_ms"] = 999
        path.write_text(json.dumps(doc))
        with pytest.raises(ConsistencyFailure):
            load_model(path)

    def test_tampered_asd_detected(self, tmp_path):
        model = train([("t", "o", 300), ("t", "o", 310)])
        path = tmp_path / "model.json"
        save_model(model, path)
        doc = json.loads(path.read_text())
        doc["asd_ms"] = 0.5
        path.write_text(json.dumps(doc))
        with pytest.raises(ConsistencyFailure):
            load_model(path)

    @pytest.mark.parametrize("mutate", [
        lambda d: d.pop("version"),
        lambda d: d.pop("observations"),
        lambda d: d.pop("analysis"),
        lambda d: d.pop("asd_ms"),
        lambda d: d.update(version=99),
    ])
    def test_schema_mismatch(self, tmp_path, mutate):
        path = tmp_path / "model.json"
        save_model(train([("a", "b", 100)]), path)
        doc = json.loads(path.read_text())
        mutate(doc)
        path.write_text(json.dumps(doc))
        with pytest.raises(SchemaMismatch):
            load_model(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("not json")
        with pytest.raises(SchemaMismatch):
            load_model(path)
