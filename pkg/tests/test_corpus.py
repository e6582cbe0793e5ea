import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oeforge.corpus import (
    DictEntry,
    ParallelPair,
    Store,
    TextFragment,
    split_dataset,
)
from oeforge.errors import DuplicateIdError, UnknownRecordError, ValidationError


def frag(text, lang="ANG", source="test"):
    return TextFragment("", lang, text, source)


class TestFragments:
    def test_basic_insert(self, store):
        fid = store.add_fragment(frag("se cyning cwæð"))
        assert store.get_fragment(fid).text == "se cyning cwæð"

    def test_empty_text_rejected(self, store):
        with pytest.raises(ValidationError):
            store.add_fragment(frag("   "))

    def test_invalid_language_rejected(self, store):
        with pytest.raises(ValidationError):
            store.add_fragment(frag("text", lang="DE"))

    def test_duplicate_id_rejected(self, store):
        store.add_fragment(TextFragment("f-1", "ANG", "an", "a"))
        with pytest.raises(DuplicateIdError):
            store.add_fragment(TextFragment("f-1", "ANG", "oðer", "a"))

    def test_unknown_fragment(self, store):
        with pytest.raises(UnknownRecordError):
            store.get_fragment("nope")

    def test_dedup_returns_first_id(self, store):
        # set-semantics oracle: inserting 10 texts with one duplicated pattern
        # must leave exactly the distinct set in the store
        texts = [f"word {i % 5}" for i in range(10)]  # 5 distinct, each twice
        ids = [store.add_fragment(frag(t)) for t in texts]
        assert ids[:5] == ids[5:]
        assert len(set(ids)) == 5
        assert sorted(f.text for f in store.iter_fragments()) == sorted(set(texts))


class TestSplit:
    def test_exact_division(self):
        split = split_dataset([f"id{i}" for i in range(10)], (0.8, 0.1, 0.1), seed=42)
        assert (len(split.train), len(split.validation), len(split.test)) == (8, 1, 1)

    def test_floor_allocation_remainder_to_train(self):
        split = split_dataset([f"id{i}" for i in range(7)], (0.8, 0.1, 0.1), seed=1)
        assert (len(split.train), len(split.validation), len(split.test)) == (7, 0, 0)

    def test_floor_allocation_oracle_all_n_up_to_20(self):
        # independent floor-allocation oracle over every corpus size
        for n in range(1, 21):
            ids = [f"id{i}" for i in range(n)]
            split = split_dataset(ids, (0.8, 0.1, 0.1), seed=3)
            expect_val = int(n * 0.1)
            expect_test = int(n * 0.1)
            assert len(split.validation) == expect_val
            assert len(split.test) == expect_test
            assert len(split.train) == n - expect_val - expect_test

    def test_determinism(self):
        ids = [f"id{i}" for i in range(37)]
        a = split_dataset(ids, (0.6, 0.2, 0.2), seed=9)
        b = split_dataset(ids, (0.6, 0.2, 0.2), seed=9)
        assert a == b

    def test_empty_input(self):
        with pytest.raises(ValidationError):
            split_dataset([], (0.8, 0.1, 0.1), seed=0)

    def test_bad_ratios(self):
        with pytest.raises(ValidationError):
            split_dataset(["a"], (0.5, 0.1, 0.1), seed=0)
        with pytest.raises(ValidationError):
            split_dataset(["a"], (1.2, -0.1, -0.1), seed=0)

    @settings(max_examples=100)
    @given(
        ids=st.sets(st.text(min_size=1, max_size=6), min_size=1, max_size=60),
        seed=st.integers(0, 2**31),
        cut=st.tuples(st.integers(0, 100), st.integers(0, 100)),
    )
    def test_partition_property(self, ids, seed, cut):
        a = min(cut)
        b = max(cut)
        ratios = (a / 100, (b - a) / 100, (100 - b) / 100)
        split = split_dataset(sorted(ids), ratios, seed)
        parts = [set(split.train), set(split.validation), set(split.test)]
        assert parts[0] | parts[1] | parts[2] == set(ids)
        assert len(split.train) + len(split.validation) + len(split.test) == len(ids)


class TestStoreRoundTrip:
    def test_export_import_equal(self, populated_store, tmp_path):
        dest = tmp_path / "copy"
        populated_store.export_to(dest)
        reloaded = Store(dest)
        assert populated_store.equal_contents(reloaded)

    def test_dedup_import_idempotent(self, store, tmp_path):
        src = tmp_path / "frags.jsonl"
        recs = [
            {"id": "", "lang": "ANG", "text": f"t {i}", "source": "s", "genre": None, "normalized": False}
            for i in range(6)
        ]
        import json

        src.write_text("\n".join(json.dumps(r) for r in recs), encoding="utf-8")
        store.import_fragments(src)
        once = {k: v.to_record() for k, v in store.fragments.items()}
        store.import_fragments(src)
        twice = {k: v.to_record() for k, v in store.fragments.items()}
        assert once == twice

    def test_reload_preserves_pairs(self, populated_store):
        reloaded = Store(populated_store.path)
        assert populated_store.equal_contents(reloaded)


class TestPairs:
    def test_pair_language_invariant(self, store):
        with pytest.raises(ValidationError):
            ParallelPair(
                id="",
                en=frag("swapped", lang="ANG"),
                ang=frag("sides", lang="EN"),
                provenance="human",
            ).validate()

    def test_accepted_with_fatal_flag_rejected(self, store):
        pair = ParallelPair(
            id="",
            en=frag("a b c", lang="EN"),
            ang=frag("x y z"),
            provenance="human",
            flags={"looped_generation"},
            review_state="accepted",
        )
        with pytest.raises(ValidationError):
            pair.validate()

    def test_dict_entries_persist(self, store):
        store.add_dict_entry(DictEntry("word", "meaning"))
        assert Store(store.path).dict_entries[0].headword == "word"
