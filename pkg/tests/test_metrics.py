"""Frozen hand-derived cases plus independent oracle cross-checks.

The oracles here deliberately avoid the library's code paths: BLEU is
recomputed from first principles with plain loops, chrF overlaps come from
explicit multiset intersection, and METEOR chunk counts come from an
exhaustive search over all injective token alignments.
"""

import itertools
import math
from collections import Counter

import pytest

from oeforge.metrics import (
    BleuConfig,
    ChrfConfig,
    MeteorConfig,
    chrf,
    corpus_bleu,
    evaluate_corpus,
    meteor,
    sentence_bleu,
    tokenize,
)
from oeforge.metrics.meteor import align, light_english_stemmer
from oeforge.errors import ValidationError


# ---------------------------------------------------------------- oracles


def oracle_bleu(hyps, refs, max_order):
    """Straight-line BLEU: clipped counts, geometric mean, brevity penalty."""
    log_precisions = []
    for n in range(1, max_order + 1):
        num = den = 0
        for hyp, ref in zip(hyps, refs):
            hyp_grams = [tuple(hyp[i : i + n]) for i in range(len(hyp) - n + 1)]
            ref_grams = [tuple(ref[i : i + n]) for i in range(len(ref) - n + 1)]
            ref_counts = Counter(ref_grams)
            clipped = Counter()
            for g in hyp_grams:
                if clipped[g] < ref_counts[g]:
                    clipped[g] += 1
            num += sum(clipped.values())
            den += len(hyp_grams)
        if den == 0:
            continue
        if num == 0:
            return 0.0
        log_precisions.append(math.log(num / den))
    if not log_precisions:
        return 0.0
    c = sum(len(h) for h in hyps)
    r = sum(len(x) for x in refs)
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return 100.0 * bp * math.exp(sum(log_precisions) / len(log_precisions))


def oracle_chrf(hyp, ref, order, beta):
    hyp = "".join(hyp.split())
    ref = "".join(ref.split())
    ps, rs = [], []
    for n in range(1, order + 1):
        hgrams = Counter(hyp[i : i + n] for i in range(len(hyp) - n + 1))
        rgrams = Counter(ref[i : i + n] for i in range(len(ref) - n + 1))
        if not hgrams and not rgrams:
            continue
        overlap = sum((hgrams & rgrams).values())
        ps.append(overlap / sum(hgrams.values()) if hgrams else 0.0)
        rs.append(overlap / sum(rgrams.values()) if rgrams else 0.0)
    if not ps:
        return 0.0
    p, r = sum(ps) / len(ps), sum(rs) / len(rs)
    if p + r == 0:
        return 0.0
    return 100.0 * (1 + beta**2) * p * r / (beta**2 * p + r)


def oracle_meteor_alignment(hyp, ref, stemmer=None):
    """Exhaustive search: max staged matches, then min chunks.

    Stage 1 pairs identical tokens; stage 2 pairs stem-equal leftovers. The
    number of matches is fixed by multiset counts per stage; every injective
    assignment achieving it is enumerated and the chunk minimum returned.
    """
    stemmer = stemmer or (lambda t: t)
    h_left = Counter(hyp)
    r_left = Counter(ref)
    exact = sum(min(c, r_left[t]) for t, c in h_left.items())
    for t in list(h_left):
        used = min(h_left[t], r_left[t])
        h_left[t] -= used
        r_left[t] -= used
    h_stems = Counter()
    for t, c in h_left.items():
        h_stems[stemmer(t)] += c
    r_stems = Counter()
    for t, c in r_left.items():
        r_stems[stemmer(t)] += c
    stem = sum(min(c, r_stems[s]) for s, c in h_stems.items())
    total = exact + stem

    if total == 0:
        return 0, 0

    def compatible(i, j):
        return hyp[i] == ref[j] or stemmer(hyp[i]) == stemmer(ref[j])

    best = total + 1
    hyp_positions = range(len(hyp))
    for subset in itertools.combinations(hyp_positions, total):
        for perm in itertools.permutations(range(len(ref)), total):
            if any(not compatible(i, j) for i, j in zip(subset, perm)):
                continue
            pairs = sorted(zip(subset, perm))
            chunks = 0
            prev = (-5, -5)
            for i, j in pairs:
                if not (i == prev[0] + 1 and j == prev[1] + 1):
                    chunks += 1
                prev = (i, j)
            best = min(best, chunks)
    return total, best


def oracle_meteor_score(m, chunks, hlen, rlen):
    if m == 0:
        return 0.0
    p, r = m / hlen, m / rlen
    fmean = 10 * p * r / (r + 9 * p)
    penalty = 0.5 * (chunks / m) ** 3
    return 100.0 * fmean * (1 - penalty)


# ---------------------------------------------------------------- BLEU


class TestBleu:
    def test_identity(self):
        toks = [tokenize("se cyning cwæð to ðam folce")]
        assert corpus_bleu(toks, toks) == pytest.approx(100.0)

    def test_hand_case(self):
        hyp = ["the", "cat", "sat"]
        ref = ["the", "cat", "sat", "on", "the", "mat"]
        got = corpus_bleu([hyp], [ref], BleuConfig(max_ngram_order=3))
        assert got == pytest.approx(36.79, abs=0.01)
        assert got == pytest.approx(oracle_bleu([hyp], [ref], 3), abs=1e-9)

    def test_disjoint_vocabulary(self):
        assert corpus_bleu([["a", "b"]], [["c", "d"]]) == 0.0

    def test_matches_oracle_on_mixed_corpus(self):
        hyps = [["the", "king", "said"], ["a", "b", "c", "d"], ["x"]]
        refs = [["the", "king", "said", "so"], ["a", "b", "e", "d"], ["x", "y"]]
        got = corpus_bleu(hyps, refs, BleuConfig(max_ngram_order=4))
        assert got == pytest.approx(oracle_bleu(hyps, refs, 4), abs=1e-9)

    def test_segment_smoothing_nonzero(self):
        score = sentence_bleu(["the", "dog"], ["the", "cat", "sat"])
        assert 0.0 < score < 100.0

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            corpus_bleu([["a"]], [])

    def test_empty_corpus(self):
        with pytest.raises(ValidationError):
            corpus_bleu([], [])


# ---------------------------------------------------------------- chrF


class TestChrf:
    def test_identity(self):
        assert chrf("ðæt is æt stoce", "ðæt is æt stoce") == pytest.approx(100.0)

    def test_hand_case(self):
        got = chrf("abcd", "abce", ChrfConfig(char_ngram_order=2))
        assert got == pytest.approx(70.83, abs=0.01)
        assert got == pytest.approx(oracle_chrf("abcd", "abce", 2, 2.0), abs=1e-9)

    def test_zero_overlap(self):
        assert chrf("abc", "xyz") == 0.0

    def test_matches_oracle_default_config(self):
        cases = [
            ("se cyning cwæð", "se cyning cwæð to ðam folce"),
            ("hwilce mynstres", "mynstres hwilce"),
            ("a", "ab"),
        ]
        for hyp, ref in cases:
            assert chrf(hyp, ref) == pytest.approx(oracle_chrf(hyp, ref, 6, 2.0), abs=1e-9)

    def test_empty_reference(self):
        with pytest.raises(ValidationError):
            chrf("a", "")


# ---------------------------------------------------------------- METEOR


class TestMeteor:
    def test_identity_ten_tokens(self):
        toks = "a b c d e f g h i j".split()
        assert meteor(toks, toks) == pytest.approx(99.95, abs=0.01)

    def test_hand_case_black_cat(self):
        got = meteor(["the", "cat"], ["the", "black", "cat"])
        assert got == pytest.approx(34.48, abs=0.05)
        m, chunks = oracle_meteor_alignment(["the", "cat"], ["the", "black", "cat"])
        assert (m, chunks) == (2, 2)
        assert got == pytest.approx(oracle_meteor_score(m, chunks, 2, 3), abs=1e-9)

    def test_zero_overlap(self):
        assert meteor(["a", "b"], ["c", "d"]) == 0.0

    def test_stem_stage(self):
        cfg = MeteorConfig(stemmer=light_english_stemmer)
        assert meteor(["walking"], ["walked"], cfg) > 0.0

    def test_chunk_count_matches_exhaustive(self):
        cases = [
            ("the cat sat on the mat", "the cat was on the mat"),
            ("a b a b", "b a b a"),
            ("x y z", "z y x"),
            ("a a a", "a a"),
            ("p q r s", "p q r s"),
        ]
        for hyp_s, ref_s in cases:
            hyp, ref = hyp_s.split(), ref_s.split()
            m, chunks, _ = align(hyp, ref)
            om, ochunks = oracle_meteor_alignment(hyp, ref)
            assert (m, chunks) == (om, ochunks), (hyp_s, ref_s)

    def test_empty_reference(self):
        with pytest.raises(ValidationError):
            meteor(["a"], [])


# ---------------------------------------------------------------- corpus report


class TestEvaluateCorpus:
    def test_single_identical_pair(self):
        text = "se cyning cwæð to ðam folce ðæt hi sceoldon ða lare healdan"
        rep = evaluate_corpus([(text, text)])
        assert rep.corpus["bleu"] == pytest.approx(100.0)
        assert rep.corpus["chrf"] == pytest.approx(100.0)
        n = len(tokenize(text))
        assert rep.corpus["meteor"] == pytest.approx(
            oracle_meteor_score(n, 1, n, n), abs=1e-9
        )

    def test_report_matches_segment_oracles(self):
        pairs = [
            ("s1", "the cat sat", "the cat sat on the mat"),
            ("s2", "abcd", "abce"),
            ("s3", "the cat", "the black cat"),
            ("s4", "same words here", "same words here"),
            ("s5", "x y", "p q"),
        ]
        rep = evaluate_corpus(pairs)
        by_id = {sid: (b, c, m) for sid, b, c, m in rep.per_segment}
        assert by_id["s2"][1] == pytest.approx(oracle_chrf("abcd", "abce", 6, 2.0), abs=1e-9)
        assert by_id["s3"][2] == pytest.approx(34.48, abs=0.05)
        assert by_id["s4"][0] == pytest.approx(100.0)
        # per-segment BLEU is epsilon-smoothed, so disjoint vocab is small
        # but nonzero; chrF and METEOR stay at exactly zero
        assert 0.0 < by_id["s5"][0] < 15.0
        assert by_id["s5"][1] == 0.0 and by_id["s5"][2] == 0.0

    def test_pooling_differs_from_averaging(self):
        # counting oracle on a 2-pair corpus: a perfect long segment and a
        # poor short one pool differently from their score average
        pairs = [
            ("a", "the king said so to them all", "the king said so to them all"),
            ("b", "wrong", "the bishop went home"),
        ]
        rep = evaluate_corpus(pairs)
        assert rep.corpus["bleu"] != pytest.approx(rep.segment_mean["bleu"])

    def test_distribution_fields(self):
        pairs = [(f"s{i}", t, t) for i, t in enumerate(["a b c d e"] * 4)] + [
            ("out", "zzz qqq", "a b c d e")
        ]
        rep = evaluate_corpus(pairs)
        dist = rep.distribution["chrf"]
        assert dist.q1 <= dist.median <= dist.q3
        assert "out" in dist.outlier_ids

    def test_empty_input(self):
        with pytest.raises(ValidationError):
            evaluate_corpus([])

    def test_scores_in_range(self):
        rep = evaluate_corpus([("a", "se cyning", "se cyning cwæð")])
        for _, b, c, m in rep.per_segment:
            assert 0.0 <= b <= 100.0 and 0.0 <= c <= 100.0 and 0.0 <= m <= 100.0
