import random

import pytest

from oracles import naive_bwt, naive_count, naive_ids, random_texts
from succinctxml import RejectedInputError, build_fm_index
from succinctxml.fmindex import FMIndex, SearchRange, WaveletMatrix, suffix_array

TEXTS = [b"aba", b"ab"]


def bwt_string(fm):
    return bytes(fm.L(r) for r in range(1, fm.u + 1))


def doc_ids(fm):
    return [fm.doc.access(j) + 1 for j in range(fm.d)]


def test_two_text_bwt_frozen():
    fm = build_fm_index(TEXTS, sample_rate=1)
    # rows: $1ab$2, $2, a$1.., ab$2, aba$1.., b$2, ba$1..
    assert bwt_string(fm) == b"abb\0\0aa"
    assert doc_ids(fm) == [2, 1]
    assert (bwt_string(fm), doc_ids(fm)) == naive_bwt(TEXTS)


def test_single_text_bwt():
    fm = build_fm_index([b"a"])
    assert bwt_string(fm) == b"a\0"
    # the row ending in 'a' is "$a"; LF maps it to the row starting with 'a'
    assert fm.lf(1) == 2


def test_lf_is_permutation_and_spells_texts():
    fm = build_fm_index(TEXTS, sample_rate=1)
    assert sorted(fm.lf(i) for i in range(1, fm.u + 1)) == list(range(1, fm.u + 1))
    row, out = 1, []
    while fm.L(row) != 0:
        out.append(fm.L(row))
        row = fm.lf(row)
    assert bytes(out) == b"aba"[::-1]


def test_backward_search_examples():
    fm = build_fm_index(TEXTS)
    full = fm.backward_search(b"")
    assert (full.sp, full.ep) == (1, fm.u)
    assert len(fm.backward_search(b"ab")) == 2
    assert fm.backward_search(b"zz").empty
    single = build_fm_index([b"x"])
    assert single.count(b"x") == 1
    assert single.count(b"y") == 0


@pytest.mark.parametrize("mode", ["report", "count", "exists"])
def test_predicate_examples(mode):
    fm = build_fm_index(TEXTS, sample_rate=1)

    def ids(expected):
        return {"report": expected, "count": len(expected), "exists": bool(expected)}[mode]

    assert fm.starts_with(b"ab", 1, 2, mode) == ids([1, 2])
    assert fm.starts_with(b"", 1, 2, mode) == ids([1, 2])
    assert fm.starts_with(b"b", 1, 2, mode) == ids([])
    assert fm.ends_with(b"ba", 1, 2, mode) == ids([1])
    assert fm.ends_with(b"", 1, 2, mode) == ids([1, 2])
    assert fm.ends_with(b"aba", 1, 2, mode) == ids([1])
    assert fm.equals(b"ab", 1, 2, mode) == ids([2])
    assert fm.equals(b"aba", 1, 2, mode) == ids([1])
    assert fm.equals(b"abc", 1, 2, mode) == ids([])
    assert fm.contains(b"ab", 1, 2, mode) == ids([1, 2])
    assert fm.contains(b"aa", 1, 2, mode) == ids([])
    assert fm.contains(b"a", 2, 2, mode) == ids([2])
    assert fm.lex_compare(b"ab", "<=", 1, 2, mode) == ids([2])
    assert fm.lex_compare(b"", ">=", 1, 2, mode) == ids([1, 2])
    assert fm.lex_compare(b"ab", "<", 1, 2, mode) == ids([])
    assert fm.count_all_occurrences(b"ab") == 2


def test_extract_text():
    fm = build_fm_index(TEXTS)
    assert fm.extract_text(1) == b"aba"
    assert fm.extract_text(2) == b"ab"
    with pytest.raises(IndexError):
        fm.extract_text(3)


def test_build_rejects_bad_texts():
    with pytest.raises(RejectedInputError):
        build_fm_index([b"a\0b"])
    with pytest.raises(RejectedInputError):
        build_fm_index([b""])


@pytest.mark.parametrize("seed", range(12))
def test_random_collections_match_oracles(seed):
    rng = random.Random(seed)
    texts = random_texts(rng, rng.randint(1, 25), 12, alphabet=rng.choice([b"ab", b"abc", b"acgt\x01\xff"]))
    L, doc = naive_bwt(texts)
    results = []
    for rate in (1, 4, 64):
        fm = build_fm_index(texts, sample_rate=rate)
        assert bwt_string(fm) == L
        assert doc_ids(fm) == doc
        assert sorted(fm.doc.range_report(0, fm.d, 0, fm.d - 1)) == list(range(fm.d))
        assert [fm.extract_by_lf(i) for i in range(1, fm.d + 1)] == texts
        answers = []
        qrng = random.Random(seed + 1000)
        for _ in range(40):
            p = bytes(qrng.choice(b"abcg") for _ in range(qrng.randint(0, 3)))
            x = qrng.randint(1, len(texts))
            y = qrng.randint(x, len(texts))
            assert fm.count(p) == naive_count(texts, p)
            for kind in ("starts_with", "ends_with", "equals", "contains"):
                got = getattr(fm, kind)(p, x, y)
                assert got == naive_ids(texts, kind, p, x, y), (kind, p, x, y)
                answers.append(got)
            for op in ("<", "<=", ">", ">="):
                got = fm.lex_compare(p, op, x, y)
                assert got == naive_ids(texts, "lex_compare", p, x, y, op)
                answers.append(got)
        results.append(answers)
    # the sampling rate only changes cost
    assert results[0] == results[1] == results[2]


def test_sections_roundtrip_with_plain_store():
    texts = [b"hello", b"world", b"hello world"]
    fm = build_fm_index(texts, sample_rate=2, store_plain=True)
    back = FMIndex.from_sections(**{k: v for k, v in fm.to_sections().items()})
    assert [back.extract_text(i) for i in (1, 2, 3)] == texts
    assert back.contains(b"lo") == [1, 3]
    assert back.equals(b"world") == [2]


def test_wavelet_matrix_against_list():
    rng = random.Random(3)
    vals = [rng.randrange(50) for _ in range(700)]
    wm = WaveletMatrix(vals, 6)
    for _ in range(200):
        c = rng.randrange(50)
        i = rng.randint(0, len(vals))
        assert wm.rank(c, i) == vals[:i].count(c)
    for i in range(0, 700, 7):
        assert wm.access(i) == vals[i]
        c, r = wm.access_rank(i)
        assert (c, r) == (vals[i], vals[:i].count(vals[i]))
    for _ in range(100):
        a = rng.randint(0, 700)
        b = rng.randint(a, 700)
        lo = rng.randrange(50)
        hi = rng.randint(lo, 49)
        inside = [v for v in vals[a:b] if lo <= v <= hi]
        assert wm.range_count(a, b, lo, hi) == len(inside)
        assert sorted(wm.range_report(a, b, lo, hi)) == sorted(inside)


def test_suffix_array_matches_sort():
    import numpy as np
    rng = random.Random(5)
    seq = [rng.randrange(4) for _ in range(300)]
    seq.append(-1)
    sa = suffix_array(np.asarray(seq, dtype=np.int64) + 1)
    assert sa.tolist() == sorted(range(len(seq)), key=lambda i: seq[i:])
