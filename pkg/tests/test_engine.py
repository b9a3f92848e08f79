import random

import pytest

from oracles import dom_from_xml, oracle_query, random_document
from succinctxml import XmlIndex, compile_query, parse_xpath, plan_and_execute
from succinctxml.automaton import iter_rope
from succinctxml.engine import Runner, plan, seed_atom


def runner_for(idx, query, memo=True, jump=False):
    return Runner(compile_query(query), idx.tree, idx.predicates, memo=memo, jump=jump)


def root_run(runner):
    return runner.top_down_run(0, 1 << runner.A.initial, runner.tree.par.m)


def test_empty_tree_gives_empty_mapping(ex1_index):
    r = runner_for(ex1_index, "//c")
    assert r.top_down_run(None, 0b11) == {}


def test_listitem_keyword_marks_keyword():
    idx = XmlIndex.build(b"<listitem><keyword/></listitem>")
    R = root_run(runner_for(idx, "/descendant::listitem/descendant::keyword", memo=False))
    keyword = idx.tree.tagged_desc(0, idx.tree.code("keyword"))
    assert list(iter_rope(R[0])) == [keyword]
    idx = XmlIndex.build(b"<keyword/>")
    R = root_run(runner_for(idx, "/descendant::listitem/descendant::keyword", memo=False))
    assert list(iter_rope(R.get(0))) == []


def test_descendant_a_on_single_element():
    idx = XmlIndex.build(b"<a/>")
    assert idx.query("//a").ids() == [2]
    assert idx.query("self::node()").ids() == [1]


def test_jump_sets():
    idx = XmlIndex.build(b"<listitem><keyword/></listitem>")
    r = runner_for(idx, "/descendant::listitem/descendant::keyword", jump=True)
    name = idx.tree.name
    assert sorted(name(c) for c in r._jump_codes(0b01)) == ["listitem"]
    assert sorted(name(c) for c in r._jump_codes(0b11)) == ["keyword", "listitem"]
    # wildcard states fall back to plain navigation
    assert runner_for(idx, "//*", jump=True)._jump_codes(0b1) is None


def test_transition_cache_misses_bounded():
    xml = b"<x>" + b"".join(b"<y><x/><y/></y>" if i % 3 else b"<x><y/></x>" for i in range(4000)) + b"</x>"
    idx = XmlIndex.build(xml)
    assert idx.tree.n > 10**4
    r = runner_for(idx, "//x[y]//y")
    root_run(r)
    assert r.stats.trans_misses == len(r._trans)
    assert r.stats.trans_misses <= 2 * 2 * (1 << r.A.nstates)
    assert r.stats.trans_hits > 10**4


@pytest.mark.parametrize("query", ["//a//b", "//a[b]/c", "/a/*[not(d)]", "//b/following-sibling::c",
                                   '//a[contains(., "re")]', '//*[b = "red"]', "//text()"])
def test_strategies_agree(query):
    rng = random.Random(query)
    for _ in range(5):
        xml = random_document(rng, 150)
        idx = XmlIndex.build(xml)
        expected = oracle_query(dom_from_xml(xml), query)
        for strategy in ("naive", "memoized", "jumping", "topdown"):
            assert idx.query(query, strategy).ids() == expected, strategy
        if seed_atom(parse_xpath(query)):
            assert idx.query(query, "bottomup").ids() == expected


def test_value_states_skip_program_cache():
    idx = XmlIndex.build(random_document(random.Random(4), 200))
    r = runner_for(idx, '//a[contains(., "e")]')
    root_run(r)
    assert any(e.has_value for e in r._trans.values())
    assert r._progs
    assert not any(r._trans[key[0]].has_value for key in r._progs)


def test_clearing_caches_changes_nothing():
    xml = random_document(random.Random(8), 300)
    idx = XmlIndex.build(xml)
    query = "//a[b or c]//d"
    A = compile_query(query)
    base = Runner(A, idx.tree, idx.predicates)
    first = sorted(iter_rope(root_run(base).get(A.initial)))

    class Clearing(Runner):
        def select(self, code, r, drop2=0):
            self.clear_caches()
            return super().select(code, r, drop2)

    again = sorted(iter_rope(root_run(Clearing(A, idx.tree, idx.predicates)).get(A.initial)))
    assert first == again


def test_plain_top_down_visits_each_node_once():
    xml = random_document(random.Random(2), 500)
    idx = XmlIndex.build(xml)
    r = runner_for(idx, "//*//*", memo=False, jump=False)
    root_run(r)
    assert r.stats.visited <= idx.tree.n


def test_jumping_visits_only_matches():
    parts = ["<r>"]
    for i in range(3000):
        parts.append("<a/>" if i in (10, 1500, 2900) else "<p><q/><s/><s/></p>")
    xml = ("".join(parts) + "</r>").encode()
    idx = XmlIndex.build(xml)
    assert idx.tree.n > 10**4
    res = idx.query("//a", "jumping")
    assert res.count() == 3
    assert res.stats.visited <= 3 * 3
    assert idx.query("//a", "memoized").stats.visited >= idx.tree.n // 2


def test_bottom_up_empty_seeds(ex1_index):
    assert runner_for(ex1_index, '//c[. = "x"]').bottom_up_run([]) == {}


def test_bottom_up_rejects_unsorted(ex1_index):
    with pytest.raises(ValueError):
        runner_for(ex1_index, '//c[. = "x"]').bottom_up_run([5, 2])


def test_bottom_up_shared_lca_climbed_once():
    xml = b"<r><s><l><k>U1</k><k>U2</k></l></s><l><k>U3</k></l></r>"
    idx = XmlIndex.build(xml)
    query = '//l//k[contains(., "U")]'
    res = idx.query(query, "bottomup")
    assert res.ids() == idx.query(query, "topdown").ids() == oracle_query(dom_from_xml(xml), query)
    tree = idx.tree
    union = set()
    for d in range(1, tree.d + 1):
        x = tree.text_node(d)
        while x is not None:
            union.add(x)
            x = tree.parent(x)
    # every edge into a node on the union of root paths is climbed once; the root is never left
    assert res.stats.parent_calls == len(union) - 1


def test_plan_choice():
    parts = ["<r>"]
    for i in range(2500):
        parts.append(f"<item><name>n{i % 50}</name><v>w</v></item>")
    parts.append("<item><name>rare</name></item><item><name>rare</name></item></r>")
    idx = XmlIndex.build("".join(parts).encode())
    assert idx.tree.n > 10**4
    q = '//item/name[. = "rare"]'
    assert plan(parse_xpath(q), idx.tree, idx.predicates) == "bottomup"
    res = idx.query(q)
    assert res.strategy == "bottomup" and res.count() == 2
    assert idx.query(q, "topdown").ids() == res.ids()
    assert idx.query("//item/name").strategy == "jumping"
    common = '//item/v[. = "w"]'
    assert plan(parse_xpath(common), idx.tree, idx.predicates) == "jumping"


def test_plan_and_execute_accepts_prebuilt_automaton(ex1_index):
    ast = parse_xpath("//c")
    res = plan_and_execute(ast, ex1_index.tree, ex1_index.predicates, "memoized", compile_query("//c"))
    assert res.ids() == [4]


def test_unknown_strategy(ex1_index):
    with pytest.raises(ValueError):
        ex1_index.query("//c", "sideways")
