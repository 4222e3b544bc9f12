#!/usr/bin/env python3
"""Smoke test for the specsym_py extension module.

Builds nothing itself — run `python3 python/build.py` first. Exercises the
whole binding surface on real inputs and asserts the frozen headline
numbers from the corpus.
"""

import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

import specsym_py  # noqa: E402

CORPUS = HERE.parent / "corpus"


def check_program_exploration() -> None:
    source = (CORPUS / "abs_sum.sx").read_text()
    program = specsym_py.Program(source)
    assert program.longest_path() == 3

    pure = program.explore(strategy="pure")
    assert pure["stats"]["total"] == 14, pure["stats"]
    assert pure["stats"]["sat"] == 14
    assert len(pure["leaves"]) == 8
    assert all(leaf["end"] == "normal" for leaf in pure["leaves"])
    assert pure["bugs"] == []

    sse = program.explore(strategy="sse", depth=3)
    assert sse["stats"]["total"] == 8, sse["stats"]
    assert {leaf["sides"] for leaf in sse["leaves"]} == {
        leaf["sides"] for leaf in pure["leaves"]
    }

    # At depth 1 speculation degenerates to the pure search: the ordered
    # query sequence is identical.
    k1 = program.explore(strategy="sse", depth=1)
    pure_queries = [(q["sides"], q["sat"]) for q in pure["queries"]]
    k1_queries = [(q["sides"], q["sat"]) for q in k1["queries"]]
    assert pure_queries == k1_queries


def check_bug_reporting() -> None:
    source = (CORPUS / "dead_div.sx").read_text()
    program = specsym_py.Program(source)

    clean = program.explore(strategy="sse", depth=2)
    assert clean["bugs"] == [], clean["bugs"]

    unchecked = program.explore(strategy="sse", depth=2, recheck=False)
    assert len(unchecked["bugs"]) == 1
    assert unchecked["bugs"][0]["witness"] is None  # unconfirmed report

    try:
        specsym_py.Program("sym int x; if (x < ) { print(x); }")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed program must raise ValueError")


def check_tree_simulation() -> None:
    full = specsym_py.Tree.full(3)
    assert full.height == 3
    assert full.side_counts() == (14, 0)

    pure = full.simulate_pure()
    assert pure["total"] == 14

    sse = full.simulate_sse(k=3)
    assert sse["total"] == 8
    assert sse["total"] == specsym_py.predicted_calls(3, 3)

    # A height where the closed form is exact (k does not divide n).
    tall = specsym_py.Tree.full(5)
    assert tall.simulate_sse(k=3)["total"] == specsym_py.predicted_calls(5, 3)

    parsed = specsym_py.Tree(str(full))
    assert parsed.side_counts() == full.side_counts()

    random = specsym_py.Tree.random(6, 0.25, seed=42)
    again = specsym_py.Tree.random(6, 0.25, seed=42)
    assert str(random) == str(again)
    ratio = random.simulate_sse(k=4)["total"] / random.simulate_pure()["total"]
    assert ratio > 0.5

    try:
        specsym_py.Tree("((F")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed tree must raise ValueError")


def check_fixture_replays() -> None:
    names = specsym_py.fixture_names()
    assert names == ["fig3a", "fig3b", "fig4a", "fig4b", "fig7"]
    totals = {}
    for name in names:
        replay = specsym_py.replay_fixture(name)
        assert replay["matches"], (name, replay["first_mismatch"])
        totals[name] = replay["result"]["total"]
    assert totals == {"fig3a": 14, "fig3b": 8, "fig4a": 11, "fig4b": 8, "fig7": 9}
    assert specsym_py.replay_fixture("fig7")["result"]["avoided_sides"] == ["TFT", "TTT"]

    try:
        specsym_py.replay_fixture("fig9")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown fixture must raise ValueError")


def main() -> int:
    checks = [
        check_program_exploration,
        check_bug_reporting,
        check_tree_simulation,
        check_fixture_replays,
    ]
    for check in checks:
        check()
        print(f"ok    {check.__name__}")
    print(f"all {len(checks)} smoke checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
