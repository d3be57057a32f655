import json
import os
import pathlib

import pytest

import umt

DATA = pathlib.Path(os.environ.get("UMT_TEST_DATA", pathlib.Path(__file__).parent.parent / "data"))


def load(name):
    return json.loads((DATA / name).read_text())


def test_version():
    assert umt.__version__ == "0.1.0"


def test_entities():
    e = umt.Entity("{a,{a}}")
    assert str(e) == "{a,{a}}"
    assert e.rank == 2
    assert umt.Entity.atom("a") in e
    assert len(e) == 2
    assert umt.Entity("{{a},a}") == e
    assert hash(umt.Entity("{{a},a}")) == hash(e)
    assert umt.pair(umt.Entity("a"), umt.Entity("b")) == umt.Entity("{{a},{a,b}}")
    with pytest.raises(umt.ParseError):
        umt.Entity("{a,")


def test_levels():
    assert umt.vn_size(2, 1) == 6
    assert umt.vn_size(2, 2) == 66
    assert umt.vn_size(2, 3) is None
    assert len(umt.enumerate_vn(["a", "b"], 2)) == 66


def test_bounded_evaluation():
    assert umt.eval_bounded("forall x in C_{{a,b}} . x in C_{{a,b,c}}")
    assert not umt.eval_bounded("exists x in y . x = z", {"y": umt.Entity("{a}"), "z": umt.Entity("b")})
    with pytest.raises(umt.Error):
        umt.eval_bounded("forall x . x = x")


def test_structures_and_los():
    assert umt.satisfies(load("p_true.json"), "P(x)", {"x": "0"})
    assert not umt.satisfies(load("p_true.json"), "forall x . P(x)")
    family = [load("p_true.json"), load("p_all.json"), load("p_none.json")]
    for point in range(3):
        report = umt.los_check(family, point, depth=1)
        assert report["counterexamples"] == []


def test_star_map():
    ctx = umt.StarContext(["a", "b"], rank_bound=2, index_size=2, principal=1, canonicalize=False)
    assert str(ctx.star(umt.Entity("b"))) == "<a|b>"
    kind, witness = ctx.classify(ctx.star(umt.Entity("{a}")))
    assert kind == "standard" and witness == umt.Entity("{a}")
    assert ctx.classify(umt.Entity("{{{a}}}"))[0] == "external"
    assert umt.check_transfer(ctx, depth=1)["counterexamples"] == []
    assert umt.star_algebra(ctx)["counterexamples"] == []
    with pytest.raises(umt.PreconditionError):
        ctx.star(umt.Entity("{{{a}}}"))


def test_collapse_and_support():
    h = umt.collapse(load("model_ok.json"))
    assert str(h["X"]) == "{atom_a,atom_b}"
    with pytest.raises(umt.PreconditionError, match="s, t"):
        umt.collapse(load("model_nonext.json"))
    assert umt.support_of(load("reversal_aa.json")) == {"i": ["0", "1"], "j": ["0"]}


def test_cli_in_process():
    code, out, err = umt.run_cli(["--json", "vn", "--base", "a,b", "--n", "2"])
    assert code == 0
    assert json.loads(out)["result"]["size"] == 66
    code, _, err = umt.run_cli(["collapse", "--model", str(DATA / "model_nonext.json")])
    assert code == 2 and "s, t" in err
