"""
Tests for finite groupoids: constructors, validation and the file format.
"""

import json

import pytest

from groupoid import (
    Groupoid,
    GroupoidError,
    action_groupoid,
    cyclic_group,
    disjoint_union,
    from_dict,
    group_bundle,
    load_groupoid,
    one_object_group,
    pair_groupoid,
    save_groupoid,
    to_dict,
    trivial_group,
    validate,
)
from tests.conftest import GROUPOID_FILES


# ============================================================================
# Constructors
# ============================================================================


class TestConstructors:
    """Generator constructors always return validated groupoids."""

    def test_pair_groupoid_endpoints(self):
        G = pair_groupoid(3)
        assert len(G.arrows) == 9
        assert G.units == ("(1,1)", "(2,2)", "(3,3)")
        # (1,2) goes from (2,2) to (1,1)
        assert G.source["(1,2)"] == "(2,2)"
        assert G.target["(1,2)"] == "(1,1)"
        assert G.compose("(1,2)", "(2,3)") == "(1,3)"
        assert G.compose("(1,2)", "(1,3)") is None
        assert G.inverse["(1,3)"] == "(3,1)"

    def test_pair_groupoid_needs_a_point(self):
        with pytest.raises(GroupoidError):
            pair_groupoid(0)

    def test_cyclic_group(self):
        Z3 = cyclic_group(3)
        assert Z3.arrows == ("a", "a^2", "e")
        assert Z3.units == ("e",)
        assert Z3.compose("a", "a^2") == "e"
        assert Z3.inverse["a"] == "a^2"
        assert trivial_group().arrows == ("e",)

    def test_disjoint_union_tags(self):
        G = disjoint_union(cyclic_group(2), cyclic_group(3))
        assert "1:a" in G.arrows and "2:a^2" in G.arrows
        assert G.units == ("1:e", "2:e")
        assert G.compose("1:a", "2:a") is None
        assert G.compose("2:a", "2:a") == "2:a^2"

    def test_custom_tags_must_be_distinct(self):
        with pytest.raises(GroupoidError):
            disjoint_union(cyclic_group(2), cyclic_group(2), tags=["x", "x"])

    def test_bundle_rejects_non_groups(self):
        with pytest.raises(GroupoidError):
            group_bundle([cyclic_group(2), pair_groupoid(2)])

    def test_action_groupoid_arrows(self):
        Z2 = cyclic_group(2)
        G = action_groupoid(Z2, ["x", "y"], {"e": {"x": "x", "y": "y"}, "a": {"x": "y", "y": "x"}})
        assert G.source["a|x"] == "e|x"
        assert G.target["a|x"] == "e|y"
        # (a|y)(a|x) = (e|x)
        assert G.compose("a|y", "a|x") == "e|x"
        assert G.inverse["a|x"] == "a|y"

    def test_action_must_respect_identity(self):
        Z2 = cyclic_group(2)
        with pytest.raises(GroupoidError) as info:
            action_groupoid(Z2, ["x", "y"], {"e": {"x": "y", "y": "x"}, "a": {"x": "y", "y": "x"}})
        assert {v.axiom for v in info.value.violations} == {"action"}


class TestGroupTables:
    def test_non_associative_table(self):
        # a latin square without an associative product
        elements = ["e", "a", "b"]
        table = [["e", "a", "b"], ["a", "a", "e"], ["b", "e", "b"]]
        with pytest.raises(GroupoidError):
            one_object_group(elements, table)

    def test_product_outside_the_set(self):
        with pytest.raises(GroupoidError) as info:
            one_object_group(["e", "a"], [["e", "a"], ["a", "z"]])
        assert info.value.violations[0].axiom == "closure"

    def test_ragged_table(self):
        with pytest.raises(GroupoidError):
            one_object_group(["e", "a"], [["e", "a"], ["a"]])


# ============================================================================
# Validation
# ============================================================================


class TestValidation:
    """validate() names the failing axiom and its witness."""

    @pytest.mark.parametrize("name", GROUPOID_FILES)
    def test_corpus_is_valid(self, groupoids, name):
        assert validate(groupoids[name]).ok

    def test_missing_composite(self, corpus_dir):
        data = json.loads((corpus_dir / "groupoids" / "pair2.json").read_text(encoding="utf-8"))
        data["compose"] = [e for e in data["compose"] if e[:2] != ["(1,2)", "(2,1)"]]
        report = validate(from_dict(data))
        assert not report.ok
        (violation,) = report.violations
        assert violation.axiom == "composability"
        assert violation.witness == ("(1,2)", "(2,1)")
        assert violation.detail == "missing composite"

    def test_repeated_composite(self, corpus_dir):
        data = json.loads((corpus_dir / "groupoids" / "pair2.json").read_text(encoding="utf-8"))
        data["compose"].append(["(1,2)", "(2,1)", "(2,2)"])
        report = validate(from_dict(data))
        (violation,) = report.violations
        assert violation.axiom == "duplicate composite"
        assert violation.witness == ("(1,2)", "(2,1)")
        assert violation.detail == "given as (1,1) and again as (2,2)"

    def test_repeated_identical_composite(self, corpus_dir, tmp_path):
        data = json.loads((corpus_dir / "groupoids" / "pair2.json").read_text(encoding="utf-8"))
        data["compose"].append(["(1,1)", "(1,1)", "(1,1)"])
        path = tmp_path / "repeated.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(GroupoidError) as info:
            load_groupoid(path)
        assert info.value.violations[0].axiom == "duplicate composite"

    def test_wrong_composite_breaks_identity(self):
        G = pair_groupoid(2)
        table = dict(G.table)
        table[("(1,1)", "(1,2)")] = "(1,1)"
        broken = Groupoid(G.arrows, G.units, G.source, G.target, G.inverse, table, "broken")
        assert "endpoints" in validate(broken).axioms()

    def test_dangling_inverse(self):
        G = pair_groupoid(2)
        inverse = dict(G.inverse)
        inverse["(1,2)"] = "(9,9)"
        broken = Groupoid(G.arrows, G.units, G.source, G.target, inverse, G.table, "broken")
        assert validate(broken).axioms() == {"dangling reference"}

    def test_non_involutive_inverse(self):
        Z3 = cyclic_group(3)
        inverse = dict(Z3.inverse)
        inverse["a"] = "a"
        broken = Groupoid(Z3.arrows, Z3.units, Z3.source, Z3.target, inverse, Z3.table, "broken")
        assert "inverse" in validate(broken).axioms()


# ============================================================================
# File format
# ============================================================================


class TestFiles:
    def test_generator_names(self, groupoids):
        assert groupoids["pair3"].name == "pair(3)"
        assert groupoids["z2"].name == "Z2"
        assert groupoids["pair2"].name == "pair2"

    def test_save_and_load(self, tmp_path, groupoids):
        G = groupoids["z2_swap_action"]
        path = tmp_path / "action.json"
        save_groupoid(G, path)
        again = load_groupoid(path)
        assert to_dict(again) == to_dict(G)

    def test_unnamed_file_takes_its_stem(self, tmp_path):
        data = to_dict(pair_groupoid(2))
        del data["name"]
        path = tmp_path / "square.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        assert load_groupoid(path).name == "square"

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(GroupoidError):
            load_groupoid(path)

    def test_unknown_generator(self):
        with pytest.raises(GroupoidError):
            from_dict({"generator": {"kind": "torus"}})

    def test_invalid_explicit_file_raises_on_load(self, tmp_path, corpus_dir):
        data = json.loads((corpus_dir / "groupoids" / "pair2.json").read_text(encoding="utf-8"))
        data["compose"] = data["compose"][1:]
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(GroupoidError) as info:
            load_groupoid(path)
        assert info.value.violations[0].axiom == "composability"
