import json

import pytest

from jntcodes.catalog import (CatalogError, find_entries, load_catalog, parse_catalog,
                              serialize_catalog, validate_entry)
from jntcodes.perm import build_chain


def tiny(**over):
    e = {"name": "S3", "degree": 3, "order": "6", "two_transitive": True,
         "generators": [[2, 3, 1], [2, 1, 3]], "maximal_subgroups": []}
    e.update(over)
    return json.dumps({"entries": [e]})


def test_leaf_entry():
    (e,) = parse_catalog(tiny())
    assert e.maximal_subgroups == [] and e.declared_order == 6
    assert validate_entry(e).ok


def test_repeated_image_rejected():
    with pytest.raises(CatalogError, match="bijection"):
        parse_catalog(tiny(generators=[[1, 1, 2]]))


def test_syntax_error_has_position():
    with pytest.raises(CatalogError, match="line 1, column"):
        parse_catalog('{"entries": [')


@pytest.mark.parametrize("field,value,msg", [
    ("order", 6, "decimal string"),
    ("degree", 0, "positive integer"),
    ("two_transitive", "yes", "boolean"),
    ("generators", [], "non-empty"),
    ("generators", [[1, 2]], "3 images"),
])
def test_field_checks(field, value, msg):
    with pytest.raises(CatalogError, match=msg):
        parse_catalog(tiny(**{field: value}))


def test_child_degree_must_match():
    child = {"name": "C", "degree": 4, "order": "1", "two_transitive": False,
             "generators": [[1, 2, 3, 4]], "maximal_subgroups": []}
    with pytest.raises(CatalogError, match="differs from parent"):
        parse_catalog(tiny(maximal_subgroups=[child]))


def test_wrong_declared_order_fails_validation():
    (e,) = parse_catalog(tiny(order="12"))
    rep = validate_entry(e)
    assert not rep.ok and [c.check for c in rep.failures] == ["order"]


def test_understated_order_fails_validation():
    (e,) = parse_catalog(tiny(order="3"))
    assert not validate_entry(e).ok


def test_corrupted_generator_fails_membership(catalog):
    doc = json.loads(serialize_catalog(find_entries(catalog, "M11/11")))
    child = doc["entries"][0]["maximal_subgroups"][0]
    g = child["generators"][0]
    # a transposition is odd, and M11 has no odd elements
    g[0], g[1] = g[1], g[0]
    child["order"] = str(build_chain(parse_catalog(json.dumps(
        {"entries": [dict(child, maximal_subgroups=[])]}))[0].group).order())
    (e,) = parse_catalog(json.dumps(doc))
    failed = {c.check for c in validate_entry(e).failures}
    assert "generators in parent" in failed


def test_serialise_round_trip(catalog):
    again = parse_catalog(serialize_catalog(catalog))
    assert all(a.same_structure(b) for a, b in zip(catalog, again))


def test_env_var_selects_file(tmp_path, monkeypatch):
    p = tmp_path / "c.json"
    p.write_text(tiny())
    monkeypatch.setenv("JNT_CATALOG", str(p))
    assert [e.name for e in load_catalog()] == ["S3"]


def test_covers_reference_groups(catalog):
    labels = [e.label for e in catalog]
    assert labels == ["L2(11)/11", "A7/15", "M11/11", "M11/12", "M12/12", "M22/22",
                      "M22.2/22", "M23/23", "M24/24", "PGammaL28/28", "HS/176", "Co3/276"]
    assert find_entries(catalog, "M11") == [catalog[2], catalog[3]]


def test_co3_has_all_maximal_classes(entry):
    co3 = entry("Co3/276")
    indices = sorted(co3.declared_order // m.declared_order for m in co3.maximal_subgroups)
    assert indices == [276, 11178, 37950, 48600, 128800, 170775, 655776, 708400,
                       1536975, 2049300, 2608200, 17931375, 54648000, 344282400]


def test_hs_two_transitive(entry):
    hs = entry("HS/176")
    rep = validate_entry(hs)
    check = next(c for c in rep.checks if c.check == "two-transitive" and c.entry == hs.label)
    assert check.passed


def test_shipped_catalog_validates(catalog):
    for e in catalog:
        rep = validate_entry(e)
        assert rep.ok, rep.failures[:3]
