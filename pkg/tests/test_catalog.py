"""Eigenform documents: parsing, algebraic coefficient embedding, and the
bundled forms.

Root isolation is checked against independent oracles: a direct interval
square root for quadratic fields, and sign changes of the polynomial for
the isolation-failure cases.
"""

import json
from fractions import Fraction

import pytest
from gmpy2 import mpq

from siegel_hecke.boxes import BoxField
from siegel_hecke.catalog import (
    CatalogError,
    EigenformSpec,
    FieldSpec,
    builtin_catalog,
    catalog_form,
    eigenform_document,
    embed_algebraic,
    load_eigenform,
    parse_eigenform,
    refine_root,
    serialize_eigenform,
)
from siegel_hecke.engine import default_y11, eigenvalue

GENERATOR_WEIGHTS = (4, 6, 10, 12)


def sqrt5_document(name="toy"):
    return {
        "name": name,
        "weight": 20,
        "field": {
            "poly": [-5, 0, 1],
            "root": {"re": ["2", "5/2"], "im": ["-1/4", "1/4"]},
        },
        "terms": [
            {"coeff": ["1", "1/2"], "expo": [2, 0, 0, 1]},
            {"coeff": ["-3", "0"], "expo": [0, 0, 2, 0]},
        ],
    }


# -- parsing ---------------------------------------------------------------------


def test_parse_rational_document_roundtrip():
    doc = {
        "name": "demo",
        "weight": 20,
        "terms": [
            {"coeff": ["-1"], "expo": [2, 0, 0, 1]},
            {"coeff": ["1785600"], "expo": [0, 0, 2, 0]},
        ],
    }
    spec = parse_eigenform(json.dumps(doc))
    assert spec.name == "demo" and spec.weight == 20 and spec.field is None
    again = parse_eigenform(serialize_eigenform(spec))
    assert again == spec
    assert eigenform_document(again) == eigenform_document(spec)


def test_parse_algebraic_document_roundtrip():
    spec = parse_eigenform(json.dumps(sqrt5_document()))
    assert spec.field is not None and spec.field.degree == 2
    again = parse_eigenform(serialize_eigenform(spec))
    assert again == spec


def test_parse_accepts_bytes_and_decimal_strings():
    doc = sqrt5_document()
    doc["terms"][0]["coeff"] = ["2.5", "0"]
    spec = parse_eigenform(json.dumps(doc).encode())
    assert spec.terms[0].coefficient[0] == Fraction(5, 2)


def test_homogeneity_enforced():
    doc = {
        "name": "bad",
        "weight": 20,
        "terms": [{"coeff": ["1"], "expo": [1, 0, 1, 0]}],  # weight 14
    }
    with pytest.raises(CatalogError, match="weight"):
        parse_eigenform(json.dumps(doc))


def test_malformed_documents_rejected():
    good = sqrt5_document()
    breakers = [
        lambda d: d.pop("name"),
        lambda d: d.update(weight=0),
        lambda d: d.update(terms=[]),
        lambda d: d["terms"][0].update(expo=[1, 0, 0]),
        lambda d: d["terms"][0].update(expo=[1, 0, 0, -1]),
        lambda d: d["terms"][0].update(coeff=[]),
        lambda d: d["terms"][0].update(coeff=["1", "2", "3"]),  # past degree
        lambda d: d["field"].update(poly=[1]),
        lambda d: d["field"]["root"].update(re=["1"]),
    ]
    for brk in breakers:
        doc = json.loads(json.dumps(good))
        brk(doc)
        with pytest.raises(CatalogError):
            parse_eigenform(json.dumps(doc))
    with pytest.raises(CatalogError):
        parse_eigenform("{not json")


def test_floats_rejected_everywhere():
    doc = sqrt5_document()
    doc["terms"][0]["coeff"] = [2.5, "0"]
    with pytest.raises(CatalogError, match="float"):
        parse_eigenform(json.dumps(doc))


# -- root refinement ----------------------------------------------------------------


def test_sqrt5_root_against_direct_square_root():
    spec = parse_eigenform(json.dumps(sqrt5_document()))
    for prec in (128, 256):
        re_lo, re_hi, im_lo, im_hi = refine_root(spec.field, prec)
        f = BoxField(prec + 8)
        direct = f.real(5).sqrt()
        assert re_lo <= mpq(direct.hi) and mpq(direct.lo) <= re_hi
        assert im_lo <= 0 <= im_hi
        assert re_hi - re_lo < mpq(1, 2 ** (prec - 3))
        assert im_hi - im_lo < mpq(1, 2 ** (prec - 3))


def test_root_refinement_nesting():
    spec = parse_eigenform(json.dumps(sqrt5_document()))
    coarse = refine_root(spec.field, 128)
    fine = refine_root(spec.field, 256)
    assert coarse[0] <= fine[0] and fine[1] <= coarse[1]
    assert coarse[2] <= fine[2] and fine[3] <= coarse[3]


def test_wide_box_straddling_two_roots_rejected():
    # x^3 - 3x + 1 has three real roots; sign changes of the polynomial at
    # -2, 0, 1, 2 certify roots in (-2, 0) and (1, 2), so a box covering
    # [-2, 2] cannot isolate.
    poly = lambda x: x**3 - 3 * x + 1
    signs = [poly(x) for x in (-2, 0, 1, 2)]
    assert signs[0] < 0 < signs[1] and signs[2] < 0 < signs[3]
    fspec = FieldSpec(
        polynomial=(1, -3, 0, 1),
        root_re=(Fraction(-2), Fraction(2)),
        root_im=(Fraction(-1, 4), Fraction(1, 4)),
    )
    with pytest.raises(CatalogError):
        refine_root(fspec, 64)


def test_rootless_box_rejected():
    # Same cubic, box around 5: no root there (the polynomial is positive
    # and increasing past its largest root, which sign changes put below 2).
    fspec = FieldSpec(
        polynomial=(1, -3, 0, 1),
        root_re=(Fraction(9, 2), Fraction(11, 2)),
        root_im=(Fraction(-1, 4), Fraction(1, 4)),
    )
    with pytest.raises(CatalogError):
        refine_root(fspec, 64)


def test_isolated_cubic_root_refines():
    # The root in (1.1, 1.8), isolated; the rectangle must stay clear of
    # x = 1 where the derivative vanishes.
    fspec = FieldSpec(
        polynomial=(1, -3, 0, 1),
        root_re=(Fraction(11, 10), Fraction(9, 5)),
        root_im=(Fraction(-1, 8), Fraction(1, 8)),
    )
    re_lo, re_hi, im_lo, im_hi = refine_root(fspec, 128)
    # 2 cos(pi/9) = 1.53208888623...
    assert re_lo < mpq(153208889, 10**8) and re_hi > mpq(153208888, 10**8)
    assert im_lo <= 0 <= im_hi
    assert re_hi - re_lo < mpq(1, 2**125)


# -- embedding -------------------------------------------------------------------------


def test_rational_embedding_tight():
    spec = catalog_form("ups20")
    boxes = embed_algebraic(spec, 128)
    assert len(boxes) == len(spec.terms)
    for box, term in zip(boxes, spec.terms):
        q = term.coefficient[0]
        assert box.contains(q)
        assert mpq(box.radius_up()) <= mpq(1, 2**120)


def test_algebraic_embedding_value():
    # Coefficient 1 + sqrt5/2 at the positive root.
    spec = parse_eigenform(json.dumps(sqrt5_document()))
    boxes = embed_algebraic(spec, 160)
    f = BoxField(192)
    s5 = f.real(5).sqrt()
    expect = f.real(1) + f.real(s5.lo, s5.hi) / f.real(2)
    assert boxes[0].re.overlaps(expect)
    assert boxes[0].im.contains_zero()
    assert boxes[1].re.contains(-3)


# -- the bundled catalog -----------------------------------------------------------------


def test_builtin_catalog_names_and_weights():
    forms = builtin_catalog()
    assert [f.name for f in forms] == [
        "ups20",
        "ups22",
        "ups24a",
        "ups24b",
        "ups26a",
        "ups26b",
        "e4",
        "e6",
        "chi10",
        "chi12",
    ]
    assert [f.weight for f in forms] == [20, 22, 24, 24, 26, 26, 4, 6, 10, 12]


def test_builtin_homogeneity():
    for form in builtin_catalog():
        for term in form.terms:
            w = sum(e * k for e, k in zip(term.exponents, GENERATOR_WEIGHTS))
            assert w == form.weight, (form.name, term.exponents)


def test_builtin_coefficients_spot():
    ups20 = catalog_form("ups20")
    assert [t.coefficient[0] for t in ups20.terms] == [-1, -1, 1785600]
    ups24b = catalog_form("ups24b")
    assert [t.coefficient[0] for t in ups24b.terms] == [
        70,
        -69,
        -214341120,
        53,
        -137604096,
    ]


def test_catalog_form_lookup():
    assert catalog_form("UPS20").name == "ups20"
    with pytest.raises(CatalogError, match="built-in forms"):
        catalog_form("ups999")


def test_load_eigenform_from_file(tmp_path):
    path = tmp_path / "toy.json"
    path.write_text(json.dumps(sqrt5_document()))
    spec = load_eigenform(str(path))
    assert spec.name == "toy"


def test_catalog_forms_numerically_eigen_at_two_points(store):
    # The ratio (F|T_2)(Z) / F(Z) must agree between two evaluation points
    # within combined box radii, for every bundled form.  A raised trace
    # bound keeps the truncated model's bias far below the box radii, so
    # overlap is meaningful evidence without rigorous-mode runtimes.
    y_a = default_y11(2)
    y_b = y_a + Fraction(3, 10)
    for form in builtin_catalog():
        r1 = eigenvalue(form, 2, digits=5, trace_bound=16, y11=y_a, store=store)
        r2 = eigenvalue(form, 2, digits=5, trace_bound=16, y11=y_b, store=store)
        assert r1.normalized.overlaps(r2.normalized), form.name
        assert r1.snapped == r2.snapped, form.name
