"""HTTP endpoints: payload shapes, exact rational transport, error mapping."""

from fractions import Fraction

import pytest
from fastapi.testclient import TestClient

from siegel_hecke.catalog import catalog_form, eigenform_document
from siegel_hecke.service import create_app


@pytest.fixture(scope="module")
def client(store):
    return TestClient(create_app(store=store))


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_forms_listing(client):
    response = client.get("/forms")
    assert response.status_code == 200
    forms = response.json()
    assert [f["name"] for f in forms] == [
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
    by_name = {f["name"]: f for f in forms}
    assert by_name["ups20"]["weight"] == 20
    assert by_name["ups20"]["terms"] == 3
    assert by_name["e4"] == {
        "name": "e4",
        "weight": 4,
        "terms": 1,
        "field_degree": None,
    }


def test_cosets_endpoint(client):
    response = client.get("/cosets", params={"operator": "tp", "prime": 3})
    assert response.status_code == 200
    body = response.json()
    assert body["operator"] == "tp"
    assert body["prime"] == 3
    assert body["count"] == 40
    assert len(body["reps"]) == 40
    assert all(len(row) == 16 for row in body["reps"])
    # First representative is the pure dilation diag(3, 3, 1, 1).
    assert body["reps"][0] == [3, 0, 0, 0, 0, 3, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]


def test_cosets_rejects_bad_input(client):
    nonprime = client.get("/cosets", params={"operator": "tp", "prime": 9})
    assert nonprime.status_code == 400
    assert "not prime" in nonprime.json()["detail"]

    unknown = client.get("/cosets", params={"operator": "tq", "prime": 3})
    assert unknown.status_code == 400


def test_eigenvalue_builtin(client):
    response = client.post(
        "/eigenvalue",
        json={"form": "e4", "prime": 2, "digits": 5, "trace_bound": 16},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["name"] == "e4"
    assert body["operator"] == "tp"
    assert body["mode"] == "heuristic"
    assert body["snapped"] == "45"
    assert body["coset_count"] == 15
    assert body["trace_bounds"] == {"den": 16, "points": 16}
    lo, hi = (Fraction(s) for s in body["normalized"]["re"])
    assert lo <= 45 <= hi
    assert hi - lo < Fraction(2, 10**5)
    assert abs(body["normalized"]["approx_re"] - 45.0) < 1e-4
    im_lo, im_hi = (Fraction(s) for s in body["normalized"]["im"])
    assert im_lo <= 0 <= im_hi


def test_eigenvalue_document(client):
    doc = eigenform_document(catalog_form("chi10"))
    response = client.post(
        "/eigenvalue",
        json={"document": doc, "prime": 2, "digits": 5, "trace_bound": 16},
    )
    assert response.status_code == 200
    assert response.json()["snapped"] == "240"


def test_eigenvalue_rejects_bad_requests(client):
    doc = eigenform_document(catalog_form("e4"))
    both = client.post(
        "/eigenvalue", json={"form": "e4", "document": doc, "prime": 2}
    )
    assert both.status_code == 400
    assert "exactly one" in both.json()["detail"]

    neither = client.post("/eigenvalue", json={"prime": 2})
    assert neither.status_code == 400

    unknown = client.post("/eigenvalue", json={"form": "e9", "prime": 2})
    assert unknown.status_code == 400

    broken_doc = client.post(
        "/eigenvalue", json={"document": {"name": "x"}, "prime": 2}
    )
    assert broken_doc.status_code == 400

    composite = client.post("/eigenvalue", json={"form": "e4", "prime": 4})
    assert composite.status_code == 400

    bad_y11 = client.post(
        "/eigenvalue", json={"form": "e4", "prime": 2, "y11": "zero"}
    )
    assert bad_y11.status_code == 400

    no_digits = client.post("/eigenvalue", json={"form": "e4", "prime": 2, "digits": 0})
    assert no_digits.status_code == 422


def test_eigenvalue_zero_form_is_server_failure(client):
    # Identically zero form: certification cannot succeed, and the service
    # must report that as a failure rather than a fabricated box.
    doc = {
        "name": "zero10",
        "weight": 10,
        "terms": [
            {"coeff": ["1"], "expo": [0, 0, 1, 0]},
            {"coeff": ["-1"], "expo": [0, 0, 1, 0]},
        ],
    }
    response = client.post(
        "/eigenvalue",
        json={"document": doc, "prime": 2, "digits": 4, "trace_bound": 8},
    )
    assert response.status_code == 500
    assert "certification failure" in response.json()["detail"]
