"""Review API tests over an in-process test client."""

import pytest
from fastapi.testclient import TestClient

from oeforge.api import create_app
from oeforge.corpus import GenerationRecord


@pytest.fixture
def app_store(store):
    ids = []
    for i in range(25):
        gid = store.add_generation(
            GenerationRecord(
                id="",
                style_example_ids=["f-000001"],
                en_text=f"english sentence {i}",
                ang_text=f"ænglisc word {i} on ðam lande",
                review_state="unreviewed",
                en_seq=2 * i + 1,
                ang_seq=2 * i + 2,
            )
        )
        ids.append(gid)
    return store, ids


@pytest.fixture
def client(app_store):
    store, _ = app_store
    return TestClient(create_app(store))


def review_body(record_id, reviewer="alice", **scores):
    body = {
        "record_id": record_id,
        "reviewer": reviewer,
        "inflection": 9,
        "word_order": 8,
        "lexical_choice": 10,
        "semantic_coherence": 7,
    }
    body.update(scores)
    return body


class TestCandidates:
    def test_default_listing(self, client):
        resp = client.get("/candidates")
        assert resp.status_code == 200
        data = resp.json()
        assert data["total"] == 25
        assert len(data["candidates"]) == 20
        first = data["candidates"][0]
        assert set(first) == {
            "record_id",
            "en_text",
            "ang_text",
            "flags",
            "style_example_ids",
            "review_state",
            "provenance",
        }

    def test_pagination(self, client):
        page2 = client.get("/candidates", params={"page": 2}).json()
        assert len(page2["candidates"]) == 5
        page1_ids = {
            c["record_id"] for c in client.get("/candidates").json()["candidates"]
        }
        page2_ids = {c["record_id"] for c in page2["candidates"]}
        assert not page1_ids & page2_ids

    def test_bad_page(self, client):
        assert client.get("/candidates", params={"page": 0}).status_code == 400

    def test_state_filter_after_review(self, client, app_store):
        _, ids = app_store
        client.post("/reviews", json=review_body(ids[0]))
        unreviewed = client.get("/candidates").json()
        accepted = client.get("/candidates", params={"state": "accepted"}).json()
        assert unreviewed["total"] == 24
        assert accepted["total"] == 1
        assert accepted["candidates"][0]["record_id"] == ids[0]


class TestPostReview:
    def test_accept_flow(self, client, app_store):
        _, ids = app_store
        resp = client.post("/reviews", json=review_body(ids[0]))
        assert resp.status_code == 200
        assert resp.json() == {
            "record_id": ids[0],
            "decision": "accepted",
            "average": 8.5,
            "threshold": 7.0,
        }

    def test_reject_flow(self, client, app_store):
        _, ids = app_store
        resp = client.post(
            "/reviews",
            json=review_body(
                ids[1], inflection=5, word_order=5, lexical_choice=5, semantic_coherence=5
            ),
        )
        assert resp.json()["decision"] == "rejected"

    def test_client_supplied_average_ignored(self, client, app_store):
        _, ids = app_store
        body = review_body(
            ids[2], inflection=1, word_order=1, lexical_choice=1, semantic_coherence=1
        )
        body["average"] = 10.0  # bogus claim
        resp = client.post("/reviews", json=body)
        assert resp.status_code == 200
        assert resp.json()["average"] == 1.0
        assert resp.json()["decision"] == "rejected"

    def test_missing_score_400(self, client, app_store):
        _, ids = app_store
        body = review_body(ids[3])
        del body["word_order"]
        resp = client.post("/reviews", json=body)
        assert resp.status_code == 400

    def test_out_of_range_400(self, client, app_store):
        _, ids = app_store
        resp = client.post("/reviews", json=review_body(ids[4], inflection=10.5))
        assert resp.status_code == 400
        assert "inflection" in resp.json()["detail"]

    def test_unknown_record_404(self, client):
        resp = client.post("/reviews", json=review_body("g-999999"))
        assert resp.status_code == 404

    def test_duplicate_reviewer_409(self, client, app_store):
        _, ids = app_store
        assert client.post("/reviews", json=review_body(ids[5])).status_code == 200
        resp = client.post("/reviews", json=review_body(ids[5]))
        assert resp.status_code == 409

    def test_rereview_enabled(self, app_store):
        store, ids = app_store
        client = TestClient(create_app(store, allow_rereview=True))
        client.post("/reviews", json=review_body(ids[6]))
        resp = client.post(
            "/reviews",
            json=review_body(
                ids[6], inflection=2, word_order=2, lexical_choice=2, semantic_coherence=2
            ),
        )
        assert resp.status_code == 200

    def test_custom_threshold(self, app_store):
        store, ids = app_store
        client = TestClient(create_app(store, threshold=9.0))
        resp = client.post("/reviews", json=review_body(ids[7]))  # average 8.5
        assert resp.json() == {
            "record_id": ids[7],
            "decision": "rejected",
            "average": 8.5,
            "threshold": 9.0,
        }


class TestStats:
    def test_no_reviews_404(self, client):
        assert client.get("/stats").status_code == 404

    def test_aggregation(self, client, app_store):
        _, ids = app_store
        client.post("/reviews", json=review_body(ids[0]))
        client.post(
            "/reviews",
            json=review_body(
                ids[1], inflection=7, word_order=8, lexical_choice=8, semantic_coherence=9
            ),
        )
        data = client.get("/stats").json()
        assert data["review_count"] == 2
        assert data["inflection"] == pytest.approx(8.0)
        assert data["semantic_coherence"] == pytest.approx(8.0)
        expected_overall = (8.0 + 8.0 + 9.0 + 8.0) / 4
        assert data["overall"] == pytest.approx(expected_overall)


class TestStaticUi:
    def test_ui_mounted_when_dir_exists(self, store, tmp_path):
        (tmp_path / "index.html").write_text("<html><body>review ui</body></html>")
        client = TestClient(create_app(store, ui_dir=str(tmp_path)))
        resp = client.get("/")
        assert resp.status_code == 200
        assert "review ui" in resp.text

    def test_api_still_reachable_with_ui(self, store, tmp_path):
        (tmp_path / "index.html").write_text("<html></html>")
        client = TestClient(create_app(store, ui_dir=str(tmp_path)))
        assert client.get("/candidates").status_code == 200
