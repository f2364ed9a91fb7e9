def test_health(client):
    assert client.get("/api/health").get_json() == {"status": "ok"}


def test_ust_exact(client):
    body = client.get("/api/ust/exact?n=2..5").get_json()
    assert body["success"]
    assert [row["ratio"] for row in body["data"]] == ["1", "3/5", "11/14", "111/209"]


def test_ust_exact_bad_range(client):
    response = client.get("/api/ust/exact?n=9..2")
    assert response.status_code == 400
    assert response.get_json()["success"] is False


def test_ust_limits(client):
    data = client.get("/api/ust/limits?max_n=12").get_json()["data"]
    assert data["constants"]["even"]["decimal_6dp"] == "0.762892"
    assert len(data["gaps"]) == 12


def test_ust_terms(client):
    data = client.get("/api/ust/terms?n=8").get_json()["data"]
    assert data["S"] == "8288"
    assert data["check"] is True


def test_mst_exact(client):
    data = client.get("/api/mst/exact?n=4").get_json()["data"]
    assert data["ratio"] == "248/315"
    assert (data["ratio_num"], data["ratio_den"], data["ratio_6dp"]) == ("248", "315", "0.787302")
    assert data["method"] == "extensions"


def test_mst_exact_over_cap_is_413(client):
    response = client.get("/api/mst/exact?n=5&method=bruteforce")
    assert response.status_code == 413
    assert "extensions" in response.get_json()["error"]


def test_mst_exact_bad_method(client):
    assert client.get("/api/mst/exact?n=3&method=magic").status_code == 400


def test_mst_tree(client):
    data = client.get("/api/mst/tree?n=2&tree=0,1,2").get_json()["data"]
    assert data["probability"] == "1/4"
    assert data["poset"]["predecessors"] == {"3": [0, 1, 2]}


def test_mst_tree_not_a_tree(client):
    response = client.get("/api/mst/tree?n=3&tree=0,1")
    assert response.status_code == 400


def test_sample(client):
    data = client.get("/api/sample?n=2&dist=ust&samples=10&seed=4").get_json()["data"]
    assert data["estimate"] == 1.0
    assert data["samples"] == 10


def test_sample_uses_config_defaults(client, app):
    data = client.get("/api/sample?n=3").get_json()["data"]
    assert data["samples"] == app.config["DEFAULT_SAMPLES"]
    assert data["seed"] == app.config["DEFAULT_SEED"]


def test_sample_bad_samples(client):
    assert client.get("/api/sample?n=3&samples=abc").status_code == 400
    assert client.get("/api/sample?n=3&samples=0").status_code == 400


def test_compare(client):
    data = client.get("/api/sample/compare?n=4&samples=500&seed=2").get_json()["data"]
    assert data["tail"] == "greater"
    assert data["log10_pvalue"] <= 0


def test_table_json(client):
    data = client.get("/api/table?max_n=5").get_json()["data"]
    assert [r["mst_value"] for r in data["odd"]] == ["4/7", "70052/135135"]
    assert not any(r["approx"] for r in data["even"] + data["odd"])


def test_table_text(client):
    response = client.get("/api/table?max_n=3&format=text")
    assert response.mimetype == "text/plain"
    assert "3/5 = 0.6" in response.get_data(as_text=True)


def test_verify(client):
    data = client.get("/api/verify?max_n=2&samples=0").get_json()["data"]
    assert data["passed"] is True
    assert data["failed"] == []


def test_verify_rejects_oversized_seed(client):
    response = client.get(f"/api/verify?max_n=2&samples=0&seed={2 ** 64}")
    assert response.status_code == 400
    assert "seed" in response.get_json()["error"]


def test_table_rejects_oversized_seed(client):
    assert client.get(f"/api/table?max_n=2&seed={2 ** 64}").status_code == 400
