import pytest

from app import app
from mmskit.core.exceptions import BoundViolationError, PreconditionError
from mmskit.services.constructions import star_instance


@pytest.fixture
def client():
    app.config['TESTING'] = True
    with app.test_client() as client:
        yield client


def test_health(client):
    response = client.get('/health')
    assert response.status_code == 200
    assert response.get_json()["status"] == "ok"


class TestAnalyze:
    def test_star(self, client):
        body = {"values": star_instance(8, 3).to_strings(), "k": 3, "checks": ["matching"]}
        data = client.post('/api/analyze', json=body).get_json()
        assert data["count"] == data["bound"] == 21
        assert data["exit_code"] == 0
        assert data["reports"][0]["claim"] == "matching_bounds"

    def test_precondition_is_reported(self, client):
        body = {"values": star_instance(8, 3).to_strings(), "k": 3, "checks": ["cubic"]}
        response = client.post('/api/analyze', json=body)
        assert response.status_code == 200
        assert response.get_json()["exit_code"] == 3

    @pytest.mark.parametrize("body", [
        {"values": ["1", "-1"]},
        {"values": ["x"], "k": 1},
        {"values": ["1", "-1"], "k": 3},
        {"values": ["1", "-1"], "k": 1, "checks": ["everything"]},
    ])
    def test_rejects(self, client, body):
        assert client.post('/api/analyze', json=body).status_code == 400

    def test_requires_json_object(self, client):
        response = client.post('/api/analyze', data="not json", content_type='text/plain')
        assert response.status_code == 400


class TestLp:
    def test_optimum(self, client):
        body = {"num_vars": 2, "objective": ["1", "1"],
                "constraints": [[[1, 2], "<=", "4"], [[3, 1], "<=", "6"]]}
        data = client.post('/api/lp', json=body).get_json()
        assert data["status"] == "optimal"
        assert data["value"] == "14/5"

    def test_strict(self, client):
        body = {"num_vars": 1, "constraints": [[[1], ">", "2"], [[1], "<", "2"]]}
        assert client.post('/api/lp', json=body).get_json()["feasible"] is False

    def test_num_vars(self, client):
        assert client.post('/api/lp', json={"num_vars": 0}).status_code == 400


class TestCombinatorialRoutes:
    def test_ank(self, client):
        data = client.post('/api/ank', json={"n": 4, "k": 2}).get_json()
        assert data["value"] == 3
        assert len(data["witness_family"]) == 3

    def test_ank_budget(self, client):
        response = client.post('/api/ank', json={"n": 10, "k": 5})
        assert response.status_code == 507
        assert response.get_json()["status"] == "budget"

    def test_ank_rejects(self, client):
        assert client.post('/api/ank', json={"n": 2, "k": 3}).status_code == 400

    def test_baranyai(self, client):
        data = client.post('/api/baranyai', json={"n": 6, "k": 3}).get_json()
        assert data["valid"] is True
        assert len(data["rounds"]) == 10

    def test_baranyai_rejects_non_divisible(self, client):
        assert client.post('/api/baranyai', json={"n": 7, "k": 2}).status_code == 400

    def test_construct(self, client):
        data = client.post('/api/construct/star', json={"n": 8, "k": 3}).get_json()
        assert data["values"][0] == "7/1"
        assert data["k"] == 3

    def test_construct_errors(self, client):
        assert client.post('/api/construct/cube', json={"n": 8}).status_code == 404
        assert client.post('/api/construct/star', json={}).status_code == 400
        assert client.post('/api/construct/hm1', json={"n": 4, "k": 2}).status_code == 400


class TestFeige:
    def test_check(self, client):
        fair = [["0", "1/2"], ["2", "1/2"]]
        data = client.post('/api/feige/check', json={"distributions": [fair, fair], "threshold": "3"}).get_json()
        assert data["status"] == "holds"
        assert data["details"]["tail"] == "3/4"

    def test_rejects(self, client):
        assert client.post('/api/feige/check', json={"distributions": []}).status_code == 400


class TestErrorHandlers:
    def test_violation(self, client, monkeypatch):
        def fail(*args, **kwargs):
            raise BoundViolationError("encodings disagree", witness={"values": ["1/1"]})
        monkeypatch.setattr("mmskit.services.constructions.compute_ank", fail)
        response = client.post('/api/ank', json={"n": 4, "k": 2})
        assert response.status_code == 422
        assert response.get_json()["witness"] == {"values": ["1/1"]}

    def test_precondition(self, client, monkeypatch):
        def fail(*args, **kwargs):
            raise PreconditionError("total is negative")
        monkeypatch.setattr("mmskit.services.baranyai.baranyai_partition", fail)
        response = client.post('/api/baranyai', json={"n": 4, "k": 2})
        assert response.status_code == 422
        assert response.get_json()["status"] == "precondition"
