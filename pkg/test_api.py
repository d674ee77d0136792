"""
Tests for the HTTP API
"""
import pytest

from app import __version__
from app.main import create_app


@pytest.fixture
def client():
    app = create_app()
    app.config['TESTING'] = True
    with app.test_client() as client:
        yield client


def test_health(client):
    response = client.get('/health')
    assert response.status_code == 200
    data = response.get_json()
    assert data['status'] == 'healthy'
    assert data['version'] == __version__
    assert data['services']['apply']


class TestApply:
    def test_grsk(self, client):
        response = client.post('/apply', json={'mode': 'grsk', 'input': [[1, 2], [3, 4]]})
        assert response.status_code == 200
        assert response.get_json()['output']['entries'] == [["6/5", "2"], ["3", "20"]]

    def test_default_mode_is_grsk(self, client):
        response = client.post('/apply', json={'input': {'entries': [[1, 1], [1, 1]]}})
        assert response.get_json()['output']['entries'] == [["1/2", "1"], ["1", "2"]]

    def test_symmetric_patterns(self, client):
        response = client.post('/apply', json={'mode': 'sym', 'emit': 'patterns', 'input': [[1, 1], [1, 1]]})
        assert response.status_code == 200
        output = response.get_json()['output']
        assert output['P'] == output['Q']

    def test_unknown_mode(self, client):
        response = client.post('/apply', json={'mode': 'rsk', 'input': [[1]]})
        assert response.status_code == 400
        assert response.get_json()['error'] == 'Bad request'

    def test_missing_input(self, client):
        assert client.post('/apply', json={'mode': 'grsk'}).status_code == 400

    def test_not_json(self, client):
        assert client.post('/apply', data='matrix', content_type='text/plain').status_code == 400

    def test_nonpositive_entry(self, client):
        response = client.post('/apply', json={'mode': 'grsk', 'input': [[1, -2], [3, 4]]})
        assert response.status_code == 400
        assert response.get_json()['error'] == 'DomainError'

    @pytest.mark.parametrize("mode, payload", [
        ("grsk-inverse", {"P": [[1]], "Q": [[1]]}),
        ("grsk-inverse", {"P": {"rows": 5}, "Q": {"rows": [["1"]]}}),
        ("sym", {"upper": 5, "n": 1}),
    ])
    def test_malformed_patterns(self, client, mode, payload):
        response = client.post('/apply', json={'mode': mode, 'input': payload})
        assert response.status_code == 400
        assert response.get_json()['error'] == 'UsageError'


class TestVerify:
    def test_core(self, client):
        response = client.get('/verify/core?trials=2&seed=1')
        assert response.status_code == 200
        data = response.get_json()
        assert data['passed']
        assert data['seed'] == 1

    def test_trials_bounds(self, client):
        assert client.get('/verify/core?trials=0').status_code == 400

    def test_unknown_suite(self, client):
        response = client.get('/verify/nope')
        assert response.status_code == 400
        assert response.get_json()['detail'] == {'suite': 'nope'}


def test_unknown_route(client):
    assert client.get('/nowhere').status_code == 404
