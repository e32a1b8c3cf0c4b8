import pytest
from rest_framework.test import APIClient

T4 = [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]]
ALL_NONZERO_4 = [[4, 1, 1, 1], [1, 4, 1, 1], [1, 1, 4, 1], [1, 1, 1, 4]]


@pytest.fixture
def client():
    return APIClient()


def post(client, url, data):
    return client.post(url, data, format='json')


class TestRoot:
    def test_api_root(self, client):
        response = client.get('/api/')
        assert response.status_code == 200
        assert response.json()['endpoints']['check'] == '/api/check/'

    def test_health(self, client):
        response = client.get('/api/health/')
        assert response.status_code == 200
        data = response.json()
        assert data['status'] == 'healthy'
        assert data['tolerance']['tol_psd'] == 1e-9


class TestCheck:
    def test_membership(self, client):
        response = post(client, '/api/check/', {'matrix': T4, 'k': 2})
        assert response.status_code == 200
        data = response.json()
        assert data['factor_width']['k'] == 2
        assert data['membership']['status'] == 'Member'

    def test_not_width_one(self, client):
        data = post(client, '/api/check/', {'matrix': T4, 'k': 1}).json()
        assert data['membership']['status'] == 'NotMember'
        assert 'witness' in data['membership']

    def test_missing_matrix(self, client):
        response = post(client, '/api/check/', {'k': 2})
        assert response.status_code == 400
        assert response.json()['error'] == 'ParseError'

    def test_asymmetric(self, client):
        response = post(client, '/api/check/', {'matrix': [[1, 0.5], [0.4, 1]]})
        assert response.status_code == 400
        assert response.json()['error'] == 'NotSymmetric'

    @pytest.mark.parametrize("matrix", [[[1, 2, 3]], [], [[1, 0], [0]]])
    def test_malformed_matrix(self, client, matrix):
        response = post(client, '/api/check/', {'matrix': matrix})
        assert response.status_code == 400
        assert response.json()['error'] == 'ParseError'

    def test_not_psd(self, client):
        response = post(client, '/api/check/', {'matrix': [[1, 2], [2, 1]]})
        assert response.status_code == 422
        assert response.json()['error'] == 'NotPSD'

    def test_k_must_be_integer(self, client):
        response = post(client, '/api/check/', {'matrix': T4, 'k': 'two'})
        assert response.status_code == 400

    def test_get_not_allowed(self, client):
        assert client.get('/api/check/').status_code == 405


class TestMatrixEndpoints:
    def test_decompose(self, client):
        data = post(client, '/api/decompose/', {'matrix': T4, 'k': 2}).json()
        assert data['source'] == 'banded'
        assert data['decomposition']['term_count'] == 4

    def test_bounds(self, client):
        data = post(client, '/api/bounds/', {'matrix': ALL_NONZERO_4, 'k': 2}).json()
        assert data['bounds']['exact'] == 6
        assert data['small']['result'] == {'exact': 6}

    def test_bounds_bad_k(self, client):
        response = post(client, '/api/bounds/', {'matrix': T4, 'k': 7})
        assert response.status_code == 422
        assert response.json()['error'] == 'BadK'

    def test_hadamard_power(self, client):
        data = post(client, '/api/hadamard/', {'matrix': T4, 's': 2}).json()
        assert data['operation'] == 'integer_power'
        assert data['width_claim'] == {'value': 2, 'justification': 'integer-power'}

    def test_hadamard_product(self, client):
        data = post(client, '/api/hadamard/', {'matrix': T4, 'other': ALL_NONZERO_4}).json()
        assert data['operation'] == 'product'
        assert data['input_widths'] == [2, 2]


class TestCombinatorialEndpoints:
    def test_cover(self, client):
        data = post(client, '/api/cover/', {'n': 4, 'k': 2}).json()
        assert data['value'] == 6
        assert data['schonheim'] == 6

    def test_cover_bad_k(self, client):
        response = post(client, '/api/cover/', {'n': 4, 'k': 5})
        assert response.status_code == 422
        assert response.json()['error'] == 'BadArgs'

    def test_cliquecover(self, client):
        edges = [[1, 2], [2, 3], [1, 3], [3, 4]]
        data = post(client, '/api/cliquecover/', {'n': 4, 'k': 3, 'edges': edges}).json()
        assert data['value'] == 2
        assert data['audited'] is True

    def test_cliquecover_bad_edges(self, client):
        response = post(client, '/api/cliquecover/', {'n': 4, 'k': 3, 'edges': [[1, 2, 3]]})
        assert response.status_code == 400

    def test_conjecture(self, client):
        payload = {'n': 4, 'k': 3, 's': 2.5, 'trials': 1, 'seed': 1, 'max_iter': 100}
        data = post(client, '/api/conjecture/', payload).json()
        assert data['tested'] == 1
        assert data['counterexamples'] == []

    def test_conjecture_regime(self, client):
        payload = {'n': 4, 'k': 3, 's': 1.5, 'trials': 1}
        response = post(client, '/api/conjecture/', payload)
        assert response.status_code == 422
        assert response.json()['error'] == 'BadRegime'
