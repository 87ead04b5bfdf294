import json
import threading
import urllib.error
import urllib.request

import numpy as np
import pytest

from zalmsim import SourceParams, pgen, photonic_trace, spin_spin_dm
from zalmsim.server import build_server


@pytest.fixture(scope="module")
def server_url():
    httpd = build_server("127.0.0.1", 0)
    port = httpd.server_address[1]
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{port}"
    httpd.shutdown()
    httpd.server_close()


def post(url: str, payload) -> tuple[int, dict]:
    body = json.dumps(payload).encode() if not isinstance(payload, bytes) else payload
    req = urllib.request.Request(
        url, data=body, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(req, timeout=60) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def get(url: str) -> tuple[int, dict]:
    try:
        with urllib.request.urlopen(url, timeout=60) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


class TestHealth:
    def test_health_reports_version_and_convention(self, server_url):
        status, payload = get(f"{server_url}/v1/health")
        assert status == 200
        assert payload["engine_version"]
        assert payload["convention_scale"] == 0.5
        assert len(payload["self_test_checksum"]) == 16


class TestMetricsEndpoint:
    def test_matches_library_bit_exactly(self, server_url):
        status, payload = post(
            f"{server_url}/v1/metrics",
            {"mean_photon": 0.1, "bsm_efficiency": 1, "outcoupling_efficiency": 1, "detection_efficiency": 1, "dark_click_prob": 0},
        )
        assert status == 200
        params = SourceParams(mean_photon=0.1)
        assert payload["pgen"] == pgen(params).value
        assert payload["trace"] == photonic_trace(params).value
        assert payload["engine_version"] == "0.1.0"

    def test_random_tuples_bit_exact(self, server_url):
        rng = np.random.default_rng(21)
        for _ in range(5):
            req = {
                "mean_photon": float(rng.uniform(0.01, 0.5)),
                "bsm_efficiency": float(rng.uniform(0.3, 1.0)),
                "outcoupling_efficiency": float(rng.uniform(0.3, 1.0)),
                "detection_efficiency": float(rng.uniform(0.3, 1.0)),
            }
            status, payload = post(f"{server_url}/v1/metrics", req)
            assert status == 200
            params = SourceParams(
                mean_photon=req["mean_photon"],
                eta_b=req["bsm_efficiency"],
                eta_t=req["outcoupling_efficiency"],
                eta_d=req["detection_efficiency"],
            )
            assert payload["pgen"] == pgen(params).value

    def test_spin_dm_present_iff_click_pattern_given(self, server_url):
        status, without = post(f"{server_url}/v1/metrics", {"mean_photon": 0.1})
        assert status == 200 and "spin_dm" not in without
        status, with_dm = post(
            f"{server_url}/v1/metrics",
            {"mean_photon": 0.1, "click_pattern": [1, 0, 1, 1, 0, 0, 1, 0]},
        )
        assert status == 200
        dm = spin_spin_dm(SourceParams(mean_photon=0.1))
        assert with_dm["spin_dm"][0][0][0] == dm.entries[0, 0].real

    def test_malformed_body_is_400(self, server_url):
        status, payload = post(f"{server_url}/v1/metrics", b"{not json")
        assert status == 400
        assert payload["code"] == "malformed"

    def test_missing_required_field_is_400(self, server_url):
        status, payload = post(f"{server_url}/v1/metrics", {"bsm_efficiency": 0.5})
        assert status == 400
        assert payload["field"] == "mean_photon"

    def test_out_of_range_is_422(self, server_url):
        status, payload = post(f"{server_url}/v1/metrics", {"mean_photon": 0.1, "bsm_efficiency": 1.5})
        assert status == 422
        assert payload["code"] == "out_of_range"

    def test_unknown_path_is_404(self, server_url):
        status, _ = post(f"{server_url}/v1/other", {"mean_photon": 0.1})
        assert status == 404


class TestConcurrentRequests:
    def test_parallel_posts_all_match_library(self, server_url):
        import concurrent.futures

        mus = [0.02 * (i + 1) for i in range(8)]

        def call(mu: float):
            return post(f"{server_url}/v1/metrics", {"mean_photon": mu})

        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(call, mus))
        for mu, (status, payload) in zip(mus, results):
            assert status == 200
            assert payload["pgen"] == pgen(SourceParams(mean_photon=mu)).value


class TestSpinDmEndpoint:
    def test_query_parameters(self, server_url):
        status, payload = get(
            f"{server_url}/v1/spin_dm?mean_photon=0.05&outcoupling_efficiency=0.8"
        )
        assert status == 200
        dm = spin_spin_dm(SourceParams(mean_photon=0.05, eta_t=0.8))
        got = np.array([[complex(re, im) for re, im in row] for row in payload["spin_dm"]])
        assert np.array_equal(got, dm.entries)

    def test_explicit_click_pattern(self, server_url):
        status, payload = get(
            f"{server_url}/v1/spin_dm?mean_photon=0.05&click_pattern=0,1,1,1,0,0,1,0"
        )
        assert status == 200
        dm = spin_spin_dm(SourceParams(mean_photon=0.05), (0, 1, 1, 1, 0, 0, 1, 0))
        assert payload["spin_dm"][1][1][0] == dm.entries[1, 1].real
