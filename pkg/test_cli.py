"""
Tests for the grsk command line
"""
import json

import pytest
from scipy import special

from app.api.models import TriangularArray, WeightMatrix
from app.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, dump_json, main, parse_complex
from app.services import grsk_core


@pytest.fixture
def write_json(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else dump_json(payload), encoding='utf-8')
        return str(path)
    return write


def _run(argv, tmp_path):
    out = tmp_path / "out.json"
    code = main(["--out", str(out)] + argv)
    return code, (json.loads(out.read_text(encoding='utf-8')) if out.exists() else None)


class TestApply:
    def test_grsk(self, write_json, tmp_path):
        path = write_json("w.json", WeightMatrix([[1, 2], [3, 4]]).to_dict())
        code, payload = _run(["apply", path, "--mode", "grsk"], tmp_path)
        assert code == EXIT_OK
        assert payload['entries'] == [["6/5", "2"], ["3", "20"]]

    def test_bare_rows(self, write_json, tmp_path):
        path = write_json("w.json", [[1, 1], [1, 1]])
        code, payload = _run(["apply", path, "--mode", "grsk"], tmp_path)
        assert code == EXIT_OK
        assert payload['entries'] == [["1/2", "1"], ["1", "2"]]

    def test_round_trip_is_exact(self, write_json, tmp_path):
        source = WeightMatrix.from_dict({"entries": [["2/3", "5"], ["7", "1/9"], ["4", "3"]]}).to_dict()
        forward = tmp_path / "forward.json"
        assert main(["--out", str(forward), "apply", write_json("w.json", source), "--mode", "grsk"]) == EXIT_OK
        code, payload = _run(["apply", str(forward), "--mode", "grsk-inverse"], tmp_path)
        assert code == EXIT_OK
        assert payload == json.loads(dump_json(source))

    def test_patterns(self, write_json, tmp_path):
        path = write_json("w.json", WeightMatrix([[1, 2], [3, 4]]).to_dict())
        code, payload = _run(["apply", path, "--mode", "grsk", "--emit", "patterns"], tmp_path)
        assert code == EXIT_OK
        assert set(payload) == {'P', 'Q'}

    def test_inverse_from_patterns(self, write_json, tmp_path):
        W = WeightMatrix([[1, 2], [3, 4]])
        path = write_json("pq.json", grsk_core.patterns_from_matrix(grsk_core.apply_grsk(W)).to_dict())
        code, payload = _run(["apply", path, "--mode", "grsk-inverse"], tmp_path)
        assert code == EXIT_OK
        assert payload['entries'] == [["1", "2"], ["3", "4"]]

    def test_triangular(self, write_json, tmp_path):
        path = write_json("t.json", TriangularArray([[2], [3, 5]]).to_dict())
        code, payload = _run(["apply", path, "--mode", "tri"], tmp_path)
        assert code == EXIT_OK
        assert payload['rows'] == [["2"], ["6", "30"]]

    def test_tropical_zeros(self, write_json, tmp_path):
        path = write_json("z.json", [[0, 0], [0, 0]])
        code, payload = _run(["apply", path, "--mode", "tropical"], tmp_path)
        assert code == EXIT_OK
        assert payload['entries'] == [["0", "0"], ["0", "0"]]

    def test_patterns_for_inverse_rejected(self, write_json, tmp_path):
        path = write_json("w.json", [[1, 2], [3, 4]])
        assert main(["apply", path, "--mode", "grsk-inverse", "--emit", "patterns"]) == EXIT_USAGE

    def test_nonpositive_entry(self, write_json):
        path = write_json("w.json", [[1, 0], [3, 4]])
        assert main(["apply", path, "--mode", "grsk"]) == EXIT_USAGE

    def test_unknown_mode(self, write_json):
        assert main(["apply", write_json("w.json", [[1]]), "--mode", "rsk"]) == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        assert main(["apply", str(tmp_path / "absent.json"), "--mode", "grsk"]) == EXIT_USAGE

    def test_invalid_json(self, write_json):
        assert main(["apply", write_json("w.json", "[[1, 2"), "--mode", "grsk"]) == EXIT_USAGE

    @pytest.mark.parametrize("payload, mode", [
        ({"P": [[1]], "Q": [[1]]}, "grsk-inverse"),
        ({"P": {"rows": 5}, "Q": {"rows": [["1"]]}}, "grsk-inverse"),
        ({"P": {"rows": [["1"]], "width": "one"}, "Q": {"rows": [["1"]]}}, "grsk-inverse"),
        ({"P": [[1]], "Q": [[1]]}, "sym"),
        ({"upper": 5, "n": 1}, "sym"),
        ({"upper": ["1"], "n": "one"}, "sym"),
    ])
    def test_malformed_patterns(self, write_json, payload, mode):
        assert main(["apply", write_json("pq.json", payload), "--mode", mode]) == EXIT_USAGE

    def test_patterns_with_different_shapes(self, write_json):
        payload = {"P": {"rows": [["1"]]}, "Q": {"rows": [["2"]]}}
        assert main(["apply", write_json("pq.json", payload), "--mode", "grsk-inverse"]) == EXIT_USAGE

    def test_non_finite_entry(self, write_json):
        path = write_json("w.json", '{"entries": [[1e400, 1], [1, 1]]}')
        assert main(["apply", path, "--mode", "grsk"]) == EXIT_USAGE


class TestVerify:
    def test_core_passes(self, tmp_path):
        code, payload = _run(["--seed", "1", "verify", "--suite", "core", "--trials", "3"], tmp_path)
        assert code == EXIT_OK
        assert payload['passed']

    def test_corrupted_move_is_caught(self, monkeypatch):
        def corrupted(a, b, c, d):
            s = b + c
            return b * c / (a * s), 2 * d * s

        monkeypatch.setattr(grsk_core, "_interior_block", corrupted)
        assert main(["--seed", "1", "verify", "--suite", "core", "--trials", "3"]) == EXIT_FAILED

    def test_unknown_suite(self):
        assert main(["verify", "--suite", "nope"]) == EXIT_USAGE

    def test_nonpositive_trials(self):
        assert main(["verify", "--suite", "core", "--trials", "0"]) == EXIT_USAGE

    def test_summary_on_stderr(self, capsys):
        assert main(["--seed", "2", "verify", "--suite", "sym", "--trials", "2"]) == EXIT_OK
        captured = capsys.readouterr()
        assert "suite=sym" in captured.err
        assert json.loads(captured.out)['suite'] == "sym"


class TestPolymer:
    ARGS = ["polymer", "sample", "--model", "tri", "--alpha", "1.0", "1.5", "--samples", "50"]

    def test_sample_csv_reproducible(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["--seed", "3", "--format", "csv", "--out", str(first)] + self.ARGS) == EXIT_OK
        assert main(["--seed", "3", "--format", "csv", "--out", str(second)] + self.ARGS) == EXIT_OK
        lines = first.read_text(encoding='utf-8').splitlines()
        assert lines[0] == "x1,x2"
        assert len(lines) == 51
        assert first.read_text(encoding='utf-8') == second.read_text(encoding='utf-8')

    def test_bad_params_file(self, write_json):
        path = write_json("p.json", "{not json")
        assert main(["polymer", "sample", "--params", path]) == EXIT_USAGE

    def test_params_outside_region(self, write_json):
        path = write_json("p.json", {"model": "tri", "alpha": [1.0, -2.0]})
        assert main(["polymer", "sample", "--params", path]) == EXIT_USAGE

    def test_needs_params(self):
        assert main(["polymer", "sample"]) == EXIT_USAGE


class TestWhittaker:
    def test_eval_bessel(self, tmp_path):
        code, payload = _run(["whittaker", "eval", "--lam", "0", "0", "--x", "1", "1"], tmp_path)
        assert code == EXIT_OK
        assert float(payload['value']['re']) == pytest.approx(2 * special.k0(2.0), rel=1e-7)
        assert payload['n'] == 2

    def test_verify_square(self, tmp_path):
        argv = ["whittaker", "verify", "--kind", "square", "--lam", "0.5", "--nu", "1", "--s", "2"]
        code, payload = _run(argv, tmp_path)
        assert code == EXIT_OK
        assert payload['passed']

    def test_eval_nonpositive_x(self):
        assert main(["whittaker", "eval", "--lam", "0", "0", "--x", "1", "-1"]) == EXIT_USAGE

    def test_eval_lambda_comma_separated(self, tmp_path):
        code, payload = _run(["whittaker", "eval", "--lambda", "0,0", "--x", "1,1"], tmp_path)
        assert code == EXIT_OK
        assert float(payload['value']['re']) == pytest.approx(2 * special.k0(2.0), rel=1e-7)

    def test_eval_lambda_i_suffix(self, tmp_path):
        code, payload = _run(["whittaker", "eval", "--n", "2", "--lambda", "0.5+1i,0.3", "--x", "1", "2"], tmp_path)
        assert code == EXIT_OK
        assert payload['lambda'] == [{'re': '0.5', 'im': '1'}, {'re': '0.29999999999999999', 'im': '0'}]

    def test_eval_bad_lambda(self):
        assert main(["whittaker", "eval", "--lambda", "0,zero", "--x", "1", "1"]) == EXIT_USAGE

    def test_verify_lambda_spelling(self, tmp_path):
        argv = ["whittaker", "verify", "--kind", "square", "--lambda", "0.5", "--nu", "1", "--s", "2"]
        code, payload = _run(argv, tmp_path)
        assert code == EXIT_OK
        assert payload['passed']


@pytest.mark.parametrize("token, value", [("0.5+1i", 0.5 + 1j), ("2", 2), ("-1i", -1j), ("0.3-2j", 0.3 - 2j)])
def test_parse_complex(token, value):
    assert parse_complex(token) == value
