import contextlib
import io
import json
import os
import tempfile
import unittest

import pandas as pd

from contractlab.cli import EXIT_CAP, EXIT_INPUT, EXIT_OK, main
from contractlab.config.settings import settings

E1 = {
    "model": "multi-agent",
    "costs": [0.06, 0.1],
    "f": {"kind": "additive", "weights": [0.3, 0.5]},
}

E2 = {
    "model": "multi-action",
    "costs": ["1/10", "1/10"],
    "f": {"kind": "additive", "weights": [0.4, 0.4]},
}

TRIANGLE = {"vertices": 3, "edges": [[1, 2], [2, 3], [1, 3]]}


class TestCli(unittest.TestCase):

    def setUp(self) -> None:
        super().setUp()
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self) -> None:
        self._tmp.cleanup()
        super().tearDown()

    def _file(self, name: str, payload) -> str:
        path = os.path.join(self.tmp, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(payload if isinstance(payload, str) else json.dumps(payload))
        return path

    def _run(self, *argv: str):
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            code = main(list(argv) + ["--log-level", "ERROR"])
        return code, stdout.getvalue()

    def test_solve_multiagent(self):
        code, out = self._run("solve", self._file("e1.json", E1))
        assert code == EXIT_OK
        solution = json.loads(out)
        assert solution["S"] == [1, 2]
        assert solution["objective"] == "12/25"

    def test_solve_multiaction(self):
        code, out = self._run("solve", self._file("e2.json", E2), "--model", "multi-action")
        assert code == EXIT_OK
        solution = json.loads(out)
        assert solution["alpha"] == "1/4"
        assert solution["principal_utility"] == "3/5"

    def test_solve_input_errors(self):
        assert self._run("solve", self._file("bad.json", "{oops"))[0] == EXIT_INPUT
        assert self._run("solve", os.path.join(self.tmp, "missing.json"))[0] == EXIT_INPUT
        assert self._run("solve", self._file("e1.json", E1), "--model", "multi-action")[0] == EXIT_INPUT

    def test_cap_override(self):
        cap = settings.enumeration_cap_n
        assert self._run("solve", self._file("e1.json", E1), "--cap-n", "1")[0] == EXIT_CAP
        assert settings.enumeration_cap_n == cap

    def test_generate_hidden_set(self):
        path = os.path.join(self.tmp, "hidden.json")
        code, out = self._run("generate", "hidden-set", "--n", "27", "--seed", "7", "--out", path)
        assert code == EXIT_OK
        assert out == ""
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
        assert document["model"] == "multi-agent"
        assert set(document["costs"]) == {"1/162"}
        assert len(document["f"]["good"]) == 3
        assert document["metadata"]["m"] == 3

    def test_generate_clique_gadget(self):
        code, out = self._run("generate", "clique-xos", "--graph", self._file("tri.json", TRIANGLE))
        assert code == EXIT_OK
        document = json.loads(out)
        assert document["model"] == "multi-action"
        assert document["metadata"]["M"] == "7"
        assert document["metadata"]["epsilon"] == "3"

    def test_generate_kprover(self):
        code, out = self._run("generate", "kprover", "--k", "2", "--ell", "2", "--seed", "0")
        assert code == EXIT_OK
        document = json.loads(out)
        assert document["metadata"]["k_prime"] == 30
        assert document["metadata"]["universe_size"] == 3600
        assert set(document["costs"]) == {"1/1800"}

    def test_generate_needs_arguments(self):
        assert self._run("generate", "hidden-set")[0] == EXIT_INPUT
        assert self._run("generate", "hidden-set", "--n", "10")[0] == EXIT_INPUT

    def test_generate_pseudosymmetric_rejects_non_positive_n(self):
        assert self._run("generate", "pseudo-symmetric", "--n", "0")[0] == EXIT_INPUT
        assert self._run("generate", "pseudo-symmetric", "--n", "-1")[0] == EXIT_INPUT

    def test_verify_one_suite(self):
        path = os.path.join(self.tmp, "runs", "ineq.csv")
        code, _ = self._run("verify", "analytic-inequalities", "--reduced", "--out", path)
        assert code == EXIT_OK
        frame = pd.read_csv(path)
        assert len(frame) > 0
        assert frame["passed"].all()

    def test_verify_unknown_suite(self):
        assert self._run("verify", "no-such-suite", "--reduced")[0] == EXIT_INPUT

    def test_estimate_success(self):
        code, out = self._run("estimate-success", "--n", "512", "--trials", "5000", "--seed", "3")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["m"] == 8
        assert report["set_size"] == 22
        assert report["trials"] == 5000
        assert report["ci_low"] <= report["rate"] <= report["ci_high"]

    def test_clique_commands(self):
        graph = self._file("tri.json", TRIANGLE)
        code, out = self._run("clique", "distinguish", "--graph", graph, "--delta", "1")
        assert code == EXIT_OK
        assert json.loads(out)["verdict"] == "SMALL"

        code, out = self._run("clique", "distinguish", "--graph", graph, "--oracle", "degraded")
        assert code == EXIT_OK
        assert json.loads(out)["verdict"] == "LARGE"

        code, out = self._run("clique", "approx", "--graph", graph)
        assert code == EXIT_OK
        assert 1 <= json.loads(out)["omega_estimate"] <= 3

    def test_argument_errors_exit_two(self):
        with self.assertRaises(SystemExit) as raised:
            with contextlib.redirect_stderr(io.StringIO()):
                main(["generate", "no-such-kind"])
        assert raised.exception.code == 2
