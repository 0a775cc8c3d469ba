import json
import math

import pytest

from factorcodes.cli import main
from factorcodes.fixtures import merge

PHI = (1 + math.sqrt(5)) / 2


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


REDUCIBLE = {
    "memory": 0, "anticipation": 0, "codomain": ["0", "1"], "table": {"a": 0, "b": 1},
    "domain": {"alphabet": ["a", "b"], "states": ["a", "b"],
               "edges": [["a", "a", 0], ["b", "b", 1]], "kind": "vertex-SFT"},
}


class TestAnalyze:
    def test_merge(self, capsys, tmp_path):
        path = write(tmp_path / "merge.json", merge().to_dict())
        code, rep = run_json(capsys, "analyze", path)
        assert code == 0
        assert rep["finite_to_one"] is False
        assert rep["class_degree"]["class_degree"] == 1
        assert rep["domain"] == {"irreducible": True, "sft": True, "period": 1}
        assert rep["version"] and rep["config"]["seed"] is not None

    def test_xor(self, capsys):
        code, rep = run_json(capsys, "analyze", "fixture:xor")
        assert code == 0 and rep["finite_to_one"] is True
        assert rep["degree"]["degree"] == 2 == rep["class_degree"]["class_degree"]

    def test_reducible(self, capsys, tmp_path):
        code, _, _ = run(capsys, "analyze", write(tmp_path / "r.json", REDUCIBLE))
        assert code == 2

    def test_byte_identical_rerun(self, capsys, tmp_path):
        outs = []
        for i in range(2):
            p = tmp_path / f"a{i}.json"
            assert run(capsys, "analyze", "fixture:merge", "--out", str(p))[0] == 0
            outs.append(p.read_bytes())
        # the output path is part of the embedded config, so compare with it removed
        a, b = (json.loads(o) for o in outs)
        a["config"].pop("output_dir")
        b["config"].pop("output_dir")
        assert a == b
        p = tmp_path / "a0.json"
        run(capsys, "analyze", "fixture:merge", "--out", str(p))
        assert p.read_bytes() == outs[0]


class TestDegree:
    def test_xor(self, capsys):
        code, rep = run_json(capsys, "degree", "fixture:xor")
        assert code == 0 and rep["degree"]["degree"] == 2

    def test_merge_not_finite_to_one(self, capsys):
        code, rep = run_json(capsys, "degree", "fixture:merge")
        assert code == 0 and rep["degree"]["finite_to_one"] is False

    def test_class_degree(self, capsys):
        code, rep = run_json(capsys, "class-degree", "fixture:merge")
        assert code == 0
        w = rep["class_degree"]["witness"]
        assert set(w) == {"w", "n", "M", "depth", "certified"} and w["depth"] == 1

    def test_reducible(self, capsys, tmp_path):
        path = write(tmp_path / "r.json", REDUCIBLE)
        for cmd in ("degree", "class-degree", "lift", "decompose"):
            argv = [cmd, path] + (["--out", str(tmp_path / "d")] if cmd == "decompose" else [])
            code, _, err = run(capsys, *argv)
            assert code == 2 and "NotIrreducible" in err, cmd


class TestDecompose:
    def test_merge(self, capsys, tmp_path):
        out = tmp_path / "merge"
        code, summary, _ = run(capsys, "decompose", "fixture:merge", "--out", str(out))
        assert code == 0 and "all checks pass" in summary
        assert sorted(p.name for p in out.iterdir()) == ["pi1.json", "pi2.json", "report.json",
                                                         "ytilde.json"]
        rep = json.loads((out / "report.json").read_text())
        assert rep["verification"]["ok"] is True

    def test_xor(self, capsys, tmp_path):
        out = tmp_path / "xor"
        assert run(capsys, "decompose", "fixture:xor", "--out", str(out))[0] == 0
        rep = json.loads((out / "report.json").read_text())
        assert rep["verification"]["pi2_degree"]["degree"] == 2

    def test_block(self, capsys, tmp_path):
        block = write(tmp_path / "b.json", {"w": ["1", "1", "1"], "n": 1, "M": ["c"]})
        code, _, _ = run(capsys, "decompose", "fixture:merge", "--block", block,
                         "--out", str(tmp_path / "d"))
        assert code == 0

    def test_non_minimal_block(self, capsys, tmp_path):
        block = write(tmp_path / "b.json", {"w": ["1", "1", "1"], "n": 1, "M": ["b", "c"]})
        code, _, err = run(capsys, "decompose", "fixture:merge", "--block", block,
                           "--out", str(tmp_path / "d"))
        assert code == 1 and "NotMinimal" in err


class TestThermo:
    def test_pressure_full(self, capsys):
        code, rep = run_json(capsys, "pressure", "full:2")
        assert code == 0 and abs(rep["pressure"] - math.log(2)) < 1e-12

    def test_pressure_golden(self, capsys):
        _, rep = run_json(capsys, "pressure", "golden")
        assert abs(rep["pressure"] - math.log(PHI)) < 1e-10

    def test_pressure_potential(self, capsys, tmp_path):
        phi = write(tmp_path / "phi.json", {"window": 1, "table": {"0": 0.0, "1": math.log(3)}})
        _, rep = run_json(capsys, "pressure", "full:2", "--phi", phi)
        assert abs(rep["pressure"] - math.log(4)) < 1e-10

    def test_equilibrium_parry(self, capsys):
        code, rep = run_json(capsys, "equilibrium", "golden", "--length", "2")
        assert code == 0
        # mu(00) = mu(0) p(0 -> 0) = (phi^2 / (phi^2 + 1)) / phi = 1 / sqrt 5
        assert abs(rep["words"]["probs"]["00"] - 1 / math.sqrt(5)) < 1e-10
        assert abs(rep["entropy"] - math.log(PHI)) < 1e-10

    def test_lift(self, capsys):
        code, rep = run_json(capsys, "lift", "fixture:xor", "--length", "6")
        assert code == 0 and rep["lift"]["ok"] is True
        assert rep["relative_entropy_bracket"]["lower"] <= 0.0

    def test_lift_infinite_to_one(self, capsys):
        code, _, err = run(capsys, "lift", "fixture:merge")
        assert code == 2 and "NotFiniteToOne" in err


class TestMmre:
    def test_merge(self, capsys):
        code, rep = run_json(capsys, "mmre", "fixture:merge", "--order", "2", "--seeds", "3")
        assert code == 0
        assert abs(rep["solve"]["value"] - 1.5 * math.log(2)) < 1e-9
        assert rep["solve"]["value_label"] == "upper bound at order 2"
        assert rep["support"]["full_support"] is True

    def test_markov_target(self, capsys, tmp_path):
        nu = write(tmp_path / "nu.json", {"order": 0, "transitions": {"": {"0": 0.5, "1": 0.5}}})
        code, rep = run_json(capsys, "mmre", "fixture:merge", "--order", "1", "--nu", nu)
        assert code == 0 and abs(rep["solve"]["value"] - 1.5 * math.log(2)) < 1e-9

    def test_crosscheck(self, capsys, tmp_path):
        d = tmp_path / "d"
        assert run(capsys, "decompose", "fixture:merge", "--out", str(d))[0] == 0
        code, rep = run_json(capsys, "mmre", "fixture:merge", "--order", "2", "--crosscheck", str(d))
        assert code == 0 and rep["crosscheck"]["ok"] is True

    def test_window_mismatch(self, capsys, tmp_path):
        phi = write(tmp_path / "phi.json",
                    {"window": 2, "table": {a + b: 0.0 for a in "abc" for b in "abc"}})
        code, _, err = run(capsys, "mmre", "fixture:merge", "--order", "1", "--phi", phi)
        assert code == 2 and "WindowMismatch" in err


class TestErrors:
    def test_malformed_json(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        code, _, err = run(capsys, "analyze", str(p))
        assert code == 2 and "ParseError" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "degree", str(tmp_path / "nope.json"))
        assert code == 2 and "ParseError" in err

    def test_duplicate_states(self, capsys, tmp_path):
        bad = dict(REDUCIBLE, domain={"alphabet": ["a"], "states": ["s", "s"],
                                      "edges": [["s", "s", 0]], "kind": "vertex-SFT"})
        code, _, err = run(capsys, "analyze", write(tmp_path / "d.json", bad))
        assert code == 2 and "ParseError" in err

    def test_malformed_markov_target(self, capsys, tmp_path):
        nu = write(tmp_path / "nu.json", {"order": 0, "transitions": [[0.5, 0.5]]})
        code, _, err = run(capsys, "mmre", "fixture:merge", "--order", "1", "--nu", nu)
        assert code == 2 and "ParseError" in err

    def test_unknown_fixture(self, capsys):
        assert run(capsys, "analyze", "fixture:nope")[0] == 2

    def test_unknown_config_key(self, capsys, tmp_path):
        cfg = write(tmp_path / "c.json", {"no_such_key": 1})
        code, _, err = run(capsys, "analyze", "fixture:merge", "--config", cfg)
        assert code == 2 and "ParseError" in err

    def test_resource_limit(self, capsys, tmp_path):
        cfg = write(tmp_path / "c.json", {"max_words": 50})
        code, _, err = run(capsys, "mmre", "fixture:merge", "--order", "6", "--config", cfg)
        assert code == 3 and "ResourceLimit" in err


class TestRandomCorpus:
    def test_deterministic(self, capsys, tmp_path):
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            assert run(capsys, "random-corpus", "--seed", "7", "--count", "5", "--out", str(d))[0] == 0
        names = sorted(p.name for p in dirs[0].iterdir())
        assert len(names) == 6 and "index.json" in names
        for n in names:
            assert (dirs[0] / n).read_bytes() == (dirs[1] / n).read_bytes()

    def test_files_load(self, capsys, tmp_path):
        run(capsys, "random-corpus", "--seed", "3", "--count", "3", "--out", str(tmp_path))
        index = json.loads((tmp_path / "index.json").read_text())
        for entry in index["codes"]:
            if entry["irreducible"]:
                assert run(capsys, "degree", str(tmp_path / entry["file"]))[0] in (0, 1)

    @pytest.mark.parametrize("flag", ["--max-symbols", "--max-states"])
    def test_bound(self, capsys, tmp_path, flag):
        with pytest.raises(SystemExit) as exc:
            main(["random-corpus", flag, "7", "--out", str(tmp_path)])
        assert exc.value.code == 2
