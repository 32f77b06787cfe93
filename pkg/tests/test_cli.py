import json

from wba.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestVerifyProps:
    def test_only_prop5_passes(self, capsys):
        code, out, _ = run(capsys, "verify-props", "--only", "prop5", "--tuples", "3")
        assert code == 0
        assert "prop5" in out and "FAIL" not in out

    def test_unreachable_tolerance_fails(self, capsys):
        code, out, _ = run(capsys, "verify-props", "--only", "prop3", "--tuples", "3",
                           "--tolerance", "1e-30")
        assert code == 2
        assert "FAIL" in out

    def test_bad_filter(self, capsys):
        code, _, err = run(capsys, "verify-props", "--only", "nosuchgroup")
        assert code == 1

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "verify-props", "--only", "prop6", "--tuples", "2",
                           "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert all(case["passed"] for case in payload)


class TestProjector:
    def test_worked_example(self, capsys):
        code, out, _ = run(capsys, "projector", "--n", "4", "--k", "1", "--d", "2",
                           "--mu", "[2,1]", "--alpha", "[2]", "--unitaries", "3")
        assert code == 0
        assert "gamma = 1" in out
        assert "terms = 18" in out

    def test_second_example_gamma(self, capsys):
        code, out, _ = run(capsys, "projector", "--n", "5", "--k", "2", "--d", "2",
                           "--mu", "[2,1]", "--alpha", "[1]", "--unitaries", "2")
        assert code == 0
        assert "gamma = 3" in out

    def test_inadmissible_labels(self, capsys):
        code, _, err = run(capsys, "projector", "--n", "4", "--k", "1", "--d", "2",
                           "--mu", "[1,1,1]", "--alpha", "[1,1]")
        assert code == 2
        assert "not represented" in err

    def test_emit_map(self, capsys):
        code, out, _ = run(capsys, "projector", "--n", "4", "--k", "1", "--d", "2",
                           "--mu", "[2,1]", "--alpha", "[2]", "--unitaries", "2",
                           "--emit-map", "2", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert float(payload["map_output_min_eig"]) >= -1e-8
        assert float(payload["idempotence_residual"]) < 1e-10


class TestScanBcs:
    def test_csv_contents(self, capsys, tmp_path):
        out_file = tmp_path / "region.csv"
        code, _, _ = run(capsys, "scan-bcs", "--d", "3",
                         "--alpha", "0.25:0.25:1", "--beta", "-0.1:-0.1:1",
                         "--restarts", "8", "--seed", "4", "--out", str(out_file))
        assert code == 0
        lines = out_file.read_text().strip().splitlines()
        assert lines[0] == "alpha,beta,analytic_positive,min_eig,product_min,class"
        fields = lines[1].split(",")
        assert fields[0] == "0.25" and fields[1] == "-0.1"
        assert fields[2] == "true"
        assert fields[5] == "WITNESS_CANDIDATE"

    def test_deterministic_output(self, capsys, tmp_path):
        files = []
        for name in ("a.csv", "b.csv"):
            path = tmp_path / name
            code, _, _ = run(capsys, "scan-bcs", "--alpha", "0:0.5:0.5",
                             "--beta", "0:0:1", "--restarts", "4",
                             "--seed", "9", "--out", str(path))
            assert code == 0
            files.append(path.read_bytes())
        assert files[0] == files[1]

    def test_bad_range(self, capsys):
        code, _, err = run(capsys, "scan-bcs", "--alpha", "zero:one:step",
                           "--beta", "0:0:1")
        assert code == 1

    def test_no_partial_file_on_failure(self, capsys, tmp_path):
        out_file = tmp_path / "never.csv"
        code, _, _ = run(capsys, "scan-bcs", "--alpha", "bad:range:spec",
                         "--beta", "0:0:1", "--out", str(out_file))
        assert code == 1 and not out_file.exists()


class TestWernerPpt:
    def test_maximally_mixed(self, capsys):
        code, out, _ = run(capsys, "werner-ppt",
                           "--r", "0.370370,0.037037,0.592593,0,0,0", "--d", "3")
        assert code == 0
        payload = json.loads(out)
        assert payload["overall"] is True
        assert payload["eigencheck_ppt"] is True
        assert payload["consistent"] is True

    def test_npt_point(self, capsys):
        # large r2 violates the block determinant bound
        code, out, _ = run(capsys, "werner-ppt", "--r", "0.2,0.05,0.75,0,0.5,0.5")
        assert code == 0
        payload = json.loads(out)
        assert payload["overall"] is False and payload["eigencheck_ppt"] is False
        assert payload["conditions"]["block_determinant_f1"] is False

    def test_flag_validation(self, capsys):
        code, _, err = run(capsys, "werner-ppt", "--r", "1,2,3")
        assert code == 1


class TestEwMaps:
    def test_single_row(self, capsys):
        code, out, _ = run(capsys, "ew-maps", "--row", "f3", "--instances", "5",
                           "--seed", "2")
        assert code == 0
        payload = json.loads(out)
        assert float(payload["deviation"]["f3"]) < 1e-10

    def test_all_rows(self, capsys):
        code, out, _ = run(capsys, "ew-maps", "--row", "all", "--instances", "3")
        assert code == 0
        payload = json.loads(out)
        assert len(payload["deviation"]) == 12 and payload["passed"]

    def test_unknown_row(self, capsys):
        code, _, err = run(capsys, "ew-maps", "--row", "h9")
        assert code == 1


class TestCompose:
    def test_loop_product(self, capsys):
        code, out, _ = run(capsys, "compose", "(1 2)^T{2}", "(1 2)^T{2}", "--n", "2")
        assert code == 0
        assert "loops  : 1" in out
        assert "d^1" in out

    def test_plain_product(self, capsys):
        code, out, _ = run(capsys, "compose", "(1 2)", "(2 3)", "--n", "3")
        assert code == 0
        assert "product: (1 2 3)" in out

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "compose", "(1 9)", "(1 2)", "--n", "3")
        assert code == 1


class TestFlags:
    def test_unknown_command(self, capsys):
        assert main(["no-such-command"]) == 1

    def test_missing_required(self, capsys):
        assert main(["projector", "--n", "4"]) == 1
