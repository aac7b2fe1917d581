#!/usr/bin/env python3
"""
Integration tests - drive the command line end to end through main.main().

Run with: python -m pytest test/test_integration.py -v
"""

import json
import math

import pytest

from main import main
from test_helpers import R90, SHEAR, conjugate, rotation, spec_file_payload


@pytest.fixture
def write(tmp_path):
    """Write a JSON payload into tmp_path and return its path."""

    def _write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return path

    return _write


class TestSynth:
    """The synth subcommand."""

    def test_r90_all_methods(self, write, tmp_path):
        """Three proportional Grams with zero residuals."""
        spec = write("c4.json", spec_file_payload(R90))
        out = tmp_path / "cert.json"
        assert main(["synth", "--method", "all", "--input", str(spec), "--output", str(out)]) == 0

        cert = json.loads(out.read_text())
        assert cert["exit_code"] == 0
        assert [c["method"] for c in cert["certificates"]] == ["averaging", "contraction", "algebraic"]
        assert all(c["residual"] == "0" for c in cert["certificates"])
        assert cert["cross_check"]["agree"] is True
        assert cert["complex_structure"]["j"] == [["0", "1"], ["-1", "0"]]

    def test_certificates_are_byte_identical(self, write, tmp_path):
        """Equal configs give equal files."""
        spec = write("c4s.json", spec_file_payload(conjugate(R90, SHEAR), initial_form=[[1, 0], [0, 2]]))
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for out in (first, second):
            assert main(["synth", "--method", "all", "--input", str(spec), "--output", str(out), "--seed", "7"]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_shear_rejected(self, write, tmp_path):
        """The shear exits 2 with the nilpotent reason."""
        spec = write("shear.json", spec_file_payload(SHEAR))
        out = tmp_path / "cert.json"
        code = main(["synth", "--method", "all", "--input", str(spec), "--output", str(out), "--closure-limit", "16"])
        assert code == 2
        assert json.loads(out.read_text())["screen"]["reason"] == "nilpotent traceless part"

    def test_malformed_matrix(self, write, capsys):
        """A row with three entries exits 1 and names the field."""
        spec = write("bad.json", {"scalar": "rational", "generators": [[[0, 1, 2], [-1, 0]]]})
        assert main(["synth", "--method", "all", "--input", str(spec)]) == 1
        assert "generators[0][0]" in capsys.readouterr().out

    def test_zero_wedge(self, write, capsys):
        """A zero wedge constant exits 1 and names the field."""
        spec = write("c4.json", spec_file_payload(R90, wedge=0))
        assert main(["synth", "--method", "all", "--input", str(spec)]) == 1
        assert "wedge" in capsys.readouterr().out

    def test_method_required(self, write):
        """synth without --method is an input error."""
        spec = write("c4.json", spec_file_payload(R90))
        assert main(["synth", "--input", str(spec)]) == 1

    def test_missing_file(self, tmp_path):
        """An absent input file exits 1."""
        assert main(["synth", "--method", "all", "--input", str(tmp_path / "nope.json")]) == 1

    def test_float_contraction(self, write, tmp_path):
        """A rotation by one radian converges from the command line."""
        spec = write("rot.json", spec_file_payload(rotation(1.0), initial_form=[[1.0, 0.0], [0.0, 2.0]]))
        out = tmp_path / "cert.json"
        code = main([
            "synth", "--method", "contraction", "--input", str(spec), "--output", str(out),
            "--closure-limit", "32", "--max-iter", "200",
        ])
        assert code == 0
        gram = json.loads(out.read_text())["certificates"][0]["gram"]
        assert math.isclose(gram[0][0], gram[1][1], rel_tol=1e-9)

    def test_non_convergence(self, write):
        """An iteration cap that is too small exits 3."""
        spec = write("rot.json", spec_file_payload(rotation(1.0), initial_form=[[1.0, 0.0], [0.0, 2.0]]))
        code = main(["synth", "--method", "contraction", "--input", str(spec), "--closure-limit", "32", "--max-iter", "1"])
        assert code == 3


class TestCheck:
    """The check subcommand."""

    def test_identity_on_c4(self, write, tmp_path):
        """check(I, C4) has residual 0."""
        spec = write("c4.json", spec_file_payload(R90))
        form = write("form.json", {"gram": [[1, 0], [0, 1]]})
        out = tmp_path / "report.json"
        assert main(["check", "--input", str(spec), "--form", str(form), "--output", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["residual"] == "0"
        assert report["positive_definite"] is True

    def test_non_invariant_form(self, write):
        """diag(1, 2) is not C4-invariant."""
        spec = write("c4.json", spec_file_payload(R90))
        form = write("form.json", {"gram": [[1, 0], [0, 2]]})
        assert main(["check", "--input", str(spec), "--form", str(form)]) == 2

    def test_certificate_round_trip(self, write, tmp_path):
        """A synth certificate checks against its own spec."""
        spec = write("c4.json", spec_file_payload(R90))
        cert = tmp_path / "cert.json"
        assert main(["synth", "--method", "averaging", "--input", str(spec), "--output", str(cert)]) == 0
        assert main(["check", "--input", str(spec), "--form", str(cert)]) == 0

    def test_spec_hash_mismatch(self, write, tmp_path):
        """A certificate for another group is refused."""
        spec = write("c4.json", spec_file_payload(R90))
        other = write("c2.json", spec_file_payload(R90.power(2)))
        cert = tmp_path / "cert.json"
        assert main(["synth", "--method", "averaging", "--input", str(spec), "--output", str(cert)]) == 0
        assert main(["check", "--input", str(other), "--form", str(cert)]) == 1


class TestGeom:
    """The geom subcommand."""

    def test_ruler(self, write, tmp_path, capsys):
        """a=(1,1) at 2, b=(0,0) at 0, n=4 prints the 5-point ruler."""
        request = write("ruler.json", {"construction": "ruler", "a": [1, 1], "k": 2, "b": [0, 0], "l": 0, "n": 4})
        out = tmp_path / "ruler_out.json"
        assert main(["geom", "--input", str(request), "--output", str(out)]) == 0
        assert json.loads(out.read_text())["points"] == [
            ["0", "0"], ["1/2", "1/2"], ["1", "1"], ["3/2", "3/2"], ["2", "2"],
        ]
        assert "c_4 = (2, 2)" in capsys.readouterr().out

    def test_line(self, write, tmp_path):
        """The rational line lists its points and one explicit ruler."""
        request = write("line.json", {"construction": "line", "a": [1, 0], "b": [0, 0], "num_bound": 2, "den_bound": 2})
        out = tmp_path / "line_out.json"
        assert main(["geom", "--input", str(request), "--output", str(out)]) == 0
        report = json.loads(out.read_text())
        assert len(report["points"]) == 7
        assert report["witness_ruler"]["point"] == ["-1", "0"]

    def test_parallelogram(self, write, tmp_path):
        """The missing corner is completed."""
        request = write("par.json", {"construction": "parallelogram", "a": [0, 0], "b": [1, 0], "c": [1, 1]})
        out = tmp_path / "par_out.json"
        assert main(["geom", "--input", str(request), "--output", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["d"] == ["0", "1"]
        assert report["parallelogram"] is True

    def test_bad_indices(self, write):
        """k must exceed l."""
        request = write("bad.json", {"construction": "ruler", "a": [1, 1], "k": 0, "b": [0, 0], "l": 0, "n": 4})
        assert main(["geom", "--input", str(request)]) == 1


class TestPatch:
    """The patch subcommand."""

    def test_quartic_rejected(self, tmp_path):
        """The quartic in dimension 3 exits 2 with its witness pair."""
        out = tmp_path / "patch.json"
        assert main(["patch", "--builtin", "quartic", "--dim", "3", "--output", str(out)]) == 2
        witness = json.loads(out.read_text())["witness"]
        assert witness["kind"] == "parallelogram"
        assert witness["vectors"] == [["1", "0", "0"], ["1", "1", "0"]]
        assert witness["residual"] == "-12"

    def test_gram_input(self, write, tmp_path):
        """A Gram file patches back to itself."""
        gram = [["2", "1/2", "0"], ["1/2", "3", "1"], ["0", "1", "4"]]
        request = write("gram.json", {"scalar": "rational", "gram": gram})
        out = tmp_path / "patch.json"
        assert main(["patch", "--input", str(request), "--output", str(out)]) == 0
        assert json.loads(out.read_text())["gram"] == gram

    def test_dimension_out_of_range(self):
        """Dimension 1 is refused."""
        assert main(["patch", "--builtin", "sphere", "--dim", "1"]) == 1
