"""End to end tests of the command line interface."""

import json
import shutil
import subprocess

import numpy as np
import pytest

from mvinpaint import cli
from mvinpaint.fileio import read_mask, read_mvi
from mvinpaint.synthetic import cut_mask, generate_sphere_image


def run_cli(*args):
    return cli.run([str(a) for a in args])


def json_summary(err):
    lines = [ln for ln in err.strip().splitlines() if ln.startswith("{")]
    assert lines, f"no JSON summary on stderr: {err!r}"
    return json.loads(lines[-1])


class TestGenerate:
    def test_writes_sphere_image(self, tmp_path, capsys):
        out = tmp_path / "img.mvi"
        assert run_cli("generate", "--manifold", "s2",
                       "--rows", 8, "--cols", 10, "-o", out) == 0
        img = read_mvi(out)
        assert img.data.tobytes() == generate_sphere_image(8, 10).data.tobytes()
        summary = json_summary(capsys.readouterr().err)
        assert summary["command"] == "generate"
        assert summary["status"] == "ok"
        assert summary["output"] == str(out)

    def test_writes_spd_image(self, tmp_path, capsys):
        out = tmp_path / "img.mvi"
        assert run_cli("generate", "--manifold", "spd2",
                       "--rows", 6, "--cols", 6, "-o", out) == 0
        img = read_mvi(out)
        assert img.descriptor.kind == "spd"
        img.validate()

    def test_rejects_bad_dimensions(self, tmp_path, capsys):
        rc = run_cli("generate", "--manifold", "s2",
                     "--rows", 0, "--cols", 4, "-o", tmp_path / "x.mvi")
        assert rc == 1
        assert "usage error" in capsys.readouterr().err


class TestMaskCommand:
    def test_writes_hole_mask(self, tmp_path, capsys):
        out = tmp_path / "hole.pbm"
        assert run_cli("mask", "--rows", 8, "--cols", 8,
                       "--rect", "2,2,3,3", "-o", out) == 0
        mask = read_mask(out)
        assert np.array_equal(mask.known, cut_mask(8, 8, (2, 2, 3, 3)).known)
        summary = json_summary(capsys.readouterr().err)
        assert summary["unknown_pixels"] == 9
        assert summary["parameters"]["rect"] == [2, 2, 3, 3]

    def test_rejects_malformed_rect(self, tmp_path, capsys):
        rc = run_cli("mask", "--rows", 8, "--cols", 8,
                     "--rect", "1,2,3", "-o", tmp_path / "x.pbm")
        assert rc == 1

    def test_rejects_covering_rect(self, tmp_path, capsys):
        rc = run_cli("mask", "--rows", 4, "--cols", 4,
                     "--rect", "0,0,4,4", "-o", tmp_path / "x.pbm")
        assert rc == 1
        assert "usage error" in capsys.readouterr().err


class TestPipeline:
    def test_full_cycle(self, tmp_path, capsys):
        img_p = tmp_path / "truth.mvi"
        mask_p = tmp_path / "hole.pbm"
        out_p = tmp_path / "filled.mvi"
        ppm_p = tmp_path / "filled.ppm"

        assert run_cli("generate", "--manifold", "s2",
                       "--rows", 16, "--cols", 16, "-o", img_p) == 0
        assert run_cli("mask", "--rows", 16, "--cols", 16,
                       "--rect", "6,6,4,4", "-o", mask_p) == 0
        capsys.readouterr()

        rc = run_cli("inpaint", "-i", img_p, "-m", mask_p, "-o", out_p,
                     "--k", 4, "--p", 2, "--r", 6,
                     "--eps", "1e-6", "--max-iter", 200)
        assert rc == 0
        summary = json_summary(capsys.readouterr().err)
        assert summary["command"] == "inpaint"
        assert summary["parameters"]["k"] == 4
        assert "solve_s" in summary["timings"]
        assert "total_s" in summary["timings"]
        assert len(summary["layers"]) >= 1
        for rec in summary["layers"]:
            assert set(rec) == {"index", "border_size", "active_size",
                                "iterations", "residual"}

        truth = read_mvi(img_p)
        filled = read_mvi(out_p)
        filled.validate()
        known = read_mask(mask_p).known
        assert filled.data[known].tobytes() == truth.data[known].tobytes()

        assert run_cli("render", "-i", out_p, "-m", mask_p, "-o", ppm_p) == 0
        raw = ppm_p.read_bytes()
        assert raw.startswith(b"P6\n16 16\n255\n")
        assert len(raw) == 13 + 16 * 16 * 3
        summary = json_summary(capsys.readouterr().err)
        assert summary["style"] == "ppm"

        assert run_cli("compare", "-a", out_p, "-b", img_p, "-m", mask_p) == 0
        out, err = capsys.readouterr()
        lines = out.strip().splitlines()
        assert lines[0] == "pixels 16"
        assert lines[1].startswith("mean ")
        assert lines[2].startswith("max ")
        assert lines[3].startswith("rms ")
        report = json_summary(err)["report"]
        assert report["pixels"] == 16
        assert abs(report["mean"] - float(lines[1].split()[1])) < 1e-9
        assert report["mean"] < 0.5

    def test_render_svg_for_spd(self, tmp_path, capsys):
        img_p = tmp_path / "field.mvi"
        svg_p = tmp_path / "field.svg"
        assert run_cli("generate", "--manifold", "spd2",
                       "--rows", 6, "--cols", 6, "-o", img_p) == 0
        assert run_cli("render", "-i", img_p, "-o", svg_p) == 0
        text = svg_p.read_text()
        assert text.startswith("<?xml")
        assert text.count("<ellipse") == 36


class TestSummaryRouting:
    def test_log_file_instead_of_stderr(self, tmp_path, capsys):
        log = tmp_path / "run.json"
        assert run_cli("generate", "--manifold", "s2", "--rows", 4,
                       "--cols", 4, "-o", tmp_path / "x.mvi",
                       "--log", log) == 0
        assert capsys.readouterr().err == ""
        summary = json.loads(log.read_text())
        assert summary["command"] == "generate"
        assert summary["status"] == "ok"

    def test_failure_summary_records_exit_code(self, tmp_path, capsys):
        log = tmp_path / "run.json"
        rc = run_cli("inpaint", "-i", tmp_path / "missing.mvi",
                     "-m", tmp_path / "missing.pbm",
                     "-o", tmp_path / "out.mvi", "--log", log)
        assert rc == 2
        summary = json.loads(log.read_text())
        assert summary["status"] == "error"
        assert summary["exit_code"] == 2
        assert "error" in summary


class TestExitCodes:
    @pytest.mark.parametrize("argv", [
        [],
        ["frobnicate"],
        ["generate", "--manifold", "m3", "--rows", "4", "--cols", "4", "-o", "x.mvi"],
        ["generate", "--manifold", "s2", "--rows", "four", "--cols", "4", "-o", "x.mvi"],
        ["inpaint"],
    ])
    def test_usage_errors_exit_1(self, argv, capsys):
        assert cli.run(argv) == 1
        assert "usage error" in capsys.readouterr().err

    def test_help_exits_0(self, capsys):
        assert cli.run(["--help"]) == 0
        assert "generate" in capsys.readouterr().out

    def test_tau_out_of_range_exits_1(self, tmp_path, capsys):
        img_p, mask_p = tmp_path / "i.mvi", tmp_path / "m.pbm"
        run_cli("generate", "--manifold", "s2", "--rows", 6, "--cols", 6,
                "-o", img_p)
        run_cli("mask", "--rows", 6, "--cols", 6, "--rect", "2,2,2,2",
                "-o", mask_p)
        rc = run_cli("inpaint", "-i", img_p, "-m", mask_p,
                     "-o", tmp_path / "o.mvi", "--tau", 2)
        assert rc == 1
        assert "usage error" in capsys.readouterr().err

    def test_render_needs_known_extension(self, tmp_path, capsys):
        img_p = tmp_path / "i.mvi"
        run_cli("generate", "--manifold", "s2", "--rows", 4, "--cols", 4,
                "-o", img_p)
        assert run_cli("render", "-i", img_p, "-o", tmp_path / "o.png") == 1

    def test_missing_input_exits_2(self, tmp_path, capsys):
        out = tmp_path / "o.mvi"
        rc = run_cli("inpaint", "-i", tmp_path / "nope.mvi",
                     "-m", tmp_path / "nope.pbm", "-o", out)
        assert rc == 2
        assert not out.exists()
        assert "data error" in capsys.readouterr().err

    def test_directory_input_exits_2(self, tmp_path, capsys):
        rc = run_cli("render", "-i", tmp_path, "-o", tmp_path / "o.ppm")
        assert rc == 2

    def test_corrupt_image_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.mvi"
        bad.write_bytes(b"not an image at all\n")
        rc = run_cli("render", "-i", bad, "-o", tmp_path / "o.ppm")
        assert rc == 2
        assert "data error" in capsys.readouterr().err

    def test_shape_mismatch_exits_2(self, tmp_path, capsys):
        img_p, mask_p = tmp_path / "i.mvi", tmp_path / "m.pbm"
        run_cli("generate", "--manifold", "s2", "--rows", 8, "--cols", 8,
                "-o", img_p)
        run_cli("mask", "--rows", 6, "--cols", 6, "--rect", "2,2,2,2",
                "-o", mask_p)
        rc = run_cli("inpaint", "-i", img_p, "-m", mask_p,
                     "-o", tmp_path / "o.mvi")
        assert rc == 2
        assert "6x6" in capsys.readouterr().err

    def test_weight_underflow_exits_3(self, tmp_path, capsys):
        img_p, mask_p = tmp_path / "i.mvi", tmp_path / "m.pbm"
        run_cli("generate", "--manifold", "s2", "--rows", 8, "--cols", 8,
                "-o", img_p)
        run_cli("mask", "--rows", 8, "--cols", 8, "--rect", "3,3,2,2",
                "-o", mask_p)
        rc = run_cli("inpaint", "-i", img_p, "-m", mask_p,
                     "-o", tmp_path / "o.mvi",
                     "--k", 3, "--p", 1, "--r", 3, "--sigma", "1e-300")
        assert rc == 3
        out, err = capsys.readouterr()
        assert "numerical error" in err
        assert json_summary(err)["exit_code"] == 3


class TestDeterminism:
    def _inpaint(self, tmp_path, img_p, mask_p, out_name, *extra):
        out = tmp_path / out_name
        rc = run_cli("inpaint", "-i", img_p, "-m", mask_p, "-o", out,
                     "--k", 3, "--p", 1, "--r", 4, "--eps", "1e-6",
                     "--max-iter", 150, *extra)
        assert rc == 0
        return out.read_bytes()

    def test_threads_do_not_change_output(self, tmp_path, capsys):
        img_p, mask_p = tmp_path / "i.mvi", tmp_path / "m.pbm"
        run_cli("generate", "--manifold", "s2", "--rows", 12, "--cols", 12,
                "-o", img_p)
        run_cli("mask", "--rows", 12, "--cols", 12, "--rect", "4,4,4,4",
                "-o", mask_p)
        first = self._inpaint(tmp_path, img_p, mask_p, "a.mvi", "--threads", 1)
        again = self._inpaint(tmp_path, img_p, mask_p, "b.mvi", "--threads", 1)
        pooled = self._inpaint(tmp_path, img_p, mask_p, "c.mvi", "--threads", 4)
        assert first == again
        assert first == pooled

    def test_env_thread_count(self, tmp_path, capsys, monkeypatch):
        img_p, mask_p = tmp_path / "i.mvi", tmp_path / "m.pbm"
        run_cli("generate", "--manifold", "s2", "--rows", 10, "--cols", 10,
                "-o", img_p)
        run_cli("mask", "--rows", 10, "--cols", 10, "--rect", "4,4,3,3",
                "-o", mask_p)
        reference = self._inpaint(tmp_path, img_p, mask_p, "a.mvi",
                                  "--threads", 1)
        monkeypatch.setenv("MVG_THREADS", "2")
        assert self._inpaint(tmp_path, img_p, mask_p, "b.mvi") == reference
        monkeypatch.setenv("MVG_THREADS", "not-a-number")
        assert self._inpaint(tmp_path, img_p, mask_p, "c.mvi") == reference


@pytest.mark.skipif(shutil.which("mvinpaint") is None,
                    reason="console script not on PATH")
def test_console_script(tmp_path):
    exe = shutil.which("mvinpaint")
    done = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert done.returncode == 0
    assert "inpaint" in done.stdout

    out = tmp_path / "img.mvi"
    done = subprocess.run(
        [exe, "generate", "--manifold", "s2", "--rows", "4", "--cols", "4",
         "-o", str(out)],
        capture_output=True, text=True,
    )
    assert done.returncode == 0
    assert out.exists()
    assert json.loads(done.stderr.splitlines()[-1])["status"] == "ok"
