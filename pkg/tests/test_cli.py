from __future__ import annotations

import json
import os
import shutil
import signal
import socket
import subprocess
import sys
import time
import urllib.request

import pytest

from geoatlas import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidate:
    def test_legacy_file_lenient(self, capsys, legacy_path):
        code, out, _err = run_cli(capsys, "validate", str(legacy_path),
                                  "--axis-order", "lat-lon")
        assert code == 0
        lines = out.strip().splitlines()
        # parse + consistency issues, one line each
        assert [line.split()[1] for line in lines] == [
            "MULTIPLE_NAMES", "DEGENERATE_RING", "UNRESOLVED_STYLE"]
        assert all(line.startswith("WARNING ") for line in lines)
        assert "placemark=pm-1" in lines[0]
        assert "line=" in lines[0]

    def test_clean_dataset_silent(self, capsys, ede_path):
        code, out, _err = run_cli(capsys, "validate", str(ede_path),
                                  "--axis-order", "lat-lon")
        assert code == 0
        assert out == ""

    def test_missing_file(self, capsys):
        code, out, err = run_cli(capsys, "validate", "/no/such/file.kml")
        assert code == 2
        assert out == ""
        assert "error" in err

    def test_malformed_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.kml"
        bad.write_text("<kml><unclosed")
        code, _out, err = run_cli(capsys, "validate", str(bad))
        assert code == 2
        assert "malformed" in err.lower()

    def test_strict_legacy_exits_1(self, capsys, legacy_path):
        code, out, _err = run_cli(capsys, "validate", str(legacy_path),
                                  "--axis-order", "lat-lon", "--strict")
        assert code == 1
        assert out.startswith("ERROR MULTIPLE_NAMES")

    def test_error_issue_exits_1(self, capsys, tmp_path):
        data = tmp_path / "dup.kml"
        data.write_text("""<kml><Document>
        <Placemark id="x"><name>a</name><Point><coordinates>1,1</coordinates></Point></Placemark>
        <Placemark id="x"><name>b</name><Point><coordinates>2,2</coordinates></Point></Placemark>
        </Document></kml>""")
        code, out, _err = run_cli(capsys, "validate", str(data))
        assert code == 1
        assert "ERROR DUPLICATE_ID" in out


class TestConvert:
    def test_dms_to_decimal(self, capsys):
        code, out, _ = run_cli(capsys, "convert", "dms", "7°44'12.75\"N")
        assert code == 0
        assert out.strip() == "7.7368750"

    def test_decimal_to_dms(self, capsys):
        code, out, _ = run_cli(capsys, "convert", "decimal", "4.43611944", "--axis", "lng")
        assert code == 0
        assert out.strip() == "4°26'10.03\" E"

    def test_invalid_dms(self, capsys):
        code, _out, err = run_cli(capsys, "convert", "dms", "99°99'0\"N")
        assert code == 2
        assert err

    def test_decimal_requires_axis(self, capsys):
        code, _out, err = run_cli(capsys, "convert", "decimal", "7.5")
        assert code == 2
        assert "--axis" in err

    def test_decimal_out_of_range(self, capsys):
        code, _out, _err = run_cli(capsys, "convert", "decimal", "95", "--axis", "lat")
        assert code == 2


class TestQuery:
    def test_nearest_self(self, capsys):
        code, out, _ = run_cli(capsys, "query", "nearest",
                               "--lat", "7.73687489", "--lng", "4.43611944", "--k", "1")
        assert code == 0
        assert out == "town-hall\t0.0\n"

    def test_nearest_k3_sorted(self, capsys):
        code, out, _ = run_cli(capsys, "query", "nearest",
                               "--lat", "7.73687489", "--lng", "4.43611944", "--k", "3")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 3
        assert lines[0].split("\t")[0] == "town-hall"
        distances = [float(line.split("\t")[1]) for line in lines]
        assert distances == sorted(distances)

    def test_nearest_k0_is_bad_request(self, capsys):
        code, _out, err = run_cli(capsys, "query", "nearest",
                                  "--lat", "7.7", "--lng", "4.4", "--k", "0")
        assert code == 1
        assert err

    def test_bbox_covers_dataset(self, capsys):
        code, out, _ = run_cli(capsys, "query", "bbox", "--bbox", "2.5,4.0,15.0,14.0")
        assert code == 0
        assert out.splitlines() == ["town-hall", "old-palace", "mogaji-house",
                                    "mosque", "church"]

    def test_bbox_malformed(self, capsys):
        code, _out, err = run_cli(capsys, "query", "bbox", "--bbox", "abc")
        assert code == 1
        assert err

    def test_load_failure(self, capsys):
        code, _out, err = run_cli(capsys, "query", "--data", "/no/such.kml",
                                  "nearest", "--lat", "1", "--lng", "1", "--k", "1")
        assert code == 2
        assert err

    def test_env_fallback(self, capsys, monkeypatch, tmp_path):
        data = tmp_path / "one.kml"
        data.write_text("""<kml><Document>
        <Placemark id="solo"><name>s</name><Point><coordinates>4.4,7.7</coordinates></Point></Placemark>
        </Document></kml>""")
        monkeypatch.setenv("GEOATLAS_DATA", str(data))
        code, out, _ = run_cli(capsys, "query", "nearest",
                               "--lat", "7.7", "--lng", "4.4", "--k", "5")
        assert code == 0
        assert out.splitlines() == ["solo\t0.0"]


class TestFixtures:
    def test_byte_identical_runs(self, capsys, tmp_path):
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        assert run_cli(capsys, "fixtures", "--out", str(first))[0] == 0
        assert run_cli(capsys, "fixtures", "--out", str(second))[0] == 0
        assert first.read_bytes() == second.read_bytes()

    def test_contents(self, capsys, tmp_path):
        out_path = tmp_path / "fixtures.json"
        run_cli(capsys, "fixtures", "--out", str(out_path))
        text = out_path.read_text()
        assert '"range_m": 591657550.5' in text
        doc = json.loads(text)
        startup = [c for c in doc["conversions"] if c["lookat"]["range_m"] == 300.0]
        assert startup and startup[0]["mapview"]["zoom"] == 21
        assert "town-hall" in doc["placemark_points"]

    def test_stdout_when_no_out(self, capsys):
        code, out, _ = run_cli(capsys, "fixtures")
        assert code == 0
        assert json.loads(out)["zoom_range_pairs"][1] == {"zoom": 1,
                                                          "range_m": 591657550.5}

    def test_write_failure(self, capsys, tmp_path):
        code, _out, err = run_cli(capsys, "fixtures",
                                  "--out", str(tmp_path / "missing" / "f.json"))
        assert code == 2
        assert err


class TestReport:
    def test_writes_tsv_and_figures(self, capsys, tmp_path):
        out_dir = tmp_path / "report"
        code, out, _ = run_cli(capsys, "report", "--out-dir", str(out_dir))
        assert code == 0
        paths = out.strip().splitlines()
        assert [os.path.basename(p) for p in paths] == [
            "placemarks.tsv", "overview_map.png", "scene_preview.png"]
        for p in paths:
            assert os.path.getsize(p) > 0
        rows = (out_dir / "placemarks.tsv").read_text().splitlines()
        assert rows[0] == "id\tkind\tlat\tlng\tname"
        assert len(rows) == 6
        assert rows[1].startswith("town-hall\tpoint\t7.736874890\t4.436119440\t")


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def wait_for(url: str, timeout: float = 10.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        try:
            with urllib.request.urlopen(url, timeout=1) as resp:
                return resp.read()
        except OSError:
            time.sleep(0.05)
    raise TimeoutError(f"server never answered at {url}")


class TestServe:
    def test_serves_and_reloads_on_sighup(self, tmp_path, ede_path, legacy_path):
        data = tmp_path / "data.kml"
        shutil.copy(ede_path, data)
        port = free_port()
        proc = subprocess.Popen(
            [sys.executable, "-m", "geoatlas.cli", "serve", "--data", str(data),
             "--axis-order", "lat-lon", "--port", str(port)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE)
        try:
            body = wait_for(f"http://127.0.0.1:{port}/healthz")
            assert json.loads(body) == {"status": "ok"}
            rows = json.loads(wait_for(f"http://127.0.0.1:{port}/api/placemarks"))
            assert len(rows) == 5

            shutil.copy(legacy_path, data)
            proc.send_signal(signal.SIGHUP)
            deadline = time.monotonic() + 10
            while time.monotonic() < deadline:
                rows = json.loads(wait_for(f"http://127.0.0.1:{port}/api/placemarks"))
                if len(rows) == 1:
                    break
                time.sleep(0.1)
            assert len(rows) == 1
        finally:
            proc.terminate()
            proc.wait(timeout=10)

    def test_occupied_port_exits_2(self, ede_path):
        with socket.socket() as blocker:
            blocker.bind(("127.0.0.1", 0))
            blocker.listen(1)
            port = blocker.getsockname()[1]
            proc = subprocess.run(
                [sys.executable, "-m", "geoatlas.cli", "serve", "--data", str(ede_path),
                 "--axis-order", "lat-lon", "--port", str(port)],
                capture_output=True, text=True, timeout=30)
        assert proc.returncode == 2
        assert "cannot bind" in proc.stderr

    def test_port_out_of_range_exits_2(self, capsys):
        code, _out, err = run_cli(capsys, "serve", "--port", "70000")
        assert code == 2
        assert "port" in err
