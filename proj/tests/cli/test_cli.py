#!/usr/bin/env python3
"""End-to-end checks of the rlf command line: outputs, exit codes, determinism."""

import json
import os
import stat
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

RLF = None
FIXTURES = None


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("RLF_BRIDGE", None)
    if env:
        full_env.update(env)
    return subprocess.run([RLF, *map(str, args)], capture_output=True, text=True,
                          env=full_env, timeout=120)


def bundle(name):
    return FIXTURES / "bundles" / name


class CliTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory(prefix="rlf-cli-")
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def ok(self, *args, **kw):
        p = run(*args, **kw)
        self.assertEqual(p.returncode, 0, p.stderr)
        return p

    def detect(self, name):
        out = self.dir / f"{name}.failures.json"
        self.ok("detect", bundle(name), "-o", out)
        return out

    def test_detect_writes_failures(self):
        p = self.ok("detect", bundle("vp"))
        doc = json.loads(p.stdout)
        self.assertEqual(doc["kind"], "failures")
        self.assertEqual([f["id"] for f in doc["failures"]], ["vp-320-378-508add49"])

    def test_config_line_on_stderr(self):
        p = self.ok("detect", bundle("clean"))
        line = p.stderr.splitlines()[0]
        self.assertTrue(line.startswith("rlf detect config "), line)
        config = json.loads(line[len("rlf detect config "):])
        self.assertEqual(config["detect"]["eps"], 1.0)
        self.assertEqual(json.loads(p.stdout)["failures"], [])

    def test_localize_and_report(self):
        failures = self.detect("case_study")
        ranked = self.dir / "ranked.json"
        candidates = self.dir / "candidates.json"
        self.ok("localize", bundle("case_study"), failures, "-o", ranked,
                "--candidates-out", candidates)
        doc = json.loads(ranked.read_text())
        entries = doc["failures"][0]["entries"]
        self.assertEqual((entries[0]["property"], entries[1]["property"]),
                         ("height", "margin-top"))
        self.assertEqual(json.loads(candidates.read_text())["kind"], "candidates")
        text = self.ok("report", ranked).stdout
        self.assertIn(".title", text)
        self.assertIn("margin-top", text)

    def test_noi_annotation(self):
        failures = self.detect("noi_transparent")
        doc = json.loads(self.ok("noi", bundle("noi_transparent"), failures).stdout)
        self.assertEqual(doc["failures"][0]["observability"], "noi")
        failures = self.detect("noi_opaque")
        doc = json.loads(self.ok("noi", bundle("noi_opaque"), failures).stdout)
        self.assertEqual(doc["failures"][0]["observability"], "observable")

    def test_evaluate(self):
        pages = []
        truth = {"schema_version": 1, "kind": "truth", "failures": {}}
        for name in ("case_study", "vp"):
            failures = self.detect(name)
            ranked = self.dir / f"{name}.ranked.json"
            self.ok("localize", bundle(name), failures, "-o", ranked)
            pages.append(ranked)
            doc = json.loads(ranked.read_text())
            for f in doc["failures"]:
                top = f["entries"][0]
                truth["failures"][f"{doc['page']}#{f['failure_id']}"] = {
                    "acceptable": [{"xpath": top["xpath"], "property": top["property"]}],
                    "np_flag": False, "note": ""}
        truth_path = self.dir / "truth.json"
        truth_path.write_text(json.dumps(truth))
        metrics = self.dir / "metrics.json"
        self.ok("evaluate", *pages, "--truth", truth_path, "-o", metrics)
        doc = json.loads(metrics.read_text())
        self.assertEqual(doc["total"]["rlf_count"], 2)
        self.assertEqual(doc["total"]["mrr"], 1.0)
        self.assertEqual(doc["total"]["top_n"]["1"], 1.0)
        self.assertIn("total", self.ok("report", metrics).stdout)

    def test_verify_recorded(self):
        failures = self.detect("case_study")
        fid = json.loads(failures.read_text())["failures"][0]["id"]
        index = FIXTURES / "mutations" / "case_study" / "index.json"
        p = self.ok("verify", bundle("case_study"), failures, "--failure", fid,
                    "--xpath", "/html[1]/body[1]/div[1]/h2[1]", "--property", "height",
                    "--mutations", index)
        self.assertEqual(json.loads(p.stdout)["verdict"], "fixes")

    def test_validation_errors_exit_1(self):
        self.assertEqual(run("detect", self.dir / "absent").returncode, 1)
        self.assertEqual(run("bogus-command").returncode, 1)
        bad = self.dir / "bad.json"
        bad.write_text("{not json")
        self.assertEqual(run("localize", bundle("vp"), bad).returncode, 1)
        self.assertEqual(run("report", bad).returncode, 1)
        broken = self.dir / "broken"
        broken.mkdir()
        (broken / "manifest.json").write_text("{}")
        p = run("detect", broken)
        self.assertEqual(p.returncode, 1)
        self.assertIn("rlf:", p.stderr)
        failures = self.detect("vp")
        p = run("verify", bundle("vp"), failures, "--failure", "x", "--xpath", "/x",
                "--property", "width")
        self.assertEqual(p.returncode, 1)

    def write_bridge(self, body):
        script = self.dir / "bridge.sh"
        script.write_text("#!/bin/sh\n" + body)
        script.chmod(stat.S_IRWXU)
        return script

    def test_capture_with_bridge(self):
        out = self.dir / "captured"
        script = self.write_bridge(
            f'[ "$1" = --job ] || exit 2\ncp -r "{bundle("ec")}/." "{out}"\n')
        self.ok("capture", "fixture://ec", "-o", out, "--bridge", script,
                "--width-min", 320, "--width-max", 600)
        doc = json.loads(self.ok("detect", out).stdout)
        self.assertEqual(doc["failures"][0]["type"], "EC")

        env_out = self.dir / "env"
        script = self.write_bridge(
            f'[ "$1" = --job ] || exit 2\ncp -r "{bundle("ec")}/." "{env_out}"\n')
        self.ok("capture", "fixture://ec", "-o", env_out, env={"RLF_BRIDGE": str(script)})

    def test_capture_failures(self):
        out = self.dir / "out"
        p = run("capture", "fixture://ec", "-o", out, "--bridge", "rlf-no-such-bridge")
        self.assertEqual(p.returncode, 2)
        self.assertIn("BridgeMissing", p.stderr)
        p = run("capture", "fixture://ec", "-o", out)
        self.assertEqual(p.returncode, 2)
        nav = self.write_bridge("echo 'net::ERR_CONNECTION_REFUSED' >&2\nexit 1\n")
        p = run("capture", "http://localhost:1/", "-o", out, "--bridge", nav)
        self.assertEqual(p.returncode, 1)
        self.assertIn("ERR_CONNECTION_REFUSED", p.stderr)
        p = run("capture", "fixture://ec", "-o", out, "--bridge", nav, "--step", 0)
        self.assertEqual(p.returncode, 1)

    def test_outputs_are_byte_identical(self):
        for name in ("case_study", "ec", "vp", "we", "sr", "typography"):
            first = self.ok("detect", bundle(name)).stdout
            self.assertEqual(first, self.ok("detect", bundle(name)).stdout)
            failures = self.dir / f"{name}.json"
            failures.write_text(first)
            ranked = [self.ok("localize", bundle(name), failures).stdout for _ in range(2)]
            self.assertEqual(ranked[0], ranked[1])


if __name__ == "__main__":
    RLF = sys.argv[1]
    FIXTURES = Path(sys.argv[2])
    unittest.main(argv=[sys.argv[0], "-v"])
